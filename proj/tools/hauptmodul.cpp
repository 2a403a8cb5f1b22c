#include <iostream>

#include "haupt/cli.hpp"

int main(int argc, char** argv) { return haupt::cli::run(argc, argv, std::cout, std::cerr); }
