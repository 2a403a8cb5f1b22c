// Content-addressed on-disk cache for expensive expansions.

#include <openssl/sha.h>

#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "haupt/modforms.hpp"

namespace haupt {

namespace {

std::mutex g_dir_mu;
std::optional<std::filesystem::path> g_dir;

std::string digest_hex(const std::string& s) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), md);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char c : md) {
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  return out;
}

}  // namespace

void set_cache_directory(std::optional<std::filesystem::path> dir) {
  std::lock_guard lock(g_dir_mu);
  g_dir = std::move(dir);
}

std::optional<std::filesystem::path> cache_directory() {
  std::lock_guard lock(g_dir_mu);
  return g_dir;
}

namespace detail {

std::optional<QSeries> cache_load(const std::string& request) {
  auto dir = cache_directory();
  if (!dir) return std::nullopt;
  try {
    std::ifstream in(*dir / (digest_hex(request) + ".json"));
    if (!in) return std::nullopt;
    const auto j = nlohmann::json::parse(in);
    if (j.at("request").get<std::string>() != request) return std::nullopt;
    return qseries_from_json(j.at("series"));
  } catch (const std::exception&) {
    return std::nullopt;  // corrupt entry: recompute
  }
}

void cache_store(const std::string& request, const QSeries& s) {
  auto dir = cache_directory();
  if (!dir) return;
  try {
    std::filesystem::create_directories(*dir);
    const auto target = *dir / (digest_hex(request) + ".json");
    std::random_device rd;
    const auto tmp = *dir / (digest_hex(request) + ".tmp" + std::to_string(rd()));
    {
      std::ofstream out(tmp);
      out << nlohmann::json{{"request", request}, {"series", to_json(s)}}.dump();
      if (!out) throw std::runtime_error("write failed");
    }
    std::filesystem::rename(tmp, target);
  } catch (const std::exception&) {
    // A cache that cannot be written is just a cold cache.
  }
}

}  // namespace detail

}  // namespace haupt
