#pragma once

// Exact scalar arithmetic shared by every other module: GMP-backed integers
// and rationals, 2-adic valuations, a few combinatorial scalars, and an exact
// linear solver.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "haupt/errors.hpp"

namespace haupt {

using Int = mpz_class;
// mpq_class keeps results of arithmetic in lowest terms with a positive
// denominator; every constructor in this library canonicalizes explicitly.
using Rat = mpq_class;

Rat make_rat(long num, long den = 1);
Rat make_rat(const Int& num, const Int& den = Int(1));
Rat parse_rat(std::string_view text);
std::string to_string(const Rat& x);
std::string to_string(const Int& x);
bool is_integer(const Rat& x);

/// 2-adic valuation, with +inf reserved for exact zero.
class Val2 {
 public:
  static Val2 infinity() { return Val2(); }
  explicit Val2(long v) : value_(v) {}

  bool is_infinite() const { return !value_.has_value(); }
  long value() const;

  friend bool operator==(const Val2&, const Val2&) = default;
  friend std::strong_ordering operator<=>(const Val2& a, const Val2& b);
  friend Val2 operator+(const Val2& a, const Val2& b);
  friend Val2 min(const Val2& a, const Val2& b) { return a <= b ? a : b; }

  // "+inf" or the decimal value.
  std::string to_string() const;

 private:
  Val2() = default;
  std::optional<long> value_;
};

Val2 val2(const Rat& x);
Val2 val2(const Int& x);

// Exponent of the prime p in x (x != 0).
long valuation(const Int& x, unsigned long p);

/// Bernoulli number B_k for even k >= 2 (B_2 = 1/6).
Rat bernoulli(int k);

/// Rising factorial x (x+1) ... (x+k-1); k = 0 gives 1.
Rat pochhammer(const Rat& x, long k);

/// n!! for odd n >= 1, with (-1)!! = 1.
Int double_factorial(long n);

Int factorial(long n);

/// Binomial coefficient C(n, k) for n >= 0; zero when k < 0 or k > n.
Int binomial(long n, long k);

Rat rat_pow(const Rat& base, long e);

using RatMatrix = std::vector<std::vector<Rat>>;

struct LinearSolution {
  enum class Kind { unique, inconsistent, family };
  Kind kind = Kind::inconsistent;
  // Particular solution with every free variable set to zero.
  std::vector<Rat> solution;
  // Basis of the kernel of A; empty unless kind == family.
  std::vector<std::vector<Rat>> kernel;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_columns;
};

/// Solves A x = b exactly. Rows are scaled to integers and reduced to row
/// echelon form by fraction-free (Bareiss) elimination with first-nonzero
/// pivoting, so the result is deterministic for identical inputs.
LinearSolution solve_exact(const RatMatrix& a, const std::vector<Rat>& b);

/// Trial-division factorization over the primes below `bound`; whatever is
/// left goes in `cofactor`.
struct Factorization {
  int sign = 1;
  std::vector<std::pair<unsigned long, long>> primes;
  Int cofactor = 1;
};
Factorization factor_small(const Int& x, unsigned long bound = 1000);

}  // namespace haupt
