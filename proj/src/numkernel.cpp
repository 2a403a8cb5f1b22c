#include "haupt/numkernel.hpp"

#include <algorithm>
#include <mutex>
#include <utility>

namespace haupt {

Rat make_rat(long num, long den) {
  if (den == 0) throw ValidationError("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw ValidationError("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat parse_rat(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw ValidationError("malformed rational literal: '" + s + "'");
  }
}

std::string to_string(const Rat& x) { return x.get_str(); }
std::string to_string(const Int& x) { return x.get_str(); }

bool is_integer(const Rat& x) { return x.get_den() == 1; }

long Val2::value() const {
  if (!value_) throw std::logic_error("value() of an infinite valuation");
  return *value_;
}

std::strong_ordering operator<=>(const Val2& a, const Val2& b) {
  if (a.is_infinite() || b.is_infinite()) {
    return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
  }
  return *a.value_ <=> *b.value_;
}

Val2 operator+(const Val2& a, const Val2& b) {
  if (a.is_infinite() || b.is_infinite()) return Val2::infinity();
  return Val2(*a.value_ + *b.value_);
}

std::string Val2::to_string() const {
  return value_ ? std::to_string(*value_) : std::string("+inf");
}

Val2 val2(const Int& x) {
  if (x == 0) return Val2::infinity();
  return Val2(static_cast<long>(mpz_scan1(x.get_mpz_t(), 0)));
}

Val2 val2(const Rat& x) {
  if (x == 0) return Val2::infinity();
  return Val2(static_cast<long>(mpz_scan1(x.get_num_mpz_t(), 0)) -
              static_cast<long>(mpz_scan1(x.get_den_mpz_t(), 0)));
}

long valuation(const Int& x, unsigned long p) {
  if (x == 0) throw ValidationError("valuation of zero");
  Int y = abs(x);
  long e = 0;
  while (mpz_divisible_ui_p(y.get_mpz_t(), p)) {
    mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
    ++e;
  }
  return e;
}

Int factorial(long n) {
  if (n < 0) throw ValidationError("factorial of a negative integer");
  Int r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

Int binomial(long n, long k) {
  if (n < 0) throw ValidationError("binomial with negative top argument");
  if (k < 0 || k > n) return 0;
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

Int double_factorial(long n) {
  if (n < -1) throw ValidationError("double factorial below -1");
  if (n <= 0) return 1;
  Int r;
  mpz_2fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

Rat pochhammer(const Rat& x, long k) {
  if (k < 0) throw ValidationError("pochhammer with negative length");
  Rat r = 1;
  Rat term = x;
  for (long i = 0; i < k; ++i) {
    r *= term;
    term += 1;
  }
  return r;
}

Rat rat_pow(const Rat& base, long e) {
  if (e < 0) {
    if (base == 0) throw ValidationError("zero to a negative power");
    Rat inv = 1 / base;
    return rat_pow(inv, -e);
  }
  Int num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
  return Rat(num, den);  // already coprime
}

Rat bernoulli(int k) {
  if (k < 2 || k % 2 != 0) throw ValidationError("bernoulli: k must be even and >= 2");
  // sum_{j=0}^{m} C(m+1, j) B_j = 0, memoized across calls.
  static std::mutex mu;
  static std::vector<Rat> table{Rat(1)};
  std::lock_guard lock(mu);
  while (static_cast<int>(table.size()) <= k) {
    long m = static_cast<long>(table.size());
    Rat s = 0;
    for (long j = 0; j < m; ++j) s += Rat(binomial(m + 1, j)) * table[j];
    Rat b = -s / Rat(m + 1);
    b.canonicalize();
    table.push_back(b);
  }
  return table[k];
}

namespace {

Int lcm_of_denominators(const std::vector<Rat>& row, const Rat& extra) {
  Int l = extra.get_den();
  for (const auto& x : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

}  // namespace

LinearSolution solve_exact(const RatMatrix& a, const std::vector<Rat>& b) {
  const std::size_t rows = a.size();
  if (b.size() != rows) throw ValidationError("solve_exact: right-hand side length mismatch");
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  for (const auto& r : a) {
    if (r.size() != cols) throw ValidationError("solve_exact: ragged matrix");
  }

  // Integer augmented matrix, one row scaled by the lcm of its denominators.
  std::vector<std::vector<Int>> m(rows, std::vector<Int>(cols + 1));
  for (std::size_t i = 0; i < rows; ++i) {
    Int l = lcm_of_denominators(a[i], b[i]);
    for (std::size_t j = 0; j < cols; ++j) {
      m[i][j] = a[i][j].get_num() * (l / a[i][j].get_den());
    }
    m[i][cols] = b[i].get_num() * (l / b[i].get_den());
  }

  LinearSolution out;
  Int prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j <= cols; ++j) {
        Int t = m[r][c] * m[i][j] - m[i][c] * m[r][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][c] = 0;
    }
    prev = m[r][c];
    out.pivot_columns.push_back(c);
    ++r;
  }
  out.rank = r;

  for (std::size_t i = r; i < rows; ++i) {
    if (m[i][cols] != 0) {
      out.kind = LinearSolution::Kind::inconsistent;
      return out;
    }
  }

  std::vector<bool> is_pivot(cols, false);
  for (auto c : out.pivot_columns) is_pivot[c] = true;

  // Back substitution with the given right-hand column and preset free values.
  auto back_substitute = [&](std::vector<Rat> x, bool homogeneous) {
    for (std::size_t k = r; k-- > 0;) {
      const std::size_t pc = out.pivot_columns[k];
      Rat s = homogeneous ? Rat(0) : Rat(m[k][cols]);
      for (std::size_t j = pc + 1; j < cols; ++j) {
        if (m[k][j] != 0 && x[j] != 0) s -= Rat(m[k][j]) * x[j];
      }
      x[pc] = s / Rat(m[k][pc]);
      x[pc].canonicalize();
    }
    return x;
  };

  out.solution = back_substitute(std::vector<Rat>(cols, Rat(0)), false);
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rat> x(cols, Rat(0));
    x[f] = 1;
    out.kernel.push_back(back_substitute(std::move(x), true));
  }
  out.kind = out.kernel.empty() ? LinearSolution::Kind::unique : LinearSolution::Kind::family;
  return out;
}

Factorization factor_small(const Int& x, unsigned long bound) {
  if (x == 0) throw ValidationError("factorization of zero");
  Factorization f;
  f.sign = sgn(x) < 0 ? -1 : 1;
  Int y = abs(x);
  for (unsigned long p = 2; p < bound; ++p) {
    bool prime = true;
    for (unsigned long d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        prime = false;
        break;
      }
    }
    if (!prime) continue;
    long e = 0;
    while (mpz_divisible_ui_p(y.get_mpz_t(), p)) {
      mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
      ++e;
    }
    if (e > 0) f.primes.emplace_back(p, e);
    if (y == 1) break;
  }
  f.cofactor = y;
  return f;
}

}  // namespace haupt
