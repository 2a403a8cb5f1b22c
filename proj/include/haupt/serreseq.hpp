#pragma once

// Serre's sequence lambda_{n,m} of level-one forms converging 2-adically to
// lambda^n: the trace construction for any genus-zero prime, and for p = 2
// the terminating closed sum and its coefficients c_{n,m,i} in G4, G6.

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

#include "haupt/modforms.hpp"

namespace haupt {

struct SerreParams {
  long p = 2;
  long n = 1;
  long m = 1;
};

/// p in {2,3,5,7,13}, n >= 1, m >= 1 and n < p^m. Throws ValidationError.
void validate(const SerreParams& params);

/// t_{n,m} = 2^m - n.
long serre_t(long n, long m);

enum class TraceFormula {
  general,  // lambda^n (E4 - p^4 E4(q^p))^(3p^m) + p^(1-12n/(p-1)) U_p(...)
  delta,    // p = 2 only, with the inner U_2 taken on a power of Delta
};
const char* formula_name(TraceFormula f);

/// lambda_{n,m} known through K. Working precision grows until the output
/// reaches K; PrecisionError when K < 1.
QSeries serre_trace(const SerreParams& params, long known_through, TraceFormula formula = TraceFormula::general);

/// The two summands of the p = 2 trace: lambda_{n,m} = t1 + scale * t2 with
/// t1 = lambda^n (5 E4 - 20 E2*^2)^(3 2^m) and t2 = Delta^(2^(m+1)-n) U_2(Delta^(n-2^m)).
struct TraceParts {
  QSeries t1;
  QSeries t2;
  Rat scale;  // 2^(1-12n) 240^(3 2^m)
};
TraceParts serre_trace_parts(long n, long m, long known_through);

/// psi_j = 2^(-8j) j! (3n - 3 2^m + 1)_{2j}, for 0 <= j <= t.
Rat psi_coeff(long n, long m, long j);
/// The same number as 2^(-12j) j! prod_{l=1..j} (8l - 12 2^m + 12n)(8l - 12 2^m + 12n - 4).
Rat psi_coeff_product(long n, long m, long j);

/// Psi_{n,m,i,j}; zero when i > n + j.
Rat big_psi(long n, long m, long i, long j);

/// c_{n,m,i} for 0 <= i <= 2^m. The full j-range sum and the range split
/// at i = n are both evaluated and must agree; the result must be an
/// integer. Either failure throws VerificationError.
Int c_coeff(long n, long m, long i);

/// 15^(3 2^m) sum_j psi_j^{-1} (3n - 3 2^m)_{3j} E4^(3 2^m - 3n - 3j) Delta^(n+j)
/// as an E-basis polynomial.
ModularPoly serre_closed_poly(long n, long m);
/// Same sum evaluated with the E4 and Delta expansions.
QSeries serre_closed(long n, long m, long known_through);

/// sum_i c_{n,m,i} G4^(3 2^m - 3i) G6^(2i).
ModularPoly serre_poly(long n, long m);

struct CoeffBound {
  long i = 0;
  Int c;
  Val2 val = Val2::infinity();
  long bound = 0;  // 12 2^m - 6n - 6i for i <= n, 12 2^m - 8n - 4i beyond
  std::optional<long> slack;  // val - bound; empty when c = 0
};

/// Checks the lower bounds on val2(c_{n,m,i}); VerificationError on violation.
std::vector<CoeffBound> coeff_val_bounds(long n, long m);

struct ConvergenceRow {
  long m = 0;
  SeriesVal2 to_limit;  // val2(lambda_{n,m} - lambda^n)
  SeriesVal2 step;      // val2(lambda_{n,m+1} - lambda_{n,m})
};

/// Rows for every m with n < 2^m and m <= m_max.
std::vector<ConvergenceRow> convergence_report(long n, long m_max, long known_through);

struct SerreCell {
  SerreParams params;
  long known_through = 0;
  TraceFormula formula = TraceFormula::general;
  QSeries series_trace;
  // p = 2 only:
  std::optional<QSeries> series_closed;
  std::optional<QSeries> series_poly;
  std::vector<Int> coeffs_c;
  std::optional<ModularPoly> poly_G;
  std::vector<CoeffBound> bounds;
  bool lead_ok = false;  // q^n coefficient equals 15^(3 2^m) (p = 2)
  bool closed_agrees = false;
  bool poly_agrees = false;
  bool bounds_ok = false;

  bool ok() const;
};

SerreCell compute_cell(const SerreParams& params, long known_through, TraceFormula formula = TraceFormula::general);

nlohmann::json factorization_json(const Int& x);
nlohmann::json to_json(const SerreCell& cell);

}  // namespace haupt
