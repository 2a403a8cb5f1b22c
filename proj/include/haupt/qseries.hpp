#pragma once

// Truncated Laurent series in q over the rationals.
//
// A QSeries stores coefficients for the exponents lead, lead+1, ... and a
// bound K = known_through(): every coefficient of q^e with e < K is known
// exactly, nothing is claimed about e >= K. The bound kExact marks a finite
// Laurent polynomial whose unstored coefficients are all zero.
//
// Precision propagates pessimistically:
//   add/sub  K = min(K_f, K_g)
//   mul      K = min(K_f + v_g, K_g + v_f)
//   invert   K = K_f - 2 v_f
//   theta    K unchanged
//   U_p      K = ceil(K / p)
//   V_p      K = p (K - 1) + 1

#include <nlohmann/json.hpp>

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "haupt/numkernel.hpp"

namespace haupt {

class QSeries {
 public:
  static constexpr long kExact = std::numeric_limits<long>::max() / 4;

  QSeries() = default;  // exact zero
  QSeries(long lead, std::vector<Rat> coeffs, long known_through);

  static QSeries exact(long lead, std::vector<Rat> coeffs);
  static QSeries monomial(const Rat& c, long exponent, long known_through = kExact);
  static QSeries zero(long known_through = kExact);
  static QSeries one(long known_through = kExact) { return monomial(Rat(1), 0, known_through); }

  // Lowest exponent with a nonzero coefficient; known_through() when the
  // series is zero on its whole known range.
  long lead() const { return lead_; }
  long known_through() const { return known_; }
  bool is_exact() const { return known_ >= kExact; }
  bool is_zero() const { return coeffs_.empty(); }

  // Coefficient of q^e; throws PrecisionError when e >= known_through().
  Rat coeff(long e) const;
  const std::vector<Rat>& coeffs() const { return coeffs_; }
  long stored_end() const { return lead_ + static_cast<long>(coeffs_.size()); }

  // Same series with the known range cut down to K (K <= known_through()).
  QSeries truncated(long k) const;
  // Multiplication by q^s.
  QSeries shifted(long s) const;

  QSeries operator-() const;
  QSeries& operator+=(const QSeries& g);
  QSeries& operator-=(const QSeries& g);
  QSeries& operator*=(const QSeries& g);
  QSeries& operator*=(const Rat& c);

  friend QSeries operator+(QSeries f, const QSeries& g) { return f += g; }
  friend QSeries operator-(QSeries f, const QSeries& g) { return f -= g; }
  friend QSeries operator*(const QSeries& f, const QSeries& g);
  friend QSeries operator*(QSeries f, const Rat& c) { return f *= c; }
  friend QSeries operator*(const Rat& c, QSeries f) { return f *= c; }

  // Structural equality: same known range and same coefficients.
  friend bool operator==(const QSeries&, const QSeries&) = default;

 private:
  void normalize();

  long lead_ = kExact;
  long known_ = kExact;
  std::vector<Rat> coeffs_;
};

// Saturating addition on precision bounds.
long prec_add(long a, long b);

enum class MulKernel {
  // Direct rational convolution; the reference implementation.
  schoolbook,
  // Clears denominators and convolves big integers; identical output.
  integer_scaled,
};

QSeries multiply(const QSeries& f, const QSeries& g, MulKernel kernel);
void set_default_mul_kernel(MulKernel kernel);
MulKernel default_mul_kernel();

/// Multiplicative inverse. An exact non-monomial input has an infinite
/// inverse, so a precision cap is required for it.
QSeries invert(const QSeries& f, std::optional<long> known_through = std::nullopt);

/// f^e by repeated squaring; negative e goes through invert().
QSeries pow(const QSeries& f, long e, std::optional<long> known_through = std::nullopt);

/// theta = q d/dq.
QSeries theta(const QSeries& f);

/// sum a_i q^i  ->  sum a_{p i} q^i.
QSeries u_p(const QSeries& f, long p);

/// q -> q^p.
QSeries v_p(const QSeries& f, long p);

struct SeriesVal2 {
  // Minimum 2-adic valuation over the known coefficients. This is a lower
  // bound for the full series only on the range e < certified_below.
  Val2 value = Val2::infinity();
  long certified_below = 0;
  bool truncated = true;
};
SeriesVal2 series_val2(const QSeries& f);

/// True iff f and g agree on every exponent below K. Throws PrecisionError
/// if either is not known that far.
bool eq_through(const QSeries& f, const QSeries& g, long k);

/// First exponent below K where f and g differ, if any.
std::optional<long> first_difference(const QSeries& f, const QSeries& g, long k);

/// "1 + 240q + 2160q^2 + O(q^3)"; non-integral coefficients of nonconstant
/// terms are parenthesized: "1/240 + q + (1/2)q^2 + O(q^3)".
std::string render_text(const QSeries& f, std::optional<long> max_terms = std::nullopt);

/// {"lead": v, "known_through": K, "coeffs": ["num/den", ...]}; exact series
/// carry "known_through": null.
nlohmann::json to_json(const QSeries& f);
QSeries qseries_from_json(const nlohmann::json& j);

}  // namespace haupt
