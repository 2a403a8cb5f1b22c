#pragma once

// Monic modular linear differential equations
//   D^t f + g_{t-1} D^(t-1) f + ... + g_0 f = 0,
// with D the Serre derivative on the weight ladder w, w + 2, ... and g_i of
// weight 2(t - i).

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "haupt/modforms.hpp"

namespace haupt {

struct Mlde {
  int degree = 1;
  int base_weight = 0;
  std::vector<ModularPoly> coeffs;  // g_0 .. g_{t-1}
  std::string provenance = "constructed";
};

/// Checks the coefficient count and weights; ValidationError otherwise.
void validate(const Mlde& L);

nlohmann::json to_json(const Mlde& L);
Mlde mlde_from_json(const nlohmann::json& j);

/// L applied to f, where f has weight L.base_weight.
QSeries mlde_apply(const Mlde& L, const QSeries& f);

/// The third-order equation for Delta^n lambda_{n,m} (p = 2), base weight
/// 12 2^m + 12n, with t = 2^m - n:
///   g_2 = 0, g_1 = -(3t^2/4 + t/4 + 1/18) E4, g_0 = (t^3 + t^2)/4 E6.
Mlde serre_mlde(long n, long m);

struct IdentityCheck {
  bool ok = false;
  std::optional<long> first_failure;  // exponent of the first mismatch
};

struct LimitMldeReport {
  long n = 0;
  long known_through = 0;
  IdentityCheck identity;      // D^3 F = ((n^2 - n^3) E2*^3 - (n^2/2 + n/18) E2* E4) F
  IdentityCheck weight_shift;  // D^i at weight 12n of F equals Delta^n D^i at weight 0 of lambda^n, i <= 3
  bool ok() const { return identity.ok && weight_shift.ok; }
};

/// F = Delta^n lambda^n at weight 12n.
LimitMldeReport verify_limit_mlde(long n, long known_through);

struct SerreMldeReport {
  long n = 0, m = 0;
  long known_through = 0;
  Mlde equation;
  IdentityCheck sum;  // on Delta^n lambda_{n,m}
  IdentityCheck t1;   // on Delta^n lambda^n (5E4 - 20E2*^2)^(3 2^m)
  IdentityCheck t2;   // on Delta^n Delta^(2^(m+1)-n) U_2(Delta^(n-2^m))
  bool ok() const { return sum.ok && t1.ok && t2.ok; }
};

SerreMldeReport verify_serre_mlde(long n, long m, long known_through);

/// With t -> -n, the coefficients of serre_mlde reproduce the limit
/// equation once D F = -n E2* F and E6 = -4E2*^3 + 3E2* E4 are substituted.
/// Checked as an identity of polynomials in E2*, E4.
bool limit_consistency(long n);

enum class CoeffSpace {
  M,       // polynomials in E4, E6
  Mprime,  // polynomials in E2, E4, E6
};
const char* coeff_space_name(CoeffSpace s);

/// Monomial basis of the given space at weight w.
std::vector<Exponent> space_basis(CoeffSpace s, int weight);

struct SearchReport {
  CoeffSpace space = CoeffSpace::M;
  int degree = 0;
  int base_weight = 0;
  long equations = 0;
  long unknowns = 0;
  std::size_t rank = 0;            // rank of the coefficient matrix
  std::size_t augmented_rank = 0;  // rank with the right-hand side appended
  std::size_t solution_dim = 0;    // kernel dimension when solvable
  std::optional<Mlde> found;
  bool reverified = false;
  // Homogeneous system with the leading coefficient also unknown, taken
  // in the space at weight nonmonic_lead_weight. Report only.
  int nonmonic_lead_weight = 0;
  long nonmonic_unknowns = 0;
  std::size_t nonmonic_kernel_dim = 0;
};

/// Solves for g_0 .. g_{t-1} in the space from the coefficients of f below
/// K (default: all known coefficients). Needs at least unknowns + 10
/// equations, else PrecisionError. A returned equation has been re-applied
/// to f and annihilates every known coefficient.
SearchReport mlde_search(const QSeries& f, int weight, int degree, CoeffSpace space,
                         std::optional<long> known_through = std::nullopt);

nlohmann::json to_json(const SearchReport& r);

struct IndicialData {
  std::vector<Rat> polynomial;  // coefficients, constant term first
  std::vector<Rat> roots;       // rational roots with multiplicity, ascending
};

IndicialData indicial_roots(const Mlde& L);

/// Rational roots of an integer-coefficient or rational polynomial
/// (constant term first), with multiplicity, ascending.
std::vector<Rat> rational_roots(const std::vector<Rat>& poly);

}  // namespace haupt
