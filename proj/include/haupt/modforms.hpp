#pragma once

// Classical and 2-adic modular forms as q-expansions, the Ramanujan-Serre
// derivative, and exact polynomial algebra over the Eisenstein generators.

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "haupt/qseries.hpp"

namespace haupt {

enum class Basis {
  E,  // E2^a E4^b E6^c, normalized with constant term 1
  G,  // G2^a G4^b G6^c with G_k = -(B_k / 2k) E_k
};

const char* basis_name(Basis b);

// Exponents of the weight-2, weight-4 and weight-6 generators.
using Exponent = std::array<int, 3>;

int exponent_weight(const Exponent& e);

/// Exact polynomial in the quasi-modular generators, homogeneous of a
/// declared weight. Zero coefficients are never stored.
class ModularPoly {
 public:
  ModularPoly(int weight, Basis basis) : weight_(weight), basis_(basis) {}

  static ModularPoly constant(const Rat& c, Basis basis = Basis::E);
  static ModularPoly monomial(const Exponent& e, const Rat& c, Basis basis);
  // The generator of weight 2, 4 or 6 in the given basis.
  static ModularPoly generator(int weight, Basis basis);

  int weight() const { return weight_; }
  Basis basis() const { return basis_; }
  const std::map<Exponent, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // True when no monomial involves the weight-2 generator.
  bool is_modular() const;
  Rat coeff(const Exponent& e) const;

  // Adds c to the coefficient of e; the monomial weight must match.
  void add_term(const Exponent& e, const Rat& c);

  ModularPoly& operator+=(const ModularPoly& o);
  ModularPoly& operator-=(const ModularPoly& o);
  ModularPoly& operator*=(const Rat& c);
  friend ModularPoly operator+(ModularPoly a, const ModularPoly& b) { return a += b; }
  friend ModularPoly operator-(ModularPoly a, const ModularPoly& b) { return a -= b; }
  friend ModularPoly operator*(ModularPoly a, const Rat& c) { return a *= c; }
  friend ModularPoly operator*(const Rat& c, ModularPoly a) { return a *= c; }
  friend ModularPoly operator*(const ModularPoly& a, const ModularPoly& b);
  friend bool operator==(const ModularPoly& a, const ModularPoly& b);

 private:
  void check_compatible(const ModularPoly& o) const;

  int weight_;
  Basis basis_;
  std::map<Exponent, Rat> terms_;
};

ModularPoly pow(const ModularPoly& p, long e);

/// Rewrites p in the other generator set using G_k = -(B_k / 2k) E_k.
ModularPoly to_basis(const ModularPoly& p, Basis basis);

nlohmann::json to_json(const ModularPoly& p);
ModularPoly modular_poly_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// q-expansions

/// E_k (constant term 1) or G_k, exact through K; k even >= 2.
QSeries eisenstein(int k, Basis variant, long known_through);

/// Delta = (E4^3 - E6^2) / 1728 = q prod (1 - q^n)^24.
QSeries delta(long known_through);

/// prod over (d, e) of eta(q^d)^e. The total exponent sum(d e) / 24 must be
/// an integer; otherwise ValidationError names the fractional value.
QSeries eta_quotient(const std::vector<std::pair<long, long>>& spec, long known_through);

/// (eta(q^p) / eta(q))^(24 / (p - 1)) for p in {2, 3, 5, 7, 13}.
QSeries lambda_hauptmodul(long p, long known_through);

/// E_k*(q) = E_k(q) - p^(k-1) E_k(q^p).
QSeries e_star(int k, long p, long known_through);

/// Weight-4 Eisenstein series on Gamma0(2), (E4 - E4(q^2)) / 240.
QSeries script_e4(long known_through);

/// j = E4^3 / Delta.
QSeries j_invariant(long known_through);

/// theta(f) - (weight / 12) E2 f. An exact f needs an explicit precision.
QSeries serre_derivative(const QSeries& f, long weight, std::optional<long> known_through = std::nullopt);

/// D^times with the weight ladder weight, weight + 2, ...
QSeries serre_derivative_iter(const QSeries& f, long weight, int times);

// ---------------------------------------------------------------------------
// Symbolic side

/// theta on E-basis polynomials via the Ramanujan identities; G-basis input
/// is converted first.
ModularPoly sym_theta(const ModularPoly& p);
ModularPoly sym_serre(const ModularPoly& p);

/// Substitutes the generator expansions; exact through K.
QSeries eval_poly(const ModularPoly& p, long known_through);

/// The unique E4^b E6^c combination matching f at weight w. The first
/// dim M_w coefficients determine it; every further known coefficient is
/// then checked and a mismatch throws VerificationError.
ModularPoly to_eisenstein_basis(const QSeries& f, int weight);

/// Dimension of the level-one space M_w.
int level_one_dimension(int weight);

/// E_k or G_k as a polynomial in the weight-2/4/6 generators of the same
/// basis. Odd k gives the zero polynomial.
ModularPoly eisenstein_poly(int k, Basis basis);

// ---------------------------------------------------------------------------
// Expansion cache

/// Directory for persisted Eisenstein expansions, or nullopt to disable.
/// Entries are addressed by a SHA-256 digest of the request and carry the
/// request string; anything unreadable or mismatched is recomputed.
void set_cache_directory(std::optional<std::filesystem::path> dir);
std::optional<std::filesystem::path> cache_directory();

namespace detail {
std::optional<QSeries> cache_load(const std::string& request);
void cache_store(const std::string& request, const QSeries& s);
}  // namespace detail

}  // namespace haupt
