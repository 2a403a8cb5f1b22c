#pragma once

// The rank-one Heisenberg vertex algebra as polynomials in the creation
// modes h(-1), h(-2), ..., the square-bracket operators h[-2], h[-3] acting
// on them, Mason-Tuite characters, and the pre-images v_{n,m} of Serre's
// sequence under the character map.

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <vector>

#include "haupt/modforms.hpp"

namespace haupt {

/// Multiplicities of h(-1), h(-2), ... (index k-1 holds the count of
/// h(-k)); no trailing zeros, so the vacuum is the empty vector.
using Monomial = std::vector<int>;

/// Round-bracket weight sum_k k * count_k.
long monomial_weight(const Monomial& m);

/// Modes in descending order, e.g. h(-2)^2 h(-1) -> [2, 2, 1].
std::vector<int> monomial_modes(const Monomial& m);
Monomial monomial_from_modes(const std::vector<int>& modes);

class HeisenbergState {
 public:
  HeisenbergState() = default;
  static HeisenbergState vacuum();
  static HeisenbergState single(const Monomial& m, const Rat& c = Rat(1));

  const std::map<Monomial, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rat coeff(const Monomial& m) const;
  // Highest k with h(-k) present; 0 for scalars.
  int max_mode() const;

  void add(const Monomial& m, const Rat& c);

  HeisenbergState& operator+=(const HeisenbergState& o);
  HeisenbergState& operator-=(const HeisenbergState& o);
  HeisenbergState& operator*=(const Rat& c);
  friend HeisenbergState operator+(HeisenbergState a, const HeisenbergState& b) { return a += b; }
  friend HeisenbergState operator-(HeisenbergState a, const HeisenbergState& b) { return a -= b; }
  friend HeisenbergState operator*(HeisenbergState a, const Rat& c) { return a *= c; }
  friend HeisenbergState operator*(const Rat& c, HeisenbergState a) { return a *= c; }
  friend bool operator==(const HeisenbergState&, const HeisenbergState&) = default;

 private:
  std::map<Monomial, Rat> terms_;
};

nlohmann::json to_json(const HeisenbergState& v);
HeisenbergState heisenberg_state_from_json(const nlohmann::json& j);

enum class Kernel {
  reference,  // map-based, rational arithmetic
  fast,       // dense big-integer arrays (states in modes 1..3 only)
};

/// Polynomial product in the symmetric algebra.
HeisenbergState state_mul(const HeisenbergState& u, const HeisenbergState& v, Kernel kernel = Kernel::fast);
/// a u + v.
HeisenbergState state_axpy(const Rat& a, const HeisenbergState& u, const HeisenbergState& v);

/// Exact minimum of val2 over the coefficients; +inf for the zero state.
Val2 state_val2(const HeisenbergState& v);

// ---------------------------------------------------------------------------
// Square-bracket operators

struct BracketOp {
  enum class Kind { H2, H3 };
  Kind kind;
  std::vector<std::pair<int, Rat>> mult_part;   // (k, c): multiply by c h(-k)
  std::vector<std::pair<int, Rat>> deriv_part;  // (k, c): c d/dh(-k)

  static BracketOp h2();  // h(-2) + h(-1) - (1/120) d2 + (1/80) d3
  static BracketOp h3();  // h(-3) + (3/2)h(-2) + (1/2)h(-1) + (1/240) d1 - (1/240) d2 + (1/315) d3
};

/// op^times v. States involving h(-k) for k > 3 are rejected, since the
/// higher tails of the operators are not modelled.
HeisenbergState apply_bracket(const BracketOp& op, const HeisenbergState& v, long times = 1);

/// alpha_r = (-1)^r / (2^r (2r-1)!!) h[-2]^{2r} 1, with (-1)!! = 1.
HeisenbergState alpha_state(long r);
/// beta_s = 2^s / (2s-1)!! h[-3]^{2s} 1.
HeisenbergState beta_state(long s);

/// alpha_r from the Hermite-type sum
/// (-1)^r / (2^r (2r-1)!!) sum_l C(2r,2l) (2l)! / ((-240)^l l!) (h(-2)+h(-1))^{2(r-l)}.
HeisenbergState alpha_closed_form(long r);

/// Product alpha_r beta_s. The reference kernel iterates the bracket
/// operators and multiplies states; the fast kernel works in the variables
/// x = h(-2)+h(-1), y = h(-3)+(3/2)h(-2)+(1/2)h(-1), on which h[-2] and
/// h[-3] act as x - (1/120) d/dx and y - (1/1008) d/dy.
HeisenbergState alpha_beta(long r, long s, Kernel kernel = Kernel::fast);

// ---------------------------------------------------------------------------
// Characters

/// Every perfect matching of the positions of phi (listed as modes), as
/// pairs of mode values. Odd size gives no matchings.
std::vector<std::vector<std::pair<int, int>>> pair_partitions(const std::vector<int>& phi);

/// Character of h[-k_1] ... h[-k_r] 1 for the multiset phi (given as
/// multiplicities like Monomial), as a G-basis polynomial. Pairs of odd total
/// weight contribute zero. Matchings are counted by type.
ModularPoly character_MT(const Monomial& phi);
/// Same character summed over the explicit matchings; exponential, for tests.
ModularPoly character_MT_exhaustive(const Monomial& phi);

/// Formal combination of square-bracket monomials h[-k_1]...h[-k_r] 1.
struct SquareBracketVector {
  std::map<Monomial, Rat> terms;
  void add(const Monomial& m, const Rat& c);
};

ModularPoly character_of(const SquareBracketVector& v);

/// Square-bracket forms of alpha_r beta_s and of v_{n,m}.
SquareBracketVector alpha_beta_square(long r, long s);
SquareBracketVector v_square(long n, long m);

/// v_{n,m} = sum_i c_{n,m,i} alpha_{3 2^m - 3i} beta_{2i} in round brackets.
HeisenbergState v_state(long n, long m, Kernel kernel = Kernel::fast);

// ---------------------------------------------------------------------------
// Reports

struct CauchyRow {
  long m = 0;
  Val2 step = Val2::infinity();  // val2(v_{n,m+1} - v_{n,m})
  bool const_coeff_ok = false;   // Coeff of 1 in alpha_{3 2^m}
  bool quad_coeff_ok = false;    // Coeff of h(-1)^2 in alpha_{3 2^m}
  bool rescale_ok = false;       // the double-factorial ratios have val2 0
};

/// Rows for each m with n < 2^m, m <= m_max.
std::vector<CauchyRow> cauchy_report(long n, long m_max);

struct CertificateTerm {
  long i = 0;
  Val2 val = Val2::infinity();  // val2 of c_i alpha beta
  long bound = 0;               // -6n for i <= n, -8n + 2i beyond
};

struct CertificateCell {
  long n = 0, m = 0;
  Val2 val = Val2::infinity();  // val2(v_{n,m})
  long bound = 0;               // -6n
  std::vector<CertificateTerm> terms;
  bool character_ok = false;    // F_S(v_{n,m}) == serre_poly(n, m)
  bool ok() const;
};

/// Every (n, m) with n <= n_max, m <= m_max, n < 2^m. Throws
/// VerificationError naming the first (n, m, i) that breaks a bound.
std::vector<CertificateCell> overconvergence_certificate(long n_max, long m_max);

nlohmann::json to_json(const CertificateCell& c);

}  // namespace haupt
