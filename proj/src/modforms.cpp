#include "haupt/modforms.hpp"

#include <mutex>
#include <sstream>

namespace haupt {

const char* basis_name(Basis b) { return b == Basis::E ? "E" : "G"; }

int exponent_weight(const Exponent& e) { return 2 * e[0] + 4 * e[1] + 6 * e[2]; }

namespace {

// E_k = factor * G_k.
Rat e_over_g(int k) { return Rat(-2 * k) / bernoulli(k); }

}  // namespace

ModularPoly ModularPoly::constant(const Rat& c, Basis basis) {
  ModularPoly p(0, basis);
  p.add_term({0, 0, 0}, c);
  return p;
}

ModularPoly ModularPoly::monomial(const Exponent& e, const Rat& c, Basis basis) {
  ModularPoly p(exponent_weight(e), basis);
  p.add_term(e, c);
  return p;
}

ModularPoly ModularPoly::generator(int weight, Basis basis) {
  switch (weight) {
    case 2: return monomial({1, 0, 0}, Rat(1), basis);
    case 4: return monomial({0, 1, 0}, Rat(1), basis);
    case 6: return monomial({0, 0, 1}, Rat(1), basis);
    default: throw ValidationError("generators have weight 2, 4 or 6");
  }
}

bool ModularPoly::is_modular() const {
  for (const auto& [e, c] : terms_) {
    if (e[0] != 0) return false;
  }
  return true;
}

Rat ModularPoly::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

void ModularPoly::add_term(const Exponent& e, const Rat& c) {
  if (e[0] < 0 || e[1] < 0 || e[2] < 0) throw ValidationError("negative exponent in modular polynomial");
  if (exponent_weight(e) != weight_) {
    throw ValidationError("monomial of weight " + std::to_string(exponent_weight(e)) +
                          " added to polynomial of weight " + std::to_string(weight_));
  }
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void ModularPoly::check_compatible(const ModularPoly& o) const {
  if (basis_ != o.basis_) throw ValidationError("modular polynomials in different bases");
}

ModularPoly& ModularPoly::operator+=(const ModularPoly& o) {
  check_compatible(o);
  if (o.is_zero()) return *this;
  if (is_zero()) {
    weight_ = o.weight_;
  } else if (weight_ != o.weight_) {
    throw ValidationError("adding modular polynomials of weights " + std::to_string(weight_) + " and " +
                          std::to_string(o.weight_));
  }
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

ModularPoly& ModularPoly::operator-=(const ModularPoly& o) { return *this += o * Rat(-1); }

ModularPoly& ModularPoly::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, x] : terms_) x *= c;
  return *this;
}

ModularPoly operator*(const ModularPoly& a, const ModularPoly& b) {
  a.check_compatible(b);
  ModularPoly r(a.weight_ + b.weight_, a.basis_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    }
  }
  return r;
}

bool operator==(const ModularPoly& a, const ModularPoly& b) {
  if (a.is_zero() && b.is_zero()) return true;
  return a.basis_ == b.basis_ && a.weight_ == b.weight_ && a.terms_ == b.terms_;
}

ModularPoly pow(const ModularPoly& p, long e) {
  if (e < 0) throw ValidationError("negative power of a modular polynomial");
  ModularPoly r = ModularPoly::constant(Rat(1), p.basis());
  ModularPoly base = p;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return r;
}

ModularPoly to_basis(const ModularPoly& p, Basis basis) {
  if (p.basis() == basis) return p;
  std::array<Rat, 3> f{e_over_g(2), e_over_g(4), e_over_g(6)};
  if (basis == Basis::E) {
    for (auto& x : f) x = 1 / x;  // G_k = E_k / factor
  }
  ModularPoly r(p.weight(), basis);
  for (const auto& [e, c] : p.terms()) {
    r.add_term(e, c * rat_pow(f[0], e[0]) * rat_pow(f[1], e[1]) * rat_pow(f[2], e[2]));
  }
  return r;
}

nlohmann::json to_json(const ModularPoly& p) {
  nlohmann::json j;
  j["weight"] = p.weight();
  j["basis"] = basis_name(p.basis());
  auto terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) {
    terms.push_back({{"exp", {e[0], e[1], e[2]}}, {"coeff", to_string(c)}});
  }
  j["terms"] = std::move(terms);
  return j;
}

ModularPoly modular_poly_from_json(const nlohmann::json& j) {
  try {
    const std::string b = j.at("basis").get<std::string>();
    if (b != "E" && b != "G") throw ValidationError("unknown basis '" + b + "'");
    ModularPoly p(j.at("weight").get<int>(), b == "E" ? Basis::E : Basis::G);
    for (const auto& t : j.at("terms")) {
      const auto& e = t.at("exp");
      Exponent ex{0, 0, 0};
      if (e.size() == 3) {
        ex = {e[0].get<int>(), e[1].get<int>(), e[2].get<int>()};
      } else if (e.size() == 2) {
        ex = {0, e[0].get<int>(), e[1].get<int>()};
      } else {
        throw ValidationError("exponent must have two or three entries");
      }
      p.add_term(ex, parse_rat(t.at("coeff").get<std::string>()));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed modular polynomial JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

QSeries compute_eisenstein(int k, Basis variant, long known_through) {
  const long n = std::max<long>(known_through, 1);
  std::vector<Int> sigma(static_cast<std::size_t>(n));
  Int dp;
  for (long d = 1; d < n; ++d) {
    mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(k - 1));
    for (long m = d; m < n; m += d) sigma[static_cast<std::size_t>(m)] += dp;
  }
  std::vector<Rat> cs(static_cast<std::size_t>(n));
  if (variant == Basis::E) {
    const Rat factor = e_over_g(k);
    cs[0] = 1;
    for (long m = 1; m < n; ++m) cs[static_cast<std::size_t>(m)] = factor * Rat(sigma[static_cast<std::size_t>(m)]);
  } else {
    cs[0] = -bernoulli(k) / Rat(2 * k);
    for (long m = 1; m < n; ++m) cs[static_cast<std::size_t>(m)] = Rat(sigma[static_cast<std::size_t>(m)]);
  }
  return QSeries(0, std::move(cs), known_through);
}

// Memo table: the longest expansion computed so far per (k, variant).
std::mutex g_memo_mu;
std::map<std::pair<int, Basis>, QSeries> g_memo;

// prod_{n >= 1} (1 - q^(d n)) by the pentagonal number theorem.
QSeries euler_product(long d, long known_through) {
  std::vector<Rat> cs(static_cast<std::size_t>(std::max<long>(known_through, 1)));
  for (long k = 0; d * k * (3 * k - 1) / 2 < known_through; ++k) {
    const int sign = k % 2 == 0 ? 1 : -1;
    cs[static_cast<std::size_t>(d * k * (3 * k - 1) / 2)] = sign;
    const long e = d * k * (3 * k + 1) / 2;
    if (k > 0 && e < known_through) cs[static_cast<std::size_t>(e)] = sign;
  }
  return QSeries(0, std::move(cs), known_through);
}

}  // namespace

QSeries eisenstein(int k, Basis variant, long known_through) {
  if (k < 2 || k % 2 != 0) throw ValidationError("Eisenstein series need even weight k >= 2, got " + std::to_string(k));
  if (known_through < 0) throw ValidationError("negative precision");
  const auto key = std::make_pair(k, variant);
  {
    std::lock_guard lock(g_memo_mu);
    auto it = g_memo.find(key);
    if (it != g_memo.end() && it->second.known_through() >= known_through) {
      return it->second.truncated(known_through);
    }
  }
  const std::string request = std::string("eisenstein:") + basis_name(variant) + ":k=" + std::to_string(k) +
                              ":K=" + std::to_string(known_through);
  QSeries s;
  if (auto cached = detail::cache_load(request)) {
    s = *cached;
  } else {
    s = compute_eisenstein(k, variant, known_through);
    detail::cache_store(request, s);
  }
  std::lock_guard lock(g_memo_mu);
  auto& slot = g_memo[key];
  if (slot.is_exact() || slot.known_through() < s.known_through()) slot = s;
  return s;
}

QSeries delta(long known_through) { return eta_quotient({{1, 24}}, known_through); }

QSeries eta_quotient(const std::vector<std::pair<long, long>>& spec, long known_through) {
  long total = 0;
  for (const auto& [d, e] : spec) {
    if (d < 1) throw ValidationError("eta quotient levels must be positive");
    total += d * e;
  }
  if (total % 24 != 0) {
    throw ValidationError("eta quotient has non-integral leading exponent " + to_string(make_rat(total, 24)));
  }
  const long lead = total / 24;
  const long inner = known_through - lead;
  if (inner <= 0) return QSeries::zero(known_through);
  QSeries product = QSeries::one(inner);
  for (const auto& [d, e] : spec) {
    if (e == 0) continue;
    product *= pow(euler_product(d, inner), e, inner);
  }
  return product.shifted(lead);
}

QSeries lambda_hauptmodul(long p, long known_through) {
  if (p != 2 && p != 3 && p != 5 && p != 7 && p != 13) {
    throw ValidationError("the hauptmodul is defined here for p in {2,3,5,7,13}, got " + std::to_string(p));
  }
  const long e = 24 / (p - 1);
  return eta_quotient({{p, e}, {1, -e}}, known_through);
}

QSeries e_star(int k, long p, long known_through) {
  const long coarse = (known_through + p - 2) / p + 1;  // p (coarse - 1) + 1 >= K
  QSeries ek = eisenstein(k, Basis::E, known_through);
  QSeries ekp = v_p(eisenstein(k, Basis::E, coarse), p);
  Int pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
  return (ek - ekp * Rat(pk)).truncated(known_through);
}

QSeries script_e4(long known_through) {
  const long coarse = (known_through + 0) / 2 + 1;
  QSeries e4 = eisenstein(4, Basis::E, known_through);
  return ((e4 - v_p(eisenstein(4, Basis::E, coarse), 2)) * make_rat(1, 240)).truncated(known_through);
}

QSeries j_invariant(long known_through) {
  QSeries e4 = eisenstein(4, Basis::E, known_through + 1);
  return (pow(e4, 3) * invert(delta(known_through + 2))).truncated(known_through);
}

QSeries serre_derivative(const QSeries& f, long weight, std::optional<long> known_through) {
  QSeries g = f;
  if (g.is_exact()) {
    if (!known_through) throw ValidationError("Serre derivative of an exact series needs a precision");
    g = g.truncated(*known_through);
  } else if (known_through && *known_through < g.known_through()) {
    g = g.truncated(*known_through);
  }
  if (g.is_zero()) return g;
  const long e2_prec = std::max<long>(g.known_through() - g.lead(), 1);
  QSeries r = theta(g) - eisenstein(2, Basis::E, e2_prec) * g * make_rat(weight, 12);
  return r;
}

QSeries serre_derivative_iter(const QSeries& f, long weight, int times) {
  QSeries g = f;
  for (int i = 0; i < times; ++i) g = serre_derivative(g, weight + 2 * i);
  return g;
}

// ---------------------------------------------------------------------------

ModularPoly sym_theta(const ModularPoly& p) {
  const ModularPoly q = to_basis(p, Basis::E);
  ModularPoly r(q.weight() + 2, Basis::E);
  for (const auto& [e, c] : q.terms()) {
    const auto [a, b, cc] = e;
    // theta E2 = (E2^2 - E4)/12, theta E4 = (E2 E4 - E6)/3, theta E6 = (E2 E6 - E4^2)/2
    if (a > 0) {
      r.add_term({a + 1, b, cc}, c * make_rat(a, 12));
      r.add_term({a - 1, b + 1, cc}, -c * make_rat(a, 12));
    }
    if (b > 0) {
      r.add_term({a + 1, b, cc}, c * make_rat(b, 3));
      r.add_term({a, b - 1, cc + 1}, -c * make_rat(b, 3));
    }
    if (cc > 0) {
      r.add_term({a + 1, b, cc}, c * make_rat(cc, 2));
      r.add_term({a, b + 2, cc - 1}, -c * make_rat(cc, 2));
    }
  }
  return r;
}

ModularPoly sym_serre(const ModularPoly& p) {
  const ModularPoly q = to_basis(p, Basis::E);
  ModularPoly r = sym_theta(q);
  ModularPoly shift = ModularPoly::generator(2, Basis::E) * q * make_rat(-q.weight(), 12);
  if (!shift.is_zero()) r += shift;
  return r;
}

QSeries eval_poly(const ModularPoly& p, long known_through) {
  if (p.is_zero()) return QSeries::zero(known_through);
  std::array<QSeries, 3> gens{eisenstein(2, p.basis(), known_through), eisenstein(4, p.basis(), known_through),
                              eisenstein(6, p.basis(), known_through)};
  std::map<std::pair<int, int>, QSeries> powers;
  auto power = [&](int g, int e) -> const QSeries& {
    auto key = std::make_pair(g, e);
    auto it = powers.find(key);
    if (it == powers.end()) it = powers.emplace(key, pow(gens[static_cast<std::size_t>(g)], e)).first;
    return it->second;
  };
  QSeries sum = QSeries::zero(known_through);
  for (const auto& [e, c] : p.terms()) {
    QSeries term = QSeries::one();
    for (int g = 0; g < 3; ++g) {
      if (e[static_cast<std::size_t>(g)] > 0) term *= power(g, e[static_cast<std::size_t>(g)]);
    }
    sum += term * c;
  }
  return sum.truncated(known_through);
}

int level_one_dimension(int weight) {
  if (weight < 0 || weight % 2 != 0 || weight == 2) return 0;
  return weight % 12 == 2 ? weight / 12 : weight / 12 + 1;
}

ModularPoly to_eisenstein_basis(const QSeries& f, int weight) {
  const std::string not_modular = "not modular of level one at weight " + std::to_string(weight);
  std::vector<Exponent> monos;
  if (weight >= 0 && weight % 2 == 0) {
    for (int c = 0; 6 * c <= weight; ++c) {
      if ((weight - 6 * c) % 4 == 0) monos.push_back({0, (weight - 6 * c) / 4, c});
    }
  }
  const auto dim = static_cast<long>(monos.size());
  if (f.known_through() < dim) {
    throw PrecisionError("weight " + std::to_string(weight) + " needs " + std::to_string(dim) +
                         " known coefficients, series is known only below q^" + std::to_string(f.known_through()));
  }
  if (!f.is_zero() && f.lead() < 0) throw VerificationError(not_modular + ": pole at infinity");

  ModularPoly result(weight, Basis::E);
  if (dim > 0) {
    RatMatrix a(static_cast<std::size_t>(dim), std::vector<Rat>(static_cast<std::size_t>(dim)));
    std::vector<Rat> b(static_cast<std::size_t>(dim));
    for (long col = 0; col < dim; ++col) {
      const QSeries s = eval_poly(ModularPoly::monomial(monos[static_cast<std::size_t>(col)], Rat(1), Basis::E), dim);
      for (long row = 0; row < dim; ++row) a[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = s.coeff(row);
    }
    for (long row = 0; row < dim; ++row) b[static_cast<std::size_t>(row)] = f.coeff(row);
    const auto sol = solve_exact(a, b);
    if (sol.kind != LinearSolution::Kind::unique) throw std::logic_error("level-one leading-coefficient map is singular");
    for (long col = 0; col < dim; ++col) result.add_term(monos[static_cast<std::size_t>(col)], sol.solution[static_cast<std::size_t>(col)]);
  }

  const long check = f.is_exact() ? std::max(f.stored_end(), dim) + 8 : f.known_through();
  if (auto e = first_difference(eval_poly(result, check), f.truncated(check), check)) {
    throw VerificationError(not_modular + " (residual at q^" + std::to_string(*e) + ")");
  }
  return result;
}

ModularPoly eisenstein_poly(int k, Basis basis) {
  if (k % 2 != 0) return ModularPoly(k, basis);
  if (k == 2 || k == 4 || k == 6) return ModularPoly::generator(k, basis);
  if (k < 2) throw ValidationError("no Eisenstein series of weight " + std::to_string(k));
  static std::mutex mu;
  static std::map<int, ModularPoly> memo;  // E-basis
  ModularPoly e_poly(k, Basis::E);
  {
    std::lock_guard lock(mu);
    auto it = memo.find(k);
    if (it != memo.end()) e_poly = it->second;
  }
  if (e_poly.is_zero()) {
    const long dim = level_one_dimension(k);
    e_poly = to_eisenstein_basis(eisenstein(k, Basis::E, dim + 10), k);
    std::lock_guard lock(mu);
    memo.emplace(k, e_poly);
  }
  if (basis == Basis::E) return e_poly;
  // G_k = E_k / factor, then rewrite the generators.
  return to_basis(e_poly * (1 / e_over_g(k)), Basis::G);
}

}  // namespace haupt
