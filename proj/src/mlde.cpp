#include "haupt/mlde.hpp"

#include <algorithm>

#include "haupt/serreseq.hpp"

namespace haupt {

void validate(const Mlde& L) {
  if (L.degree < 1) throw ValidationError("MLDE degree must be at least 1");
  if (static_cast<int>(L.coeffs.size()) != L.degree) {
    throw ValidationError("MLDE of degree " + std::to_string(L.degree) + " needs " + std::to_string(L.degree) +
                          " coefficients, got " + std::to_string(L.coeffs.size()));
  }
  for (int i = 0; i < L.degree; ++i) {
    const auto& g = L.coeffs[static_cast<std::size_t>(i)];
    if (!g.is_zero() && g.weight() != 2 * (L.degree - i)) {
      throw ValidationError("coefficient g_" + std::to_string(i) + " has weight " + std::to_string(g.weight()) +
                            ", expected " + std::to_string(2 * (L.degree - i)));
    }
  }
}

nlohmann::json to_json(const Mlde& L) {
  auto cs = nlohmann::json::array();
  for (const auto& g : L.coeffs) cs.push_back(to_json(g));
  return {{"degree", L.degree}, {"base_weight", L.base_weight}, {"coeffs", cs}, {"provenance", L.provenance}};
}

Mlde mlde_from_json(const nlohmann::json& j) {
  try {
    Mlde L;
    L.degree = j.at("degree").get<int>();
    L.base_weight = j.at("base_weight").get<int>();
    for (const auto& c : j.at("coeffs")) L.coeffs.push_back(modular_poly_from_json(c));
    if (j.contains("provenance")) L.provenance = j["provenance"].get<std::string>();
    validate(L);
    return L;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed MLDE JSON: ") + e.what());
  }
}

namespace {

// D^0 f, ..., D^t f on the ladder starting at weight w.
std::vector<QSeries> derivative_ladder(const QSeries& f, long weight, int t) {
  std::vector<QSeries> out{f};
  for (int i = 0; i < t; ++i) out.push_back(serre_derivative(out.back(), weight + 2 * i));
  return out;
}

long coeff_precision(const QSeries& f) {
  return std::max<long>(f.known_through() - (f.is_zero() ? 0 : f.lead()), 1);
}

IdentityCheck check_zero(const QSeries& s, long k) {
  IdentityCheck c;
  c.first_failure = first_difference(s, QSeries::zero(), k);
  c.ok = !c.first_failure;
  return c;
}

IdentityCheck check_equal(const QSeries& a, const QSeries& b, long k) {
  IdentityCheck c;
  c.first_failure = first_difference(a, b, k);
  c.ok = !c.first_failure;
  return c;
}

}  // namespace

QSeries mlde_apply(const Mlde& L, const QSeries& f) {
  validate(L);
  if (f.is_zero()) return f;
  if (f.is_exact()) throw ValidationError("apply an MLDE to a truncated series");
  const auto ladder = derivative_ladder(f, L.base_weight, L.degree);
  const long k = coeff_precision(f);
  QSeries r = ladder[static_cast<std::size_t>(L.degree)];
  for (int i = 0; i < L.degree; ++i) {
    const auto& g = L.coeffs[static_cast<std::size_t>(i)];
    if (!g.is_zero()) r += eval_poly(g, k) * ladder[static_cast<std::size_t>(i)];
  }
  return r;
}

Mlde serre_mlde(long n, long m) {
  validate(SerreParams{2, n, m});
  const Rat t(serre_t(n, m));
  const Rat a = Rat(3) / 4 * t * t + t / 4 + Rat(1, 18);
  const Rat b = (t * t * t + t * t) / 4;
  Mlde L;
  L.degree = 3;
  L.base_weight = static_cast<int>(12 * (1L << m) + 12 * n);
  L.coeffs = {ModularPoly::generator(6, Basis::E) * b, ModularPoly::generator(4, Basis::E) * Rat(-a),
              ModularPoly(2, Basis::E)};
  return L;
}

LimitMldeReport verify_limit_mlde(long n, long known_through) {
  if (n < 0) throw ValidationError("n must be non-negative");
  if (known_through < 1) throw PrecisionError("K must be at least 1");
  const long k = known_through;
  LimitMldeReport rep;
  rep.n = n;
  rep.known_through = k;
  const QSeries d = delta(k), lam = lambda_hauptmodul(2, k);
  const QSeries dn = pow(d, n, k).truncated(k), ln = pow(lam, n, k).truncated(k);
  const QSeries f = (dn * ln).truncated(k);
  const auto ladder = derivative_ladder(f, 12 * n, 3);
  const QSeries s2 = e_star(2, 2, k), e4 = eisenstein(4, Basis::E, k);
  const Rat nn(n);
  const QSeries rhs = (s2 * s2 * s2 * (nn * nn - nn * nn * nn) - s2 * e4 * (nn * nn / 2 + nn / 18)) * f;
  rep.identity = check_equal(ladder[3], rhs, k);

  const auto shifted = derivative_ladder(ln, 0, 3);
  rep.weight_shift.ok = true;
  for (int i = 1; i <= 3 && rep.weight_shift.ok; ++i) {
    rep.weight_shift = check_equal(ladder[static_cast<std::size_t>(i)], dn * shifted[static_cast<std::size_t>(i)], k);
  }
  return rep;
}

SerreMldeReport verify_serre_mlde(long n, long m, long known_through) {
  SerreMldeReport rep;
  rep.n = n;
  rep.m = m;
  rep.known_through = known_through;
  rep.equation = serre_mlde(n, m);
  const long k = known_through;
  const QSeries dn = pow(delta(k), n);
  const QSeries lam = serre_trace({2, n, m}, k);
  rep.sum = check_zero(mlde_apply(rep.equation, (dn * lam).truncated(k)), k);
  const TraceParts parts = serre_trace_parts(n, m, k);
  rep.t1 = check_zero(mlde_apply(rep.equation, (dn * parts.t1).truncated(k)), k);
  rep.t2 = check_zero(mlde_apply(rep.equation, (dn * parts.t2).truncated(k)), k);
  return rep;
}

bool limit_consistency(long n) {
  if (n < 1) throw ValidationError("n must be at least 1");
  // Polynomials in E2*, E4 stored with E2* in the weight-2 slot.
  const ModularPoly s = ModularPoly::generator(2, Basis::E), e4 = ModularPoly::generator(4, Basis::E);
  const Rat t(-n), nn(n);
  const Rat a = Rat(3) / 4 * t * t + t / 4 + Rat(1, 18);
  const Rat b = (t * t * t + t * t) / 4;
  const ModularPoly e6 = pow(s, 3) * Rat(-4) + s * e4 * Rat(3);
  // a E4 (D F) - b E6 F with D F = -n E2* F, divided by F.
  const ModularPoly got = e4 * s * (a * -nn) - e6 * b;
  const ModularPoly want = pow(s, 3) * (nn * nn - nn * nn * nn) - s * e4 * (nn * nn / 2 + nn / 18);
  return got == want;
}

const char* coeff_space_name(CoeffSpace s) { return s == CoeffSpace::M ? "M" : "Mprime"; }

std::vector<Exponent> space_basis(CoeffSpace s, int weight) {
  std::vector<Exponent> out;
  if (weight < 0 || weight % 2 != 0) return out;
  for (int a = 0; 2 * a <= weight; ++a) {
    if (s == CoeffSpace::M && a > 0) break;
    for (int c = 0; 2 * a + 6 * c <= weight; ++c) {
      const int rest = weight - 2 * a - 6 * c;
      if (rest % 4 == 0) out.push_back({a, rest / 4, c});
    }
  }
  return out;
}

SearchReport mlde_search(const QSeries& f, int weight, int degree, CoeffSpace space, std::optional<long> known_through) {
  if (degree < 1) throw ValidationError("degree must be at least 1");
  if (f.is_zero()) throw ValidationError("cannot search for an equation of the zero series");
  QSeries g = f;
  if (known_through) {
    if (*known_through > f.known_through()) {
      throw PrecisionError("series is known only below q^" + std::to_string(f.known_through()));
    }
    g = f.truncated(*known_through);
  }
  if (g.is_exact()) throw ValidationError("search needs a truncated series");
  const long k = g.known_through();
  const long lo = g.lead();

  SearchReport rep;
  rep.space = space;
  rep.degree = degree;
  rep.base_weight = weight;
  rep.equations = k - lo;

  std::vector<std::vector<Exponent>> bases;
  for (int i = 0; i < degree; ++i) {
    bases.push_back(space_basis(space, 2 * (degree - i)));
    rep.unknowns += static_cast<long>(bases.back().size());
  }
  if (rep.equations < rep.unknowns + 10) {
    throw PrecisionError("search needs at least " + std::to_string(rep.unknowns + 10) + " equations, have " +
                         std::to_string(rep.equations) + "; raise the precision");
  }

  const auto ladder = derivative_ladder(g, weight, degree);
  const long cp = coeff_precision(g);
  std::vector<QSeries> columns;
  for (int i = 0; i < degree; ++i) {
    for (const auto& e : bases[static_cast<std::size_t>(i)]) {
      columns.push_back(eval_poly(ModularPoly::monomial(e, Rat(1), Basis::E), cp) * ladder[static_cast<std::size_t>(i)]);
    }
  }
  const auto rows = static_cast<std::size_t>(rep.equations);
  RatMatrix a(rows, std::vector<Rat>(columns.size()));
  std::vector<Rat> b(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const long e = lo + static_cast<long>(r);
    for (std::size_t c = 0; c < columns.size(); ++c) a[r][c] = columns[c].coeff(e);
    b[r] = -ladder[static_cast<std::size_t>(degree)].coeff(e);
  }
  const LinearSolution sol = solve_exact(a, b);
  rep.rank = sol.rank;
  {
    RatMatrix aug = a;
    for (std::size_t r = 0; r < rows; ++r) aug[r].push_back(b[r]);
    rep.augmented_rank = solve_exact(aug, std::vector<Rat>(rows)).rank;

    // Non-monic probe: the leading coefficient ranges over the lowest
    // positive weight of the space, every g_i shifts up by that weight.
    rep.nonmonic_lead_weight = space == CoeffSpace::M ? 4 : 2;
    std::vector<QSeries> cols;
    for (int i = 0; i <= degree; ++i) {
      for (const auto& e : space_basis(space, rep.nonmonic_lead_weight + 2 * (degree - i))) {
        cols.push_back(eval_poly(ModularPoly::monomial(e, Rat(1), Basis::E), cp) * ladder[static_cast<std::size_t>(i)]);
      }
    }
    rep.nonmonic_unknowns = static_cast<long>(cols.size());
    if (rep.equations >= rep.nonmonic_unknowns) {
      RatMatrix h(rows, std::vector<Rat>(cols.size()));
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) h[r][c] = cols[c].coeff(lo + static_cast<long>(r));
      rep.nonmonic_kernel_dim = cols.size() - solve_exact(h, std::vector<Rat>(rows)).rank;
    } else {
      rep.nonmonic_kernel_dim = cols.size();  // underdetermined; not informative
    }
  }
  if (sol.kind == LinearSolution::Kind::inconsistent) return rep;

  rep.solution_dim = sol.kernel.size();
  Mlde L;
  L.degree = degree;
  L.base_weight = weight;
  L.provenance = "searched";
  std::size_t col = 0;
  for (int i = 0; i < degree; ++i) {
    ModularPoly gi(2 * (degree - i), Basis::E);
    for (const auto& e : bases[static_cast<std::size_t>(i)]) gi.add_term(e, sol.solution[col++]);
    L.coeffs.push_back(std::move(gi));
  }
  const QSeries residual = mlde_apply(L, g);
  rep.reverified = !first_difference(residual, QSeries::zero(), residual.known_through());
  if (!rep.reverified) throw VerificationError("searched MLDE failed re-verification");
  rep.found = std::move(L);
  return rep;
}

nlohmann::json to_json(const SearchReport& r) {
  nlohmann::json j = {{"space", coeff_space_name(r.space)},
                      {"degree", r.degree},
                      {"base_weight", r.base_weight},
                      {"equations", r.equations},
                      {"unknowns", r.unknowns},
                      {"rank", r.rank},
                      {"augmented_rank", r.augmented_rank},
                      {"nonmonic_probe",
                       {{"lead_weight", r.nonmonic_lead_weight},
                        {"unknowns", r.nonmonic_unknowns},
                        {"kernel_dim", r.nonmonic_kernel_dim}}}};
  if (r.found) {
    j["result"] = "found";
    j["mlde"] = to_json(*r.found);
    j["solution_dim"] = r.solution_dim;
    j["reverified"] = r.reverified;
  } else {
    j["result"] = "inconsistent";
    j["certificate"] = "rank " + std::to_string(r.rank) + " < augmented rank " + std::to_string(r.augmented_rank);
  }
  return j;
}

// ---------------------------------------------------------------------------

namespace {

// Horner evaluation, constant term first.
Rat eval_at(const std::vector<Rat>& poly, const Rat& x) {
  Rat r = 0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) r = r * x + *it;
  return r;
}

// poly / (x - root), exact division assumed.
std::vector<Rat> deflate(const std::vector<Rat>& poly, const Rat& root) {
  const std::size_t d = poly.size() - 1;
  std::vector<Rat> q(d);
  Rat carry = 0;
  for (std::size_t i = d; i-- > 0;) {
    carry = poly[i + 1] + carry * root;
    q[i] = carry;
  }
  return q;
}

std::vector<Int> divisors(Int x) {
  x = abs(x);
  std::vector<Int> small, large;
  for (Int d = 1; d * d <= x; ++d) {
    if (x % d == 0) {
      small.push_back(d);
      if (d * d != x) large.push_back(x / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

std::vector<Rat> poly_mul_linear(const std::vector<Rat>& p, const Rat& root) {
  std::vector<Rat> r(p.size() + 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i + 1] += p[i];
    r[i] -= p[i] * root;
  }
  return r;
}

}  // namespace

std::vector<Rat> rational_roots(const std::vector<Rat>& input) {
  std::vector<Rat> poly = input;
  while (!poly.empty() && poly.back() == 0) poly.pop_back();
  if (poly.size() <= 1) return {};
  std::vector<Rat> roots;
  while (poly.size() > 1 && poly.front() == 0) {
    roots.emplace_back(0);
    poly.erase(poly.begin());
  }
  if (poly.size() > 1) {
    Int l = 1;
    for (const auto& c : poly) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    std::vector<Int> ints;
    for (const auto& c : poly) ints.push_back(Rat(c * Rat(l)).get_num());
    const auto num = divisors(ints.front()), den = divisors(ints.back());
    std::vector<Rat> candidates;
    for (const auto& p : num)
      for (const auto& q : den) {
        candidates.push_back(make_rat(p, q));
        candidates.push_back(-make_rat(p, q));
      }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const auto& r : candidates) {
      while (poly.size() > 1 && eval_at(poly, r) == 0) {
        roots.push_back(r);
        poly = deflate(poly, r);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

IndicialData indicial_roots(const Mlde& L) {
  validate(L);
  IndicialData out;
  // prod_{l < i} (r - (w + 2l)/12), built up incrementally.
  std::vector<Rat> ladder{Rat(1)};
  std::vector<Rat> poly(static_cast<std::size_t>(L.degree) + 1);
  for (int i = 0; i <= L.degree; ++i) {
    Rat weight = 1;  // leading coefficient for i = degree
    if (i < L.degree) {
      weight = 0;  // E2(0) = E4(0) = E6(0) = 1
      const ModularPoly g = to_basis(L.coeffs[static_cast<std::size_t>(i)], Basis::E);
      for (const auto& [e, c] : g.terms()) weight += c;
    }
    for (std::size_t d = 0; d < ladder.size(); ++d) poly[d] += weight * ladder[d];
    ladder = poly_mul_linear(ladder, make_rat(L.base_weight + 2 * i, 12));
  }
  out.polynomial = poly;
  out.roots = rational_roots(poly);
  return out;
}

}  // namespace haupt
