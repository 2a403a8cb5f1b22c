// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "haupt/heisenberg.hpp"
#include "haupt/mlde.hpp"
#include "haupt/serreseq.hpp"

using namespace haupt;

namespace {

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

const std::vector<std::pair<long, long>> kGrid{{1, 1}, {1, 2}, {2, 2}, {1, 3}, {2, 3}, {3, 3}};

std::string cell_name(long n, long m) { return "(n,m)=(" + std::to_string(n) + "," + std::to_string(m) + ")"; }

Int fifteen_pow(long m) {
  Int r = 1;
  for (long i = 0; i < 3 * (1L << m); ++i) r *= 15;
  return r;
}

QSeries seeded_series(std::mt19937_64& rng, long lead, long k) {
  std::uniform_int_distribution<long> num(-50, 50), den(1, 7);
  std::vector<Rat> cs;
  for (long e = lead; e < k; ++e) cs.push_back(make_rat(num(rng), den(rng)));
  cs[0] = 1;
  return QSeries(lead, std::move(cs), k);
}

void identity_suite() {
  const long K = 300;
  const QSeries e2 = eisenstein(2, Basis::E, K), e4 = eisenstein(4, Basis::E, K), e6 = eisenstein(6, Basis::E, K);
  const QSeries s2 = e_star(2, 2, K), s4 = e_star(4, 2, K), s6 = e_star(6, 2, K);
  expect(eq_through(theta(e2), (e2 * e2 - e4) * make_rat(1, 12), K), "theta E2");
  expect(eq_through(theta(e4), (e2 * e4 - e6) * make_rat(1, 3), K), "theta E4");
  expect(eq_through(theta(e6), (e2 * e6 - e4 * e4) * make_rat(1, 2), K), "theta E6");
  expect(eq_through(s4, s2 * s2 * Rat(-10) + e4 * Rat(3), K), "E4* in E2*, E4");
  expect(eq_through(s6, s2 * s2 * s2 * Rat(40) - s2 * e4 * Rat(9), K), "E6* in E2*, E4");
  expect(eq_through(serre_derivative(s2, 2), s2 * s2 * make_rat(1, 3) - e4 * make_rat(1, 6), K), "D E2*");
  expect(eq_through(serre_derivative(s4, 4), s2 * s2 * s2 * make_rat(-8, 3) + s2 * e4 * make_rat(1, 3), K), "D E4*");
  expect(eq_through(e6, s2 * s2 * s2 * Rat(-4) + s2 * e4 * Rat(3), K), "E6 in E2*, E4");
  const QSeries e4q2 = v_p(eisenstein(4, Basis::E, K / 2 + 1), 2), e6q2 = v_p(eisenstein(6, Basis::E, K / 2 + 1), 2);
  expect(eq_through(e4q2, s2 * s2 * make_rat(5, 4) - e4 * make_rat(1, 4), K), "E4(q^2)");
  expect(eq_through(e6q2, s2 * e4 * make_rat(3, 8) - s2 * s2 * s2 * make_rat(11, 8), K), "E6(q^2)");
}

void up_laws() {
  const long K = 300;
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 5; ++it) {
    const QSeries f = seeded_series(rng, it - 2, 2 * K), g = seeded_series(rng, it % 3, K + 3);
    const QSeries lhs = u_p(f * v_p(g, 2), 2), rhs = g * u_p(f, 2);
    expect(std::min(lhs.known_through(), rhs.known_through()) >= K, "U_2(f g(q^2)) precision");
    expect(eq_through(lhs, rhs, K), "U_2(f g(q^2)) = g U_2(f)");
    const QSeries a = u_p(theta(f), 2), b = theta(u_p(f, 2)) * Rat(2);
    expect(eq_through(a, b, K), "U_2(theta f) = 2 theta U_2(f)");
  }
  // Modular inputs too.
  const QSeries d = delta(2 * K), e4 = eisenstein(4, Basis::E, K);
  expect(eq_through(u_p(d * v_p(e4, 2), 2), e4 * u_p(d, 2), K), "U_2(Delta E4(q^2)) = E4 U_2(Delta)");
  expect(eq_through(u_p(theta(d), 2), theta(u_p(d, 2)) * Rat(2), K), "U_2(theta Delta)");
  for (int k : {2, 4, 6}) {
    const QSeries s = e_star(k, 2, 2 * K);
    expect(eq_through(u_p(s, 2), s, K), "U_2 fixes E_k* for k=" + std::to_string(k));
  }
}

void three_way() {
  const long K = 60;
  for (auto [n, m] : kGrid) {
    const QSeries t = serre_trace({2, n, m}, K);
    expect(eq_through(t, serre_closed(n, m, K), K), "trace vs closed at " + cell_name(n, m));
    expect(eq_through(t, eval_poly(serre_poly(n, m), K), K), "trace vs polynomial at " + cell_name(n, m));
    expect(t == serre_trace({2, n, m}, K, TraceFormula::delta), "two trace formulas at " + cell_name(n, m));
  }
}

void lead_coefficient() {
  for (auto [n, m] : kGrid) {
    const QSeries t = serre_trace({2, n, m}, 60);
    expect(t.lead() == n, "lead exponent at " + cell_name(n, m));
    expect(t.coeff(n) == Rat(fifteen_pow(m)), "coefficient of q^n at " + cell_name(n, m));
  }
}

void mlde_verification() {
  for (long n = 0; n <= 3; ++n) {
    const auto r = verify_limit_mlde(n, 60);
    expect(r.identity.ok, "limit equation, n=" + std::to_string(n));
    expect(r.weight_shift.ok, "limit weight shift, n=" + std::to_string(n));
  }
  for (auto [n, m] : kGrid) {
    const auto r = verify_serre_mlde(n, m, 60);
    expect(r.sum.ok, "equation on Delta^n lambda at " + cell_name(n, m));
    expect(r.t1.ok, "first summand at " + cell_name(n, m));
    expect(r.t2.ok, "second summand at " + cell_name(n, m));
  }
}

void mlde_round_trip() {
  const long K = 60;
  const QSeries f = (delta(K) * serre_trace({2, 1, 1}, K)).truncated(K);
  const auto r = mlde_search(f, 36, 3, CoeffSpace::M);
  expect(r.found.has_value(), "no equation found");
  expect(r.solution_dim == 0, "solution not unique");
  expect(r.reverified, "found equation does not annihilate f");
  const ModularPoly E4 = ModularPoly::generator(4, Basis::E), E6 = ModularPoly::generator(6, Basis::E);
  expect(r.found->coeffs[0] == E6 * make_rat(1, 2), "g_0");
  expect(r.found->coeffs[1] == E4 * make_rat(-19, 18), "g_1");
  expect(r.found->coeffs[2].is_zero(), "g_2");
  expect(indicial_roots(*r.found).roots == std::vector<Rat>{Rat(2), make_rat(7, 2), Rat(4)}, "indicial roots");
}

void character_isomorphism() {
  const ModularPoly G4 = ModularPoly::generator(4, Basis::G), G6 = ModularPoly::generator(6, Basis::G);
  for (long r = 0; r <= 6; ++r)
    for (long s = 0; r + s <= 6; ++s)
      expect(character_of(alpha_beta_square(r, s)) == pow(G4, r) * pow(G6, s),
             "F(alpha_" + std::to_string(r) + " beta_" + std::to_string(s) + ")");
  for (long r = 1; r <= 5; ++r) {
    const auto ps = pair_partitions(std::vector<int>(static_cast<std::size_t>(2 * r), 2));
    expect(Int(static_cast<long>(ps.size())) == double_factorial(2 * r - 1), "matching count at r=" + std::to_string(r));
  }
}

void valuation_checks() {
  for (long r = 2; r <= 5; ++r)
    for (long s = 2; s <= 5; ++s)
      expect(state_val2(alpha_beta(r, s, Kernel::reference)) == Val2(-4 * r - 3 * s),
             "val2(alpha_" + std::to_string(r) + " beta_" + std::to_string(s) + ")");
  for (auto [n, m] : kGrid) {
    for (const auto& row : coeff_val_bounds(n, m)) {
      expect(row.val >= Val2(row.bound), "c bound at " + cell_name(n, m) + " i=" + std::to_string(row.i));
      expect(row.c == c_coeff(n, m, row.i), "c value at " + cell_name(n, m));
    }
  }
}

void overconvergence() {
  const auto cells = overconvergence_certificate(2, 3);
  expect(cells.size() == 5, "grid size");
  for (const auto& c : cells) {
    expect(c.ok(), "certificate at " + cell_name(c.n, c.m));
    expect(state_val2(v_state(c.n, c.m)) >= Val2(-6 * c.n), "val2(v) at " + cell_name(c.n, c.m));
    const ModularPoly ch = character_of(v_square(c.n, c.m));
    expect(ch == serre_poly(c.n, c.m), "F(v) at " + cell_name(c.n, c.m));
    expect(eq_through(eval_poly(ch, 60), serre_trace({2, c.n, c.m}, 60), 60), "F(v) as a series at " + cell_name(c.n, c.m));
  }
}

void convergence() {
  for (long n = 1; n <= 2; ++n) {
    const auto lam = convergence_report(n, 3, 60);
    for (std::size_t i = 1; i < lam.size(); ++i)
      expect(lam[i - 1].to_limit.value < lam[i].to_limit.value, "lambda_{n,m} -> lambda^n, n=" + std::to_string(n));
    const auto st = cauchy_report(n, 3);
    expect(!st.empty(), "no Cauchy rows");
    for (std::size_t i = 1; i < st.size(); ++i)
      expect(st[i - 1].step < st[i].step, "v_{n,m} Cauchy steps, n=" + std::to_string(n));
    for (const auto& row : st) {
      expect(row.const_coeff_ok && row.quad_coeff_ok, "alpha coefficients at m=" + std::to_string(row.m));
      expect(row.rescale_ok, "rescaling coefficient at m=" + std::to_string(row.m));
    }
  }
}

void odd_prime() {
  const long K = 80;
  const QSeries f = (delta(K) * serre_trace({3, 1, 1}, K)).truncated(K);
  for (int t = 1; t <= 3; ++t) {
    const auto r = mlde_search(f, 48, t, CoeffSpace::Mprime);
    expect(!r.found, "equation found at t=" + std::to_string(t));
    expect(r.rank < r.augmented_rank, "no rank certificate at t=" + std::to_string(t));
  }
}

void hermite() {
  for (long r = 0; r <= 8; ++r) expect(alpha_closed_form(r) == alpha_state(r), "r=" + std::to_string(r));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> criteria{
      {"identity suite through K=300", identity_suite},
      {"U_p laws through K=300", up_laws},
      {"three-way agreement of Serre's sequence, K=60", three_way},
      {"coefficient of q^n is 15^(3 2^m)", lead_coefficient},
      {"limit and third-order MLDEs, both summands, K=60", mlde_verification},
      {"MLDE search recovers the equation; indicial roots 2, 7/2, 4", mlde_round_trip},
      {"character of alpha_r beta_s is G4^r G6^s; matching counts", character_isomorphism},
      {"val2(alpha_r beta_s) = -4r-3s; val2(c_{n,m,i}) bounds", valuation_checks},
      {"val2(v_{n,m}) >= -6n with F(v_{n,m}) = lambda_{n,m}, n<=2, m<=3", overconvergence},
      {"lambda_{n,m} and v_{n,m} valuations strictly increase, n<=2, m<=3", convergence},
      {"p=3: no monic MLDE of degree <= 3 over M', K=80", odd_prime},
      {"Hermite closed form for alpha_r, r<=8", hermite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      criteria[i].second();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2fs", secs);
    std::cout << (ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << buf << ")";
    if (!ok) std::cout << ": " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
