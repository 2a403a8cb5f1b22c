#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "haupt/modforms.hpp"

using namespace haupt;

namespace {

const ModularPoly E2 = ModularPoly::generator(2, Basis::E);
const ModularPoly E4 = ModularPoly::generator(4, Basis::E);
const ModularPoly E6 = ModularPoly::generator(6, Basis::E);

// sigma_{k-1} by trial division.
Int sigma(long n, int k1) {
  Int s = 0, t;
  for (long d = 1; d <= n; ++d) {
    if (n % d == 0) {
      mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(k1));
      s += t;
    }
  }
  return s;
}

// prod (1 + q^n)^24 times q, by direct expansion of each factor.
std::vector<Int> lambda_oracle(long k) {
  std::vector<Int> c(static_cast<std::size_t>(k), 0);
  c[0] = 1;  // coefficient of q^1 stored at 0
  for (long n = 1; n < k; ++n) {
    for (int rep = 0; rep < 24; ++rep) {
      for (long e = k - 1; e >= n; --e) c[static_cast<std::size_t>(e)] += c[static_cast<std::size_t>(e - n)];
    }
  }
  return c;
}

QSeries e2s(long k) { return e_star(2, 2, k); }

ModularPoly random_poly(std::mt19937_64& rng, int weight) {
  std::uniform_int_distribution<long> num(-20, 20), den(1, 5);
  ModularPoly p(weight, Basis::E);
  for (int a = 0; 2 * a <= weight; ++a)
    for (int b = 0; 2 * a + 4 * b <= weight; ++b)
      if ((weight - 2 * a - 4 * b) % 6 == 0) p.add_term({a, b, (weight - 2 * a - 4 * b) / 6}, make_rat(num(rng), den(rng)));
  return p;
}

}  // namespace

TEST_CASE("Eisenstein expansions against sigma sums") {
  const QSeries e4 = eisenstein(4, Basis::E, 30), e2 = eisenstein(2, Basis::E, 30), g4 = eisenstein(4, Basis::G, 30);
  CHECK(e4.coeff(0) == 1);
  CHECK(e4.coeff(1) == 240);
  CHECK(e4.coeff(2) == 2160);
  CHECK(e2.coeff(1) == -24);
  CHECK(e2.coeff(2) == -72);
  CHECK(e2.coeff(3) == -96);
  CHECK(g4.coeff(0) == make_rat(1, 240));
  CHECK(g4.coeff(2) == 9);
  for (int k : {2, 4, 6, 8, 10, 12}) {
    const QSeries e = eisenstein(k, Basis::E, 30);
    const Rat factor = Rat(-2 * k) / bernoulli(k);
    for (long n = 1; n < 30; ++n) CHECK(e.coeff(n) == factor * Rat(sigma(n, k - 1)));
  }
  CHECK_THROWS_AS(eisenstein(5, Basis::E, 10), ValidationError);
}

TEST_CASE("memo returns consistent truncations") {
  const QSeries big = eisenstein(6, Basis::E, 80);
  const QSeries small = eisenstein(6, Basis::E, 20);
  CHECK(small == big.truncated(20));
}

TEST_CASE("delta") {
  const QSeries d = delta(200);
  CHECK(d.coeff(1) == 1);
  CHECK(d.coeff(2) == -24);
  CHECK(d.coeff(3) == 252);
  CHECK(d.coeff(4) == -1472);
  const QSeries quotient = (pow(eisenstein(4, Basis::E, 200), 3) - pow(eisenstein(6, Basis::E, 200), 2)) * make_rat(1, 1728);
  CHECK(eq_through(d, quotient, 200));
  for (long e = 0; e < 200; ++e) CHECK(is_integer(d.coeff(e)));
  const ModularPoly g4 = ModularPoly::generator(4, Basis::G), g6 = ModularPoly::generator(6, Basis::G);
  CHECK(eq_through(eval_poly(Rat(8000) * pow(g4, 3) - Rat(147) * pow(g6, 2), 120), d, 120));
}

TEST_CASE("eta quotients") {
  const QSeries se4 = eta_quotient({{2, 16}, {1, -8}}, 20);
  CHECK(se4.coeff(1) == 1);
  CHECK(se4.coeff(2) == 8);
  CHECK(se4.coeff(3) == 28);
  CHECK(se4.coeff(4) == 64);
  CHECK(eq_through(se4, script_e4(20), 20));

  const auto oracle = lambda_oracle(60);
  const QSeries l = eta_quotient({{2, 24}, {1, -24}}, 61);
  for (long e = 1; e < 61; ++e) CHECK(l.coeff(e) == Rat(oracle[static_cast<std::size_t>(e - 1)]));
  CHECK(l.coeff(4) == 2624);

  try {
    eta_quotient({{1, 1}}, 10);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("1/24") != std::string::npos);
  }
}

TEST_CASE("lambda hauptmodul") {
  const QSeries l = lambda_hauptmodul(2, 60);
  CHECK(l.coeff(2) == 24);
  CHECK(l.coeff(3) == 300);
  const QSeries via_delta = v_p(delta(31), 2) * invert(delta(62));
  CHECK(eq_through(l, via_delta, 60));
  const QSeries l3 = lambda_hauptmodul(3, 10);
  CHECK(l3.lead() == 1);
  CHECK(l3.coeff(2) == 12);
  CHECK_THROWS_AS(lambda_hauptmodul(11, 10), ValidationError);
}

TEST_CASE("E_k star") {
  const QSeries s = e2s(10);
  CHECK(s.coeff(0) == -1);
  CHECK(s.coeff(1) == -24);
  CHECK(s.coeff(2) == -24);
  CHECK(s.coeff(3) == -96);
  CHECK(e_star(4, 2, 5).coeff(0) == -7);
}

TEST_CASE("identities through K = 300") {
  const long K = 300;
  const QSeries e2 = eisenstein(2, Basis::E, K), e4 = eisenstein(4, Basis::E, K), e6 = eisenstein(6, Basis::E, K);
  const QSeries s2 = e2s(K), s4 = e_star(4, 2, K), s6 = e_star(6, 2, K);
  CHECK(eq_through(theta(e2), (e2 * e2 - e4) * make_rat(1, 12), K));
  CHECK(eq_through(theta(e4), (e2 * e4 - e6) * make_rat(1, 3), K));
  CHECK(eq_through(theta(e6), (e2 * e6 - e4 * e4) * make_rat(1, 2), K));
  CHECK(eq_through(s4, s2 * s2 * Rat(-10) + e4 * Rat(3), K));
  CHECK(eq_through(s6, s2 * s2 * s2 * Rat(40) - s2 * e4 * Rat(9), K));
  CHECK(eq_through(serre_derivative(s2, 2), s2 * s2 * make_rat(1, 3) - e4 * make_rat(1, 6), K));
  CHECK(eq_through(serre_derivative(s4, 4), s2 * s2 * s2 * make_rat(-8, 3) + s2 * e4 * make_rat(1, 3), K));
  CHECK(eq_through(e6, s2 * s2 * s2 * Rat(-4) + s2 * e4 * Rat(3), K));
  const QSeries e4q2 = v_p(eisenstein(4, Basis::E, K / 2 + 1), 2), e6q2 = v_p(eisenstein(6, Basis::E, K / 2 + 1), 2);
  CHECK(eq_through(e4q2, s2 * s2 * make_rat(5, 4) - e4 * make_rat(1, 4), K));
  CHECK(eq_through(e6q2, s2 * e4 * make_rat(3, 8) - s2 * s2 * s2 * make_rat(11, 8), K));
}

TEST_CASE("serre derivative examples") {
  CHECK(serre_derivative(delta(60), 12).is_zero());
  CHECK(eq_through(serre_derivative(eisenstein(4, Basis::E, 60), 4), eisenstein(6, Basis::E, 60) * make_rat(-1, 3), 60));
  for (long n = 1; n <= 3; ++n) {
    const QSeries ln = pow(lambda_hauptmodul(2, 60), n);
    const QSeries lhs = serre_derivative(ln, 0);
    CHECK(eq_through(lhs, ln * e2s(60) * Rat(-n), lhs.known_through()));
  }
  CHECK_THROWS_AS(serre_derivative(QSeries::one(), 0), ValidationError);
  CHECK(serre_derivative(QSeries::one(), 0, 10).is_zero());
}

TEST_CASE("Leibniz rule for the Serre derivative") {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 10; ++it) {
    const int w1 = 2 * static_cast<int>(rng() % 5), w2 = 2 * static_cast<int>(rng() % 5);
    const QSeries f = eval_poly(random_poly(rng, w1), 40), g = eval_poly(random_poly(rng, w2), 40);
    const QSeries lhs = serre_derivative(f * g, w1 + w2);
    const QSeries rhs = serre_derivative(f, w1) * g + f * serre_derivative(g, w2);
    CHECK(eq_through(lhs, rhs, 40));
  }
}

TEST_CASE("symbolic derivatives") {
  CHECK(sym_theta(E4) == (E2 * E4 - E6) * make_rat(1, 3));
  const ModularPoly d = (pow(E4, 3) - pow(E6, 2)) * make_rat(1, 1728);
  CHECK(sym_serre(d).is_zero());
  CHECK(sym_theta(ModularPoly::constant(Rat(1))).is_zero());
  std::mt19937_64 rng(43);
  for (int it = 0; it < 10; ++it) {
    const ModularPoly p = random_poly(rng, 2 * static_cast<int>(1 + rng() % 6));
    CHECK(eq_through(eval_poly(sym_theta(p), 50), theta(eval_poly(p, 50)), 50));
    CHECK(eq_through(eval_poly(sym_serre(p), 50), serre_derivative(eval_poly(p, 50), p.weight()), 50));
  }
}

TEST_CASE("eval_poly") {
  CHECK(eval_poly(E4, 40) == eisenstein(4, Basis::E, 40));
  CHECK(eval_poly(ModularPoly(8, Basis::E), 10).is_zero());
}

TEST_CASE("to_eisenstein_basis") {
  CHECK(to_eisenstein_basis(delta(40), 12) == (pow(E4, 3) - pow(E6, 2)) * make_rat(1, 1728));
  CHECK(to_eisenstein_basis(eisenstein(8, Basis::E, 40), 8) == pow(E4, 2));
  CHECK_THROWS_AS(to_eisenstein_basis(e2s(40), 2), VerificationError);
  CHECK_THROWS_AS(to_eisenstein_basis(lambda_hauptmodul(2, 40), 12), VerificationError);
  CHECK_THROWS_AS(to_eisenstein_basis(delta(1), 12), PrecisionError);
  CHECK(level_one_dimension(12) == 2);
  CHECK(level_one_dimension(14) == 1);
  CHECK(level_one_dimension(2) == 0);
}

TEST_CASE("basis conversion and Eisenstein polynomials") {
  CHECK(to_basis(E4, Basis::G) == ModularPoly::generator(4, Basis::G) * Rat(240));
  CHECK(to_basis(E6, Basis::G) == ModularPoly::generator(6, Basis::G) * Rat(-504));
  CHECK(to_basis(E2, Basis::G) == ModularPoly::generator(2, Basis::G) * Rat(-24));
  std::mt19937_64 rng(47);
  const ModularPoly p = random_poly(rng, 10);
  CHECK(to_basis(to_basis(p, Basis::G), Basis::E) == p);
  for (int k = 8; k <= 20; k += 2) {
    CHECK(eq_through(eval_poly(eisenstein_poly(k, Basis::G), 40), eisenstein(k, Basis::G, 40), 40));
  }
  CHECK(eisenstein_poly(5, Basis::G).is_zero());
}

TEST_CASE("modular polynomial invariants and JSON") {
  ModularPoly p(8, Basis::E);
  CHECK_THROWS_AS(p.add_term({0, 1, 0}, Rat(1)), ValidationError);
  CHECK_THROWS_AS(E4 + E6, ValidationError);
  CHECK_THROWS_AS(E4 + ModularPoly::generator(4, Basis::G), ValidationError);
  CHECK((ModularPoly(4, Basis::E) + E6) == E6);
  const ModularPoly q = (pow(E4, 3) - pow(E6, 2)) * make_rat(1, 1728) + E2 * E4 * E6;
  CHECK(modular_poly_from_json(to_json(q)) == q);
  CHECK(to_json(E4)["terms"][0]["coeff"] == "1");
  CHECK_THROWS_AS(modular_poly_from_json(nlohmann::json::parse(R"({"weight":4,"basis":"X","terms":[]})")), ValidationError);
  CHECK_FALSE(q.is_modular());
}

TEST_CASE("expansion cache is content addressed and optional") {
  const auto dir = std::filesystem::temp_directory_path() / ("haupt_cache_test_" + std::to_string(std::random_device{}()));
  set_cache_directory(dir);
  const QSeries s = delta(25);
  detail::cache_store("probe", s);
  auto back = detail::cache_load("probe");
  REQUIRE(back);
  CHECK(*back == s);
  CHECK_FALSE(detail::cache_load("other"));
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ofstream(entry.path()) << "{not json";
  }
  CHECK_FALSE(detail::cache_load("probe"));
  // A corrupted entry is recomputed, not trusted.
  const QSeries e = eisenstein(14, Basis::E, 33);
  CHECK(eisenstein(14, Basis::E, 33) == e);
  set_cache_directory(std::nullopt);
  std::filesystem::remove_all(dir);
}
