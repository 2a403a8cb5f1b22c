#include "doctest.h"
#include "haupt/serreseq.hpp"

using namespace haupt;

namespace {

Int pp(long a, long b, long c, long d = 0) {
  Int r = 1;
  for (long i = 0; i < a; ++i) r *= 2;
  for (long i = 0; i < b; ++i) r *= 3;
  for (long i = 0; i < c; ++i) r *= 5;
  for (long i = 0; i < d; ++i) r *= 7;
  return r;
}

Int fifteen_pow(long m) {
  Int r = 1;
  for (long i = 0; i < 3 * (1L << m); ++i) r *= 15;
  return r;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate({2, 4, 1}), ValidationError);
  CHECK_THROWS_AS(validate({2, 2, 1}), ValidationError);
  CHECK_THROWS_AS(validate({11, 1, 1}), ValidationError);
  CHECK_THROWS_AS(validate({2, 0, 1}), ValidationError);
  CHECK_NOTHROW(validate({3, 2, 1}));
  CHECK_THROWS_AS(serre_trace({2, 1, 1}, 0), PrecisionError);
  CHECK_THROWS_AS(serre_trace({3, 1, 1}, 10, TraceFormula::delta), ValidationError);
}

TEST_CASE("psi coefficients") {
  CHECK(psi_coeff(1, 1, 0) == 1);
  CHECK(psi_coeff(1, 1, 1) == make_rat(1, 128));
  for (long m = 1; m <= 4; ++m)
    for (long n = 1; n <= 3 && n < (1L << m); ++n)
      for (long j = 0; j <= serre_t(n, m); ++j) CHECK(psi_coeff(n, m, j) == psi_coeff_product(n, m, j));
  CHECK_THROWS_AS(psi_coeff(1, 1, 2), ValidationError);
}

TEST_CASE("Psi and c coefficients") {
  CHECK(big_psi(1, 1, 0, 0) == Rat(pp(18, 9, 12)));
  CHECK(big_psi(1, 1, 0, 1) == -Rat(pp(20, 7, 12)));
  CHECK(big_psi(1, 1, 2, 0) == 0);
  CHECK(c_coeff(1, 1, 0) == pp(18, 7, 13));
  CHECK(c_coeff(1, 1, 1) == -pp(12, 8, 9, 2));
  CHECK(val2(c_coeff(1, 1, 0)) == Val2(18));
  CHECK_THROWS_AS(c_coeff(1, 1, 3), ValidationError);
}

TEST_CASE("c coefficients agree with the closed form expanded in G4, G6") {
  for (long m = 1; m <= 4; ++m) {
    for (long n = 1; n <= 3 && n < (1L << m); ++n) {
      const ModularPoly oracle = to_basis(serre_closed_poly(n, m), Basis::G);
      const ModularPoly p = serre_poly(n, m);
      CHECK(p == oracle);
      CHECK(p.weight() == 12 * (1L << m));
      for (const auto& [e, c] : p.terms()) {
        CHECK(exponent_weight(e) == 12 * (1L << m));
        CHECK(is_integer(c));
      }
    }
  }
}

TEST_CASE("trace examples") {
  const QSeries l11 = serre_trace({2, 1, 1}, 40);
  CHECK(l11.lead() == 1);
  CHECK(l11.coeff(1) == fifteen_pow(1));
  CHECK(l11 == serre_trace({2, 1, 1}, 40, TraceFormula::delta));
  CHECK(eq_through(l11, serre_closed(1, 1, 40), 40));
  CHECK(eq_through(l11, eval_poly(serre_poly(1, 1), 40), 40));
  const QSeries l3 = serre_trace({3, 1, 1}, 20);
  CHECK(l3.coeff(0) == 0);
  CHECK(l3.lead() == 1);
  for (long e = 0; e < 20; ++e) CHECK(is_integer(l3.coeff(e)));
}

TEST_CASE("three-way agreement and leading coefficient on the grid") {
  for (auto [n, m] : std::vector<std::pair<long, long>>{{1, 1}, {1, 2}, {2, 2}, {3, 2}, {1, 3}, {2, 3}, {3, 3}}) {
    const SerreCell cell = compute_cell({2, n, m}, 60);
    CHECK(cell.closed_agrees);
    CHECK(cell.poly_agrees);
    CHECK(cell.lead_ok);
    CHECK(cell.bounds_ok);
    CHECK(cell.ok());
    CHECK(cell.series_trace == serre_trace({2, n, m}, 60, TraceFormula::delta));
  }
}

TEST_CASE("coefficient valuation bounds") {
  for (auto [n, m] : std::vector<std::pair<long, long>>{{1, 1}, {1, 2}, {2, 2}, {1, 3}, {2, 3}, {3, 3}, {5, 3}}) {
    const auto rows = coeff_val_bounds(n, m);
    CHECK(rows.size() == static_cast<std::size_t>((1L << m) + 1));
    for (const auto& r : rows) {
      if (r.slack) CHECK(*r.slack >= 0);
    }
  }
  const auto rows = coeff_val_bounds(1, 1);
  CHECK(rows[0].bound == 18);
  CHECK(*rows[0].slack == 0);
}

TEST_CASE("convergence report") {
  const auto r1 = convergence_report(1, 4, 40);
  REQUIRE(r1.size() == 4);
  CHECK(r1[0].to_limit.value >= Val2(5));
  for (std::size_t i = 1; i < r1.size(); ++i) CHECK(r1[i - 1].to_limit.value < r1[i].to_limit.value);
  const auto r2 = convergence_report(2, 2, 30);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].m == 2);
  CHECK_FALSE(r2[0].to_limit.value.is_infinite());
  CHECK(r2[0].to_limit.value > Val2(0));
}

TEST_CASE("cell JSON") {
  const auto j = to_json(compute_cell({2, 1, 1}, 20));
  CHECK(j["ok"] == true);
  CHECK(j["c"][0]["factorization"]["primes"]["5"] == 13);
  CHECK(j["trace"]["coeffs"][0] == to_string(fifteen_pow(1)));
  CHECK(j["formula"] == "trace-general");
  const auto j3 = to_json(compute_cell({3, 1, 1}, 10));
  CHECK_FALSE(j3.contains("closed"));
}
