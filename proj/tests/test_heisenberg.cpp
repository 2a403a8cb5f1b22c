#include <random>

#include "doctest.h"
#include "haupt/heisenberg.hpp"
#include "haupt/serreseq.hpp"

using namespace haupt;

namespace {

const ModularPoly G4 = ModularPoly::generator(4, Basis::G);
const ModularPoly G6 = ModularPoly::generator(6, Basis::G);

HeisenbergState h(int k) { return HeisenbergState::single(monomial_from_modes({k})); }

HeisenbergState random_state(std::mt19937& rng, int max_deg) {
  std::uniform_int_distribution<int> deg(0, max_deg), num(-9, 9), den(1, 8), count(1, 6);
  HeisenbergState s;
  const int terms = count(rng);
  for (int t = 0; t < terms; ++t) {
    Monomial m{deg(rng), deg(rng), deg(rng)};
    while (!m.empty() && m.back() == 0) m.pop_back();
    s.add(m, make_rat(num(rng), den(rng)));
  }
  return s;
}

// Independent oracle for h[-2]^a h[-3]^b 1 done by pair contractions in the
// (x, y) variables: the constant term of (x + c d/dx)^a (y + e d/dy)^b 1.
Rat chain_constant(long a, const Rat& half_c) {
  if (a % 2 != 0) return 0;
  const long l = a / 2;
  return Rat(factorial(a)) / Rat(factorial(l)) * rat_pow(half_c, l);
}

}  // namespace

TEST_CASE("state basics") {
  const HeisenbergState one = HeisenbergState::vacuum();
  std::mt19937 rng(7);
  const HeisenbergState v = random_state(rng, 3);
  CHECK(state_mul(one, v) == v);
  CHECK(state_mul(one, v, Kernel::reference) == v);
  CHECK(state_mul(h(1), h(2)) == HeisenbergState::single(monomial_from_modes({1, 2})));
  CHECK(state_axpy(Rat(2), v, v) == v * Rat(3));
  CHECK(state_axpy(Rat(-1), v, v).is_zero());
  CHECK(monomial_weight(monomial_from_modes({2, 2, 1})) == 5);
  CHECK(monomial_modes(monomial_from_modes({1, 2, 2})) == std::vector<int>{2, 2, 1});
  CHECK(state_val2(one) == Val2(0));
  CHECK(state_val2(HeisenbergState{}).is_infinite());
}

TEST_CASE("state JSON") {
  HeisenbergState s = HeisenbergState::single(monomial_from_modes({2, 2, 1}), make_rat(-3, 8));
  s.add({}, make_rat(1, 240));
  const auto j = to_json(s);
  CHECK(j.dump() == R"([{"coeff":"1/240","monomial":[]},{"coeff":"-3/8","monomial":[2,2,1]}])");
  CHECK(heisenberg_state_from_json(j) == s);
  CHECK_THROWS_AS(heisenberg_state_from_json(nlohmann::json::parse(R"([{"monomial":[0],"coeff":"1"}])")), ValidationError);
}

TEST_CASE("multiplication kernels agree") {
  std::mt19937 rng(11);
  for (int t = 0; t < 50; ++t) {
    const HeisenbergState a = random_state(rng, 5), b = random_state(rng, 5);
    CHECK(state_mul(a, b, Kernel::fast) == state_mul(a, b, Kernel::reference));
    CHECK(state_mul(a, b) == state_mul(b, a));
  }
  // Higher modes fall back to the map kernel.
  const HeisenbergState h5 = h(5);
  CHECK(state_mul(h5, h(1)) == HeisenbergState::single(monomial_from_modes({5, 1})));
}

TEST_CASE("bracket operators") {
  const HeisenbergState one = HeisenbergState::vacuum();
  const auto H2 = BracketOp::h2(), H3 = BracketOp::h3();
  const HeisenbergState x = h(2) + h(1);
  CHECK(apply_bracket(H2, one) == x);
  CHECK(apply_bracket(H2, one, 2) == state_mul(x, x) - one * make_rat(1, 120));
  CHECK(apply_bracket(H2, apply_bracket(H3, one)) == apply_bracket(H3, apply_bracket(H2, one)));
  CHECK(apply_bracket(H2, one, 0) == one);
  CHECK_THROWS_AS(apply_bracket(H2, h(4)), ValidationError);

  // [H2, H3] = 0 on random states in modes 1..3.
  std::mt19937 rng(3);
  for (int t = 0; t < 30; ++t) {
    const HeisenbergState v = random_state(rng, 4);
    CHECK(apply_bracket(H2, apply_bracket(H3, v)) == apply_bracket(H3, apply_bracket(H2, v)));
  }
  // With 1/120 in place of 1/80 the operators do not commute.
  BracketOp bad = H2;
  bad.deriv_part[1].second = make_rat(1, 120);
  CHECK_FALSE(apply_bracket(bad, apply_bracket(H3, h(3))) == apply_bracket(H3, apply_bracket(bad, h(3))));

  // Cross contractions vanish: constant term of H2^a H3^b 1 is zero for a, b odd,
  // and otherwise the product of the separate Hermite constants.
  for (long a = 0; a <= 5; ++a)
    for (long b = 0; b <= 5; ++b) {
      const Rat c = apply_bracket(H2, apply_bracket(H3, one, b), a).coeff({});
      if (a % 2 == 1 && b % 2 == 1) CHECK(c == 0);
      CHECK(c == chain_constant(a, make_rat(-1, 240)) * chain_constant(b, make_rat(-1, 2016)));
    }
}

TEST_CASE("alpha and beta") {
  const HeisenbergState one = HeisenbergState::vacuum();
  const HeisenbergState x = h(2) + h(1);
  CHECK(alpha_state(0) == one);
  CHECK(beta_state(0) == one);
  CHECK(alpha_state(1) == state_mul(x, x) * make_rat(-1, 2) + one * make_rat(1, 240));
  CHECK(state_val2(alpha_state(1)) == Val2(-4));
  CHECK(state_val2(state_mul(alpha_state(2), beta_state(2))) == Val2(-14));
  CHECK(state_val2(state_mul(alpha_state(3), beta_state(2))) == Val2(-18));
  CHECK(beta_state(1).coeff({}) == make_rat(-1, 504));

  // alpha_1 beta_1 is H2^2 and H3^2 in either order.
  const HeisenbergState ab = state_mul(alpha_state(1), beta_state(1));
  const Rat sc = make_rat(-1, 2) * Rat(2);
  CHECK(ab == apply_bracket(BracketOp::h3(), apply_bracket(BracketOp::h2(), one, 2), 2) * sc);
  CHECK(ab == apply_bracket(BracketOp::h2(), apply_bracket(BracketOp::h3(), one, 2), 2) * sc);
}

TEST_CASE("Hermite closed form") {
  for (long r = 0; r <= 8; ++r) CHECK(alpha_closed_form(r) == alpha_state(r));
  CHECK(alpha_closed_form(3).coeff({}) == make_rat(Int(1), Int(240) * 240 * 240));
  CHECK(val2(alpha_closed_form(3).coeff({})) == Val2(-12));
}

TEST_CASE("alpha beta kernels agree") {
  for (long r = 0; r <= 6; ++r)
    for (long s = 0; s <= 6; ++s) CHECK(alpha_beta(r, s, Kernel::fast) == alpha_beta(r, s, Kernel::reference));
}

TEST_CASE("val2 of alpha_r beta_s is exact") {
  for (long r = 2; r <= 5; ++r)
    for (long s = 2; s <= 5; ++s) CHECK(state_val2(alpha_beta(r, s)) == Val2(-4 * r - 3 * s));
}

TEST_CASE("pair partitions") {
  CHECK(pair_partitions({2, 2}).size() == 1);
  CHECK(pair_partitions({2, 2, 2, 2}).size() == 3);
  CHECK(pair_partitions({2, 3}) == std::vector<std::vector<std::pair<int, int>>>{{{2, 3}}});
  CHECK(pair_partitions({2, 2, 2}).empty());
  for (long r = 1; r <= 5; ++r) {
    const auto ps = pair_partitions(std::vector<int>(static_cast<std::size_t>(2 * r), 2));
    CHECK(Int(static_cast<long>(ps.size())) == double_factorial(2 * r - 1));
  }
}

TEST_CASE("Mason-Tuite characters") {
  CHECK(character_MT({0, 2}) == G4 * Rat(-2));
  CHECK(character_MT({0, 0, 2}) == G6 * make_rat(1, 2));
  CHECK(character_MT({0, 1, 1}).is_zero());
  CHECK(character_MT({0, 4}) == pow(G4, 2) * Rat(12));
  CHECK(character_MT({}) == ModularPoly::constant(Rat(1), Basis::G));
  CHECK(character_MT({0, 1}).is_zero());
  CHECK(character_MT({3, 0, 1, 1}).is_zero());
  CHECK(character_MT({2}) == ModularPoly::generator(2, Basis::G) * Rat(2));

  // The type-counting sum equals the explicit enumeration.
  for (const Monomial phi : std::vector<Monomial>{{2, 2}, {1, 1, 2}, {0, 2, 2}, {2, 1, 1, 2}, {0, 4, 2}, {1, 3, 1, 1}, {4, 0, 0, 2}}) {
    CHECK(character_MT(phi) == character_MT_exhaustive(phi));
  }
}

TEST_CASE("character isomorphism on alpha beta") {
  for (long r = 0; r <= 6; ++r)
    for (long s = 0; r + s <= 6; ++s) {
      const ModularPoly want = pow(G4, r) * pow(G6, s);
      CHECK(character_of(alpha_beta_square(r, s)) == want);
      CHECK(character_of(alpha_beta_square(r, 0)) * character_of(alpha_beta_square(0, s)) == want);
    }
  SquareBracketVector v;
  v.add({0, 4}, Rat(1));
  CHECK(character_of(v) == pow(G4, 2) * Rat(12));
  SquareBracketVector mixed;
  mixed.add({0, 2}, Rat(1));
  mixed.add({0, 0, 2}, Rat(1));
  CHECK_THROWS_AS(character_of(mixed), ValidationError);
}

TEST_CASE("pre-images of the Serre sequence") {
  const ModularPoly ch = character_of(v_square(1, 1));
  CHECK(ch == serre_poly(1, 1));
  CHECK(eq_through(eval_poly(ch, 40), serre_trace({2, 1, 1}, 40), 40));
  CHECK(state_val2(v_state(1, 1)) >= Val2(-6));
  CHECK(state_val2(v_state(2, 2)) >= Val2(-12));
  for (long m = 1; m <= 3; ++m)
    for (long n = 1; n <= 2 && n < (1L << m); ++n) {
      CHECK(character_of(v_square(n, m)) == serre_poly(n, m));
      for (const auto& [mono, c] : v_square(n, m).terms) CHECK(monomial_weight(mono) == 12 * (1L << m));
    }
  for (auto [n, m] : std::vector<std::pair<long, long>>{{1, 1}, {1, 2}, {3, 2}, {2, 3}})
    CHECK(v_state(n, m, Kernel::fast) == v_state(n, m, Kernel::reference));
  CHECK_THROWS_AS(v_state(2, 1), ValidationError);
}

TEST_CASE("Cauchy report") {
  const auto rows = cauchy_report(1, 3);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.const_coeff_ok);
    CHECK(r.quad_coeff_ok);
    CHECK(r.rescale_ok);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].step < rows[i].step);
  const auto a6 = alpha_state(6).coeff({});
  Int d = 1;
  for (int i = 0; i < 24; ++i) d *= 2;
  for (int i = 0; i < 6; ++i) d *= 15;
  CHECK(a6 == make_rat(Int(1), d));
}

TEST_CASE("overconvergence certificate") {
  const auto cells = overconvergence_certificate(2, 3);
  CHECK(cells.size() == 5);
  for (const auto& c : cells) {
    CHECK(c.ok());
    CHECK(c.val >= Val2(-6 * c.n));
    // The smallest second-regime bound sits at i = n + 1.
    if (static_cast<long>(c.terms.size()) > c.n + 1) CHECK(c.terms[static_cast<std::size_t>(c.n + 1)].bound == -6 * c.n + 2);
  }
  const auto j = to_json(cells[0]);
  CHECK(j["n"] == 1);
  CHECK(j["ok"] == true);
  CHECK(j["slack"].get<long>() >= 0);
}
