#include "haupt/heisenberg.hpp"

#include <algorithm>
#include <mutex>
#include <string>

#include "haupt/errors.hpp"
#include "haupt/serreseq.hpp"

namespace haupt {

namespace {

void trim(Monomial& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

Monomial monomial3(int a, int b, int c) {
  Monomial m{a, b, c};
  trim(m);
  return m;
}

Int lcm_den(const std::vector<const Rat*>& xs) {
  Int l = 1;
  for (const Rat* x : xs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x->get_den_mpz_t());
  return l;
}

Rat alpha_scale(long r) {
  const Rat s = make_rat(Int(1), Int(double_factorial(2 * r - 1) << static_cast<mp_bitcnt_t>(r)));
  return (r % 2 == 0) ? s : Rat(-s);
}

Rat beta_scale(long s) {
  return make_rat(Int(1) << static_cast<mp_bitcnt_t>(s), double_factorial(2 * s - 1));
}

// (X + c d/dX)^N 1 with [d/dX, X] = 1: sum_l N!/(l! (N-2l)!) (c/2)^l X^(N-2l).
// Index = power of X.
std::vector<Rat> hermite_chain(long N, const Rat& half_c) {
  std::vector<Rat> out(static_cast<std::size_t>(N + 1));
  for (long l = 0; 2 * l <= N; ++l) {
    Rat c = Rat(factorial(N)) / Rat(Int(factorial(l) * factorial(N - 2 * l))) * rat_pow(half_c, l);
    c.canonicalize();
    out[static_cast<std::size_t>(N - 2 * l)] = c;
  }
  return out;
}

// alpha_r as a polynomial in x = h(-2) + h(-1).
std::vector<Rat> alpha_x(long r) {
  auto v = hermite_chain(2 * r, make_rat(-1, 240));
  const Rat s = alpha_scale(r);
  for (auto& c : v) c *= s;
  return v;
}

// beta_s as a polynomial in y = h(-3) + (3/2)h(-2) + (1/2)h(-1).
std::vector<Rat> beta_y(long s) {
  auto v = hermite_chain(2 * s, make_rat(-1, 2016));
  const Rat sc = beta_scale(s);
  for (auto& c : v) c *= sc;
  return v;
}

using XYPoly = std::map<std::pair<int, int>, Rat>;  // (deg x, deg y) -> coefficient

void add_outer(XYPoly& acc, const Rat& scale, const std::vector<Rat>& px, const std::vector<Rat>& py) {
  for (std::size_t k = 0; k < px.size(); ++k) {
    if (px[k] == 0) continue;
    const Rat a = scale * px[k];
    for (std::size_t l = 0; l < py.size(); ++l) {
      if (py[l] == 0) continue;
      Rat& slot = acc[{static_cast<int>(k), static_cast<int>(l)}];
      slot += a * py[l];
    }
  }
}

// Rewrites sum p_{kl} x^k y^l in the round-bracket monomials. With
// w = h(-1) + 3h(-2), y = (2h(-3) + w)/2, so after clearing 2^L and the
// common denominator every step is integral. Each h(-3) power gives a
// polynomial in (x, w), and each homogeneous part of that is converted to
// (h(-1), h(-2)) by Horner's rule in w.
HeisenbergState expand_xy(const XYPoly& p) {
  HeisenbergState out;
  if (p.empty()) return out;
  int L = 0, Dmax = 0;
  std::vector<const Rat*> cs;
  for (const auto& [e, c] : p) {
    L = std::max(L, e.second);
    Dmax = std::max(Dmax, e.first + e.second);
    cs.push_back(&c);
  }
  const Int D = lcm_den(cs);
  const Int denom = D << static_cast<mp_bitcnt_t>(L);

  std::vector<std::vector<Int>> binom(static_cast<std::size_t>(Dmax + 1));
  for (int a = 0; a <= Dmax; ++a) {
    binom[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(a + 1));
    for (int b = 0; b <= a; ++b) binom[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = binomial(a, b);
  }
  auto C = [&](int a, int b) -> const Int& { return binom[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };

  // Q_{kl} = p_{kl} D 2^(L-l)
  std::vector<std::pair<std::pair<int, int>, Int>> q;
  for (const auto& [e, c] : p) {
    if (c == 0) continue;
    Int v = Int(c.get_num() * (D / c.get_den()));
    v <<= static_cast<mp_bitcnt_t>(L - e.second);
    q.emplace_back(e, std::move(v));
  }

  for (int c3 = 0; c3 <= L; ++c3) {
    // R(x, w) = sum Q_{kl} C(l, c3) 2^c3 x^k w^(l-c3), grouped by degree.
    std::map<int, std::map<int, Int>> by_degree;  // d -> (power of w) -> coefficient
    for (const auto& [e, v] : q) {
      const auto [k, l] = e;
      if (l < c3) continue;
      Int t = v * C(l, c3);
      t <<= static_cast<mp_bitcnt_t>(c3);
      by_degree[k + l - c3][l - c3] += t;
    }
    for (auto& [d, coeffs] : by_degree) {
      // S_j = w S_{j+1} + a_j x^(d-j), S indexed by the power of h(-2).
      std::vector<Int> S;
      for (int j = d; j >= 0; --j) {
        const int e = d - j;
        std::vector<Int> next(static_cast<std::size_t>(e + 1));
        for (std::size_t b = 0; b < S.size(); ++b) {
          if (S[b] == 0) continue;
          next[b] += S[b];
          next[b + 1] += 3 * S[b];
        }
        auto it = coeffs.find(j);
        if (it != coeffs.end() && it->second != 0)
          for (int b = 0; b <= e; ++b) next[static_cast<std::size_t>(b)] += it->second * C(e, b);
        S = std::move(next);
      }
      for (int b = 0; b <= d; ++b) {
        const Int& v = S[static_cast<std::size_t>(b)];
        if (v == 0) continue;
        out.add(monomial3(d - b, b, c3), make_rat(v, denom));
      }
    }
  }
  return out;
}

XYPoly outer(const std::vector<Rat>& px, const std::vector<Rat>& py) {
  XYPoly p;
  add_outer(p, Rat(1), px, py);
  return p;
}

void require_low_modes(const HeisenbergState& v, const char* what) {
  if (v.max_mode() > 3)
    throw ValidationError(std::string(what) + ": states involving h(-k) for k > 3 are not supported");
}

ModularPoly g_poly(int k) {
  if (k % 2 != 0) return ModularPoly(k, Basis::G);
  return eisenstein_poly(k, Basis::G);
}

// 2(-1)^(s+1) / ((s-1)!(t-1)!) G_{s+t}
ModularPoly pair_factor(int s, int t) {
  Rat c = make_rat(Int(2), Int(factorial(s - 1) * factorial(t - 1)));
  if (s % 2 == 0) c = -c;
  return g_poly(s + t) * c;
}

long phi_weight(const Monomial& phi) { return monomial_weight(phi); }

void check_phi(const Monomial& phi) {
  for (int c : phi)
    if (c < 0) throw ValidationError("negative multiplicity in a square-bracket monomial");
}

}  // namespace

// ---------------------------------------------------------------------------
// Monomials and states

long monomial_weight(const Monomial& m) {
  long w = 0;
  for (std::size_t k = 0; k < m.size(); ++k) w += static_cast<long>(k + 1) * m[k];
  return w;
}

std::vector<int> monomial_modes(const Monomial& m) {
  std::vector<int> out;
  for (std::size_t k = m.size(); k-- > 0;)
    for (int i = 0; i < m[k]; ++i) out.push_back(static_cast<int>(k + 1));
  return out;
}

Monomial monomial_from_modes(const std::vector<int>& modes) {
  Monomial m;
  for (int k : modes) {
    if (k < 1) throw ValidationError("mode indices are positive integers, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > m.size()) m.resize(static_cast<std::size_t>(k), 0);
    ++m[static_cast<std::size_t>(k - 1)];
  }
  return m;
}

HeisenbergState HeisenbergState::vacuum() { return single({}); }

HeisenbergState HeisenbergState::single(const Monomial& m, const Rat& c) {
  HeisenbergState s;
  Monomial t = m;
  trim(t);
  s.add(t, c);
  return s;
}

Rat HeisenbergState::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rat(0) : it->second;
}

int HeisenbergState::max_mode() const {
  int k = 0;
  for (const auto& [m, c] : terms_) k = std::max(k, static_cast<int>(m.size()));
  return k;
}

void HeisenbergState::add(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  if (!m.empty() && m.back() == 0) {
    Monomial t = m;
    trim(t);
    add(t, c);
    return;
  }
  auto [it, fresh] = terms_.try_emplace(m, c);
  if (fresh) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

HeisenbergState& HeisenbergState::operator+=(const HeisenbergState& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

HeisenbergState& HeisenbergState::operator-=(const HeisenbergState& o) {
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

HeisenbergState& HeisenbergState::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

nlohmann::json to_json(const HeisenbergState& v) {
  auto j = nlohmann::json::array();
  for (const auto& [m, c] : v.terms()) j.push_back({{"monomial", monomial_modes(m)}, {"coeff", to_string(c)}});
  return j;
}

HeisenbergState heisenberg_state_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("a state is a JSON array of terms");
  HeisenbergState s;
  for (const auto& t : j) {
    if (!t.is_object() || !t.contains("monomial") || !t.contains("coeff"))
      throw ValidationError("state terms need \"monomial\" and \"coeff\"");
    std::vector<int> modes;
    for (const auto& k : t["monomial"]) {
      if (!k.is_number_integer()) throw ValidationError("mode indices are integers");
      modes.push_back(k.get<int>());
    }
    s.add(monomial_from_modes(modes), parse_rat(t["coeff"].get<std::string>()));
  }
  return s;
}

HeisenbergState state_mul(const HeisenbergState& u, const HeisenbergState& v, Kernel kernel) {
  if (u.is_zero() || v.is_zero()) return {};
  if (kernel == Kernel::fast && u.max_mode() <= 3 && v.max_mode() <= 3) {
    std::vector<const Rat*> du, dv;
    for (const auto& [m, c] : u.terms()) du.push_back(&c);
    for (const auto& [m, c] : v.terms()) dv.push_back(&c);
    const Int Du = lcm_den(du), Dv = lcm_den(dv);
    struct Packed {
      std::array<int, 3> e;
      Int c;
    };
    auto pack = [](const HeisenbergState& s, const Int& D, std::array<int, 3>& hi) {
      std::vector<Packed> out;
      for (const auto& [m, c] : s.terms()) {
        Packed p{{0, 0, 0}, Int(c.get_num() * (D / c.get_den()))};
        for (std::size_t k = 0; k < m.size(); ++k) {
          p.e[k] = m[k];
          hi[k] = std::max(hi[k], m[k]);
        }
        out.push_back(std::move(p));
      }
      return out;
    };
    std::array<int, 3> hu{0, 0, 0}, hv{0, 0, 0};
    const auto pu = pack(u, Du, hu), pv = pack(v, Dv, hv);
    const std::size_t A = static_cast<std::size_t>(hu[0] + hv[0] + 1), B = static_cast<std::size_t>(hu[1] + hv[1] + 1),
                      Cn = static_cast<std::size_t>(hu[2] + hv[2] + 1);
    std::vector<Int> acc(A * B * Cn);
    for (const auto& a : pu) {
      for (const auto& b : pv) {
        const std::size_t idx = static_cast<std::size_t>(a.e[0] + b.e[0]) +
                                A * (static_cast<std::size_t>(a.e[1] + b.e[1]) + B * static_cast<std::size_t>(a.e[2] + b.e[2]));
        mpz_addmul(acc[idx].get_mpz_t(), a.c.get_mpz_t(), b.c.get_mpz_t());
      }
    }
    const Int den = Du * Dv;
    HeisenbergState out;
    for (std::size_t c = 0; c < Cn; ++c)
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t a = 0; a < A; ++a) {
          const Int& x = acc[a + A * (b + B * c)];
          if (x != 0) out.add(monomial3(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)), make_rat(x, den));
        }
    return out;
  }
  HeisenbergState out;
  for (const auto& [ma, ca] : u.terms()) {
    for (const auto& [mb, cb] : v.terms()) {
      Monomial m(std::max(ma.size(), mb.size()), 0);
      for (std::size_t k = 0; k < ma.size(); ++k) m[k] += ma[k];
      for (std::size_t k = 0; k < mb.size(); ++k) m[k] += mb[k];
      out.add(m, Rat(ca * cb));
    }
  }
  return out;
}

HeisenbergState state_axpy(const Rat& a, const HeisenbergState& u, const HeisenbergState& v) {
  HeisenbergState out = v;
  if (a == 0) return out;
  for (const auto& [m, c] : u.terms()) out.add(m, Rat(a * c));
  return out;
}

Val2 state_val2(const HeisenbergState& v) {
  Val2 best = Val2::infinity();
  for (const auto& [m, c] : v.terms()) best = min(best, val2(c));
  return best;
}

// ---------------------------------------------------------------------------
// Bracket operators

BracketOp BracketOp::h2() {
  return {Kind::H2, {{2, Rat(1)}, {1, Rat(1)}}, {{2, make_rat(-1, 120)}, {3, make_rat(1, 80)}}};
}

BracketOp BracketOp::h3() {
  return {Kind::H3,
          {{3, Rat(1)}, {2, make_rat(3, 2)}, {1, make_rat(1, 2)}},
          {{1, make_rat(1, 240)}, {2, make_rat(-1, 240)}, {3, make_rat(1, 315)}}};
}

HeisenbergState apply_bracket(const BracketOp& op, const HeisenbergState& v, long times) {
  if (times < 0) throw ValidationError("apply_bracket: negative repetition count");
  require_low_modes(v, "apply_bracket");
  HeisenbergState cur = v;
  for (long step = 0; step < times; ++step) {
    HeisenbergState next;
    for (const auto& [m, c] : cur.terms()) {
      for (const auto& [k, a] : op.mult_part) {
        Monomial t = m;
        if (t.size() < static_cast<std::size_t>(k)) t.resize(static_cast<std::size_t>(k), 0);
        ++t[static_cast<std::size_t>(k - 1)];
        next.add(t, Rat(a * c));
      }
      for (const auto& [k, a] : op.deriv_part) {
        if (m.size() < static_cast<std::size_t>(k) || m[static_cast<std::size_t>(k - 1)] == 0) continue;
        Monomial t = m;
        const int mult = t[static_cast<std::size_t>(k - 1)]--;
        trim(t);
        next.add(t, Rat(a * c * mult));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

HeisenbergState alpha_state(long r) {
  if (r < 0) throw ValidationError("alpha_r needs r >= 0");
  return apply_bracket(BracketOp::h2(), HeisenbergState::vacuum(), 2 * r) * alpha_scale(r);
}

HeisenbergState beta_state(long s) {
  if (s < 0) throw ValidationError("beta_s needs s >= 0");
  return apply_bracket(BracketOp::h3(), HeisenbergState::vacuum(), 2 * s) * beta_scale(s);
}

HeisenbergState alpha_closed_form(long r) {
  if (r < 0) throw ValidationError("alpha_r needs r >= 0");
  // Literal sum over l, with (h(-2)+h(-1))^e expanded binomially.
  const Rat pre = alpha_scale(r);
  HeisenbergState out;
  for (long l = 0; l <= r; ++l) {
    Rat c = Rat(Int(binomial(2 * r, 2 * l) * factorial(2 * l))) / Rat(factorial(l)) * rat_pow(Rat(-240), -l) * pre;
    c.canonicalize();
    const long e = 2 * (r - l);
    for (long b = 0; b <= e; ++b)
      out.add(monomial3(static_cast<int>(e - b), static_cast<int>(b), 0), Rat(c * Rat(binomial(e, b))));
  }
  return out;
}

HeisenbergState alpha_beta(long r, long s, Kernel kernel) {
  if (r < 0 || s < 0) throw ValidationError("alpha_r beta_s needs r, s >= 0");
  if (kernel == Kernel::reference) return state_mul(alpha_state(r), beta_state(s), Kernel::reference);
  return expand_xy(outer(alpha_x(r), beta_y(s)));
}

// ---------------------------------------------------------------------------
// Characters

std::vector<std::vector<std::pair<int, int>>> pair_partitions(const std::vector<int>& phi) {
  std::vector<std::vector<std::pair<int, int>>> out;
  if (phi.size() % 2 != 0) return out;
  std::vector<bool> used(phi.size(), false);
  std::vector<std::pair<int, int>> cur;
  auto rec = [&](auto&& self) -> void {
    std::size_t first = 0;
    while (first < phi.size() && used[first]) ++first;
    if (first == phi.size()) {
      out.push_back(cur);
      return;
    }
    used[first] = true;
    for (std::size_t j = first + 1; j < phi.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur.emplace_back(phi[first], phi[j]);
      self(self);
      cur.pop_back();
      used[j] = false;
    }
    used[first] = false;
  };
  rec(rec);
  return out;
}

ModularPoly character_MT_exhaustive(const Monomial& phi) {
  check_phi(phi);
  const int w = static_cast<int>(phi_weight(phi));
  ModularPoly out(w, Basis::G);
  for (const auto& matching : pair_partitions(monomial_modes(phi))) {
    ModularPoly term = ModularPoly::constant(Rat(1), Basis::G);
    for (auto [s, t] : matching) term = term * pair_factor(std::min(s, t), std::max(s, t));
    out += term;
  }
  return out;
}

ModularPoly character_MT(const Monomial& phi) {
  check_phi(phi);
  const int w = static_cast<int>(phi_weight(phi));
  ModularPoly out(w, Basis::G);
  long size = 0;
  for (int c : phi) size += c;
  if (size % 2 != 0) return out;

  // Sum over pair-type multiplicities m_st; a type vector stands for
  // prod n_k! / (prod_s 2^m_ss m_ss! prod_{s<t} m_st!) labelled matchings.
  Int labels = 1;
  for (int c : phi) labels *= factorial(c);
  std::vector<int> cnt(phi.begin(), phi.end());
  const int K = static_cast<int>(cnt.size());
  std::map<std::pair<int, int>, ModularPoly> factors;
  auto factor = [&](int s, int t) -> const ModularPoly& {
    auto it = factors.find({s, t});
    if (it == factors.end()) it = factors.emplace(std::make_pair(s, t), pair_factor(s, t)).first;
    return it->second;
  };

  auto rec = [&](auto&& self, ModularPoly acc, Int div) -> void {
    int s = 0;
    while (s < K && cnt[static_cast<std::size_t>(s)] == 0) ++s;
    if (s == K) {
      out += acc * make_rat(labels, div);
      return;
    }
    const int ms = s + 1;
    const int have = cnt[static_cast<std::size_t>(s)];
    for (int mss = 0; 2 * mss <= have; ++mss) {
      const int rem = have - 2 * mss;
      ModularPoly a = acc * pow(factor(ms, ms), mss);
      Int d = div * factorial(mss) * (Int(1) << static_cast<mp_bitcnt_t>(mss));
      cnt[static_cast<std::size_t>(s)] = 0;
      // Spread the remaining copies of mode ms over larger modes.
      auto distribute = [&](auto&& dself, int t, int left, ModularPoly a2, Int d2) -> void {
        if (left == 0) {
          self(self, std::move(a2), std::move(d2));
          return;
        }
        if (t >= K) return;
        const int mt = t + 1;
        const int room = cnt[static_cast<std::size_t>(t)];
        const int top = ((ms + mt) % 2 != 0) ? 0 : std::min(left, room);
        for (int x = 0; x <= top; ++x) {
          cnt[static_cast<std::size_t>(t)] -= x;
          dself(dself, t + 1, left - x, a2 * pow(factor(ms, mt), x), d2 * factorial(x));
          cnt[static_cast<std::size_t>(t)] += x;
        }
      };
      distribute(distribute, s + 1, rem, std::move(a), std::move(d));
      cnt[static_cast<std::size_t>(s)] = have;
    }
  };
  rec(rec, ModularPoly::constant(Rat(1), Basis::G), Int(1));
  return out;
}

void SquareBracketVector::add(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  Monomial t = m;
  trim(t);
  Rat& slot = terms[t];
  slot += c;
  if (slot == 0) terms.erase(t);
}

ModularPoly character_of(const SquareBracketVector& v) {
  if (v.terms.empty()) return ModularPoly(0, Basis::G);
  const long w = monomial_weight(v.terms.begin()->first);
  ModularPoly out(static_cast<int>(w), Basis::G);
  for (const auto& [m, c] : v.terms) {
    if (monomial_weight(m) != w) throw ValidationError("character_of needs a vector of a single square-bracket weight");
    out += character_MT(m) * c;
  }
  return out;
}

SquareBracketVector alpha_beta_square(long r, long s) {
  if (r < 0 || s < 0) throw ValidationError("alpha_r beta_s needs r, s >= 0");
  SquareBracketVector v;
  v.add({0, static_cast<int>(2 * r), static_cast<int>(2 * s)}, Rat(alpha_scale(r) * beta_scale(s)));
  return v;
}

SquareBracketVector v_square(long n, long m) {
  validate(SerreParams{2, n, m});
  const long N = 3 * (1L << m);
  SquareBracketVector v;
  for (long i = 0; i <= (1L << m); ++i) {
    const Rat c(c_coeff(n, m, i));
    for (const auto& [mono, a] : alpha_beta_square(N - 3 * i, 2 * i).terms) v.add(mono, Rat(c * a));
  }
  return v;
}

HeisenbergState v_state(long n, long m, Kernel kernel) {
  validate(SerreParams{2, n, m});
  const long N = 3 * (1L << m);
  if (kernel == Kernel::reference) {
    HeisenbergState out;
    for (long i = 0; i <= (1L << m); ++i)
      out = state_axpy(Rat(c_coeff(n, m, i)), alpha_beta(N - 3 * i, 2 * i, Kernel::reference), out);
    return out;
  }
  static std::mutex mu;
  static std::map<std::pair<long, long>, HeisenbergState> memo;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find({n, m});
    if (it != memo.end()) return it->second;
  }
  XYPoly p;
  for (long i = 0; i <= (1L << m); ++i) add_outer(p, Rat(c_coeff(n, m, i)), alpha_x(N - 3 * i), beta_y(2 * i));
  HeisenbergState out = expand_xy(p);
  std::lock_guard<std::mutex> lock(mu);
  return memo.emplace(std::make_pair(n, m), std::move(out)).first->second;
}

// ---------------------------------------------------------------------------
// Reports

std::vector<CauchyRow> cauchy_report(long n, long m_max) {
  if (n < 1) throw ValidationError("cauchy_report needs n >= 1");
  if (m_max > 11) throw ValidationError("cauchy_report supports m_max <= 11");
  std::vector<CauchyRow> rows;
  for (long m = 1; m <= m_max; ++m) {
    if (n >= (1L << m)) continue;
    CauchyRow row;
    row.m = m;
    row.step = state_val2(v_state(n, m + 1) - v_state(n, m));

    const long M = 1L << m;
    const long r = 3 * M;
    const HeisenbergState a = expand_xy(outer(alpha_x(r), {Rat(1)}));
    auto ppow = [](long p, long e) {
      Int x = 1;
      for (long i = 0; i < e; ++i) x *= p;
      return x;
    };
    const Rat const_want = make_rat(Int(1), Int(ppow(2, 12 * M) * ppow(3, 3 * M) * ppow(5, 3 * M)));
    Rat quad_want = make_rat(Int(ppow(2, m + 3)), Int(ppow(2, 12 * M))) * make_rat(Int(1), Int(ppow(3, 3 * M - 2))) *
                    make_rat(Int(1), Int(ppow(5, 3 * M - 1)));
    quad_want = -quad_want;
    row.const_coeff_ok = a.coeff({}) == const_want;
    row.quad_coeff_ok = a.coeff({2}) == quad_want;

    row.rescale_ok = true;
    for (long i = 0; i <= M; ++i) {
      const Rat ratio =
          make_rat(Int(double_factorial(6 * M - 6 * i - 1) * double_factorial(6 * M - 1)), double_factorial(12 * M - 6 * i - 1));
      if (val2(ratio) != Val2(0)) row.rescale_ok = false;
    }
    rows.push_back(row);
  }
  return rows;
}

bool CertificateCell::ok() const {
  if (!character_ok) return false;
  if (val < Val2(bound)) return false;
  for (const auto& t : terms)
    if (t.val < Val2(t.bound)) return false;
  return true;
}

std::vector<CertificateCell> overconvergence_certificate(long n_max, long m_max) {
  if (n_max < 1 || m_max < 1) throw ValidationError("certificate grid needs n_max, m_max >= 1");
  std::vector<CertificateCell> cells;
  for (long m = 1; m <= m_max; ++m) {
    for (long n = 1; n <= n_max && n < (1L << m); ++n) {
      CertificateCell cell;
      cell.n = n;
      cell.m = m;
      cell.bound = -6 * n;
      cell.val = state_val2(v_state(n, m));
      const long N = 3 * (1L << m);
      for (long i = 0; i <= (1L << m); ++i) {
        CertificateTerm t;
        t.i = i;
        t.bound = i <= n ? -6 * n : -8 * n + 2 * i;
        t.val = val2(c_coeff(n, m, i)) + state_val2(alpha_beta(N - 3 * i, 2 * i));
        cell.terms.push_back(t);
        if (t.val < Val2(t.bound))
          throw VerificationError("overconvergence bound fails at n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                  " i=" + std::to_string(i) + ": val2 " + t.val.to_string() + " < " +
                                  std::to_string(t.bound));
      }
      if (cell.val < Val2(cell.bound))
        throw VerificationError("overconvergence bound fails at n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                ": val2(v) = " + cell.val.to_string());
      cell.character_ok = character_of(v_square(n, m)) == serre_poly(n, m);
      if (!cell.character_ok)
        throw VerificationError("character of v_{n,m} differs from the Serre polynomial at n=" + std::to_string(n) +
                                " m=" + std::to_string(m));
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

nlohmann::json to_json(const CertificateCell& c) {
  auto v = [](const Val2& x) { return x.is_infinite() ? nlohmann::json("+inf") : nlohmann::json(x.value()); };
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : c.terms) terms.push_back({{"i", t.i}, {"val2", v(t.val)}, {"bound", t.bound}});
  nlohmann::json j{{"n", c.n},
                   {"m", c.m},
                   {"val2", v(c.val)},
                   {"bound", c.bound},
                   {"terms", terms},
                   {"character_ok", c.character_ok},
                   {"ok", c.ok()}};
  if (!c.val.is_infinite()) {
    j["slack"] = c.val.value() - c.bound;
    // 2^(6n) |a_I|_2 <= 1 for every coefficient a_I
    j["scaled_val2"] = c.val.value() + 6 * c.n;
  }
  return j;
}

}  // namespace haupt
