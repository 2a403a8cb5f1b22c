#include "haupt/serreseq.hpp"

namespace haupt {

namespace {

Int ipow(long base, long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(e));
  return r;
}

// Rat power with a possibly negative exponent of a small integer base.
Rat rpow(long base, long e) { return rat_pow(Rat(base), e); }

void check_closed(long n, long m) {
  validate(SerreParams{2, n, m});
}

TraceParts trace_parts_at(long n, long m, long w) {
  const long half = 1L << m, big = 3 * half;
  const QSeries s2 = e_star(2, 2, w);
  const QSeries x = eisenstein(4, Basis::E, w) * Rat(5) - s2 * s2 * Rat(20);
  const QSeries d = delta(w);
  return {pow(lambda_hauptmodul(2, w), n) * pow(x, big), pow(d, 2 * half - n) * u_p(pow(d, n - half), 2),
          rpow(2, 1 - 12 * n) * rat_pow(Rat(240), big)};
}

}  // namespace

void validate(const SerreParams& params) {
  const long p = params.p;
  if (p != 2 && p != 3 && p != 5 && p != 7 && p != 13) {
    throw ValidationError("p must be one of 2, 3, 5, 7, 13; got " + std::to_string(p));
  }
  if (params.n < 1) throw ValidationError("n must be at least 1");
  if (params.m < 1) throw ValidationError("m must be at least 1");
  if (params.m > 12) throw ValidationError("m is limited to 12");
  if (Int(params.n) >= ipow(p, params.m)) {
    throw ValidationError("n < p^m is required; got n = " + std::to_string(params.n) + ", p^m = " +
                          to_string(ipow(p, params.m)));
  }
}

long serre_t(long n, long m) { return (1L << m) - n; }

const char* formula_name(TraceFormula f) { return f == TraceFormula::general ? "trace-general" : "trace-delta"; }

QSeries serre_trace(const SerreParams& params, long known_through, TraceFormula formula) {
  validate(params);
  if (known_through < 1) throw PrecisionError("the trace needs K >= 1, got " + std::to_string(known_through));
  const long p = params.p, n = params.n, m = params.m;
  if (formula == TraceFormula::delta && p != 2) throw ValidationError("the Delta form of the trace is for p = 2 only");
  const long big = 3 * ipow(p, m).get_si();  // 3 p^m

  auto general = [&](long w) {
    const long coarse = (w + p - 2) / p + 1;
    const QSeries e4 = eisenstein(4, Basis::E, w);
    const QSeries e4p = v_p(eisenstein(4, Basis::E, coarse), p).truncated(w);
    const QSeries lam = lambda_hauptmodul(p, w);
    const QSeries x = e4 - e4p * Rat(ipow(p, 4));
    const QSeries y = e4p - e4;
    const QSeries first = pow(lam, n) * pow(x, big);
    const QSeries inner = pow(lam, -n) * pow(y, big);
    return first + u_p(inner, p) * rpow(p, 1 - 12 * n / (p - 1));
  };
  auto via_delta = [&](long w) {
    const TraceParts parts = trace_parts_at(n, m, w);
    return parts.t1 + parts.t2 * parts.scale;
  };

  long w = p * (known_through - 1) + n + 2;
  for (int attempt = 0; attempt < 16; ++attempt) {
    const QSeries s = formula == TraceFormula::general ? general(w) : via_delta(w);
    if (s.known_through() >= known_through) return s.truncated(known_through);
    w += p * (known_through - s.known_through()) + 1;
  }
  throw PrecisionError("could not reach K = " + std::to_string(known_through) + " for the trace");
}

TraceParts serre_trace_parts(long n, long m, long known_through) {
  check_closed(n, m);
  if (known_through < 1) throw PrecisionError("the trace needs K >= 1, got " + std::to_string(known_through));
  long w = 2 * (known_through - 1) + n + 2;
  for (int attempt = 0; attempt < 16; ++attempt) {
    TraceParts parts = trace_parts_at(n, m, w);
    const long k = std::min(parts.t1.known_through(), parts.t2.known_through());
    if (k >= known_through) {
      return {parts.t1.truncated(known_through), parts.t2.truncated(known_through), parts.scale};
    }
    w += 2 * (known_through - k) + 1;
  }
  throw PrecisionError("could not reach K = " + std::to_string(known_through) + " for the trace");
}

Rat psi_coeff(long n, long m, long j) {
  check_closed(n, m);
  if (j < 0 || j > serre_t(n, m)) throw ValidationError("psi index j out of range");
  return rpow(2, -8 * j) * Rat(factorial(j)) * pochhammer(Rat(3 * n - 3 * (1L << m) + 1), 2 * j);
}

Rat psi_coeff_product(long n, long m, long j) {
  check_closed(n, m);
  if (j < 0 || j > serre_t(n, m)) throw ValidationError("psi index j out of range");
  Rat r = rpow(2, -12 * j) * Rat(factorial(j));
  const long base = 12 * n - 12 * (1L << m);
  for (long l = 1; l <= j; ++l) r *= Rat((8 * l + base) * (8 * l + base - 4));
  return r;
}

Rat big_psi(long n, long m, long i, long j) {
  check_closed(n, m);
  const long t = serre_t(n, m), two_m = 1L << m;
  if (j < 0 || j > t) throw ValidationError("Psi index j out of range");
  if (i < 0) throw ValidationError("Psi index i out of range");
  const Int b1 = binomial(n + j, i);
  if (b1 == 0) return Rat(0);
  const long top = 3 * two_m - 3 * n - 2 * j;
  if (top <= 0) throw std::logic_error("Psi ratio denominator vanished");
  Rat r = Rat(b1) * Rat(binomial(top, j)) * make_rat(3 * two_m - 3 * n, top);
  if ((i + j) % 2 != 0) r = -r;
  r *= rpow(2, 12 * two_m - 6 * n - 6 * i + 2 * j);
  r *= rpow(3, 6 * two_m - 3 * n + i - 3 * j);
  r *= rpow(5, 6 * two_m - 3 * i);
  r *= rpow(7, 2 * i);
  return r;
}

Int c_coeff(long n, long m, long i) {
  check_closed(n, m);
  const long t = serre_t(n, m);
  if (i < 0 || i > (1L << m)) throw ValidationError("c index i must lie in [0, 2^m]");
  Rat full = 0, split = 0;
  for (long j = 0; j <= t; ++j) full += big_psi(n, m, i, j);
  for (long j = (i <= n ? 0 : i - n); j <= t; ++j) split += big_psi(n, m, i, j);
  if (full != split) throw VerificationError("c_{n,m,i}: split and full sums disagree");
  if (!is_integer(full)) {
    throw VerificationError("c_{" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(i) +
                            "} = " + to_string(full) + " is not an integer");
  }
  return full.get_num();
}

ModularPoly serre_closed_poly(long n, long m) {
  check_closed(n, m);
  const long t = serre_t(n, m), big = 3 * (1L << m);
  const ModularPoly e4 = ModularPoly::generator(4, Basis::E);
  const ModularPoly d =
      (pow(e4, 3) - pow(ModularPoly::generator(6, Basis::E), 2)) * make_rat(1, 1728);
  ModularPoly r(12 * (1L << m), Basis::E);
  for (long j = 0; j <= t; ++j) {
    const Rat a = pochhammer(Rat(3 * n - big), 3 * j) / psi_coeff(n, m, j);
    r += pow(e4, big - 3 * n - 3 * j) * pow(d, n + j) * a;
  }
  return r * Rat(ipow(15, big));
}

QSeries serre_closed(long n, long m, long known_through) {
  check_closed(n, m);
  const long t = serre_t(n, m), big = 3 * (1L << m);
  const QSeries e4 = eisenstein(4, Basis::E, known_through);
  const QSeries d = delta(known_through);
  QSeries r = QSeries::zero(known_through);
  for (long j = 0; j <= t; ++j) {
    const Rat a = pochhammer(Rat(3 * n - big), 3 * j) / psi_coeff(n, m, j);
    r += pow(e4, big - 3 * n - 3 * j) * pow(d, n + j) * a;
  }
  return (r * Rat(ipow(15, big))).truncated(known_through);
}

ModularPoly serre_poly(long n, long m) {
  check_closed(n, m);
  const long two_m = 1L << m;
  ModularPoly r(12 * two_m, Basis::G);
  for (long i = 0; i <= two_m; ++i) {
    r.add_term({0, static_cast<int>(3 * two_m - 3 * i), static_cast<int>(2 * i)}, Rat(c_coeff(n, m, i)));
  }
  return r;
}

std::vector<CoeffBound> coeff_val_bounds(long n, long m) {
  check_closed(n, m);
  const long two_m = 1L << m;
  std::vector<CoeffBound> rows;
  for (long i = 0; i <= two_m; ++i) {
    CoeffBound b;
    b.i = i;
    b.c = c_coeff(n, m, i);
    b.val = val2(b.c);
    b.bound = i <= n ? 12 * two_m - 6 * n - 6 * i : 12 * two_m - 8 * n - 4 * i;
    if (!b.val.is_infinite()) {
      b.slack = b.val.value() - b.bound;
      if (*b.slack < 0) {
        throw VerificationError("val2(c_{" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(i) +
                                "}) = " + b.val.to_string() + " is below the bound " + std::to_string(b.bound));
      }
    }
    rows.push_back(std::move(b));
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_report(long n, long m_max, long known_through) {
  if (n < 1) throw ValidationError("n must be at least 1");
  if (m_max < 1 || m_max > 10) throw ValidationError("m_max must lie in [1, 10]");
  long m_min = 1;
  while ((1L << m_min) <= n) ++m_min;
  if (m_min > m_max) throw ValidationError("no m <= m_max satisfies n < 2^m");
  const QSeries limit = pow(lambda_hauptmodul(2, known_through), n).truncated(known_through);
  std::vector<ConvergenceRow> rows;
  QSeries current = serre_trace({2, n, m_min}, known_through);
  for (long m = m_min; m <= m_max; ++m) {
    QSeries next = serre_trace({2, n, m + 1}, known_through);
    rows.push_back({m, series_val2(current - limit), series_val2(next - current)});
    current = std::move(next);
  }
  return rows;
}

bool SerreCell::ok() const {
  if (params.p != 2) return true;
  return lead_ok && closed_agrees && poly_agrees && bounds_ok;
}

SerreCell compute_cell(const SerreParams& params, long known_through, TraceFormula formula) {
  validate(params);
  SerreCell cell;
  cell.params = params;
  cell.known_through = known_through;
  cell.formula = formula;
  cell.series_trace = serre_trace(params, known_through, formula);
  if (params.p != 2) return cell;
  const long n = params.n, m = params.m;
  cell.series_closed = serre_closed(n, m, known_through);
  cell.poly_G = serre_poly(n, m);
  cell.series_poly = eval_poly(*cell.poly_G, known_through);
  for (long i = 0; i <= (1L << m); ++i) cell.coeffs_c.push_back(c_coeff(n, m, i));
  cell.closed_agrees = eq_through(cell.series_trace, *cell.series_closed, known_through);
  cell.poly_agrees = eq_through(cell.series_trace, *cell.series_poly, known_through);
  cell.lead_ok = known_through > n && cell.series_trace.lead() == n &&
                 cell.series_trace.coeff(n) == Rat(ipow(15, 3 * (1L << m)));
  try {
    cell.bounds = coeff_val_bounds(n, m);
    cell.bounds_ok = true;
  } catch (const VerificationError&) {
    cell.bounds_ok = false;
  }
  return cell;
}

nlohmann::json factorization_json(const Int& x) {
  if (x == 0) return {{"sign", 0}, {"primes", nlohmann::json::object()}, {"cofactor", "0"}};
  const Factorization f = factor_small(x);
  nlohmann::json primes = nlohmann::json::object();
  for (const auto& [pr, e] : f.primes) primes[std::to_string(pr)] = e;
  return {{"sign", f.sign}, {"primes", primes}, {"cofactor", to_string(f.cofactor)}};
}

namespace {

nlohmann::json leading(const QSeries& s, long count) {
  auto arr = nlohmann::json::array();
  const long end = std::min(s.known_through(), s.lead() + count);
  for (long e = std::min(s.lead(), s.known_through()); e < end; ++e) arr.push_back(to_string(s.coeff(e)));
  return {{"lead", s.lead() >= s.known_through() ? nlohmann::json(nullptr) : nlohmann::json(s.lead())},
          {"known_through", s.known_through()},
          {"coeffs", arr}};
}

}  // namespace

nlohmann::json to_json(const SerreCell& cell) {
  nlohmann::json j;
  j["params"] = {{"p", cell.params.p}, {"n", cell.params.n}, {"m", cell.params.m}};
  j["known_through"] = cell.known_through;
  j["formula"] = formula_name(cell.formula);
  j["trace"] = leading(cell.series_trace, 10);
  if (cell.params.p == 2) {
    j["closed"] = leading(*cell.series_closed, 10);
    j["poly_eval"] = leading(*cell.series_poly, 10);
    j["poly_G"] = to_json(*cell.poly_G);
    auto cs = nlohmann::json::array();
    for (std::size_t i = 0; i < cell.coeffs_c.size(); ++i) {
      cs.push_back({{"i", i},
                    {"value", to_string(cell.coeffs_c[i])},
                    {"factorization", factorization_json(cell.coeffs_c[i])}});
    }
    j["c"] = cs;
    auto bs = nlohmann::json::array();
    for (const auto& b : cell.bounds) {
      bs.push_back({{"i", b.i},
                    {"val2", b.val.is_infinite() ? nlohmann::json("+inf") : nlohmann::json(b.val.value())},
                    {"bound", b.bound},
                    {"slack", b.slack ? nlohmann::json(*b.slack) : nlohmann::json(nullptr)}});
    }
    j["val2_bounds"] = bs;
    j["checks"] = {{"lead_is_15_pow", cell.lead_ok},
                   {"trace_eq_closed", cell.closed_agrees},
                   {"trace_eq_poly", cell.poly_agrees},
                   {"coeff_bounds", cell.bounds_ok}};
  }
  j["ok"] = cell.ok();
  return j;
}

}  // namespace haupt
