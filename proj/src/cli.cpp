#include "haupt/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "haupt/errors.hpp"
#include "haupt/heisenberg.hpp"
#include "haupt/mlde.hpp"
#include "haupt/serreseq.hpp"

namespace haupt::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  long prec = 0;
  std::string format = "text";
  std::string out_path;
  CLI::Option* prec_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c, bool with_prec = true) {
  if (with_prec) c.prec_opt = sub->add_option("--prec", c.prec, "known_through K (coefficients of q^0 .. q^(K-1))");
  sub->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--out", c.out_path, "write the report here instead of standard output");
}

long resolve_prec(const Common& c, std::ostream& err) {
  if (c.prec_opt != nullptr && c.prec_opt->count() > 0) {
    if (c.prec < 1) throw ValidationError("--prec must be at least 1");
    return c.prec;
  }
  if (c.format == "json") throw UsageError("--prec is required with --format json");
  err << "# precision not given; using K = " << kDefaultTextPrecision << "\n";
  return kDefaultTextPrecision;
}

void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path);
  if (!f) throw ValidationError("cannot write " + c.out_path);
  f << text;
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

const char* yes(bool b) { return b ? "yes" : "no"; }

nlohmann::json check_json(const IdentityCheck& c) {
  return {{"ok", c.ok}, {"first_failure", c.first_failure ? nlohmann::json(*c.first_failure) : nlohmann::json(nullptr)}};
}

std::string check_text(const IdentityCheck& c) {
  if (c.ok) return "holds";
  return "fails at q^" + (c.first_failure ? std::to_string(*c.first_failure) : std::string("?"));
}

nlohmann::json val_json(const Val2& v) { return v.is_infinite() ? nlohmann::json("+inf") : nlohmann::json(v.value()); }

std::vector<std::pair<long, long>> parse_eta_spec(const std::string& spec) {
  std::vector<std::pair<long, long>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("eta spec entries look like d:e, got '" + item + "'");
    try {
      std::size_t a = 0, b = 0;
      const long d = std::stol(item.substr(0, colon), &a);
      const long e = std::stol(item.substr(colon + 1), &b);
      if (a != colon || b != item.size() - colon - 1) throw std::invalid_argument("trailing");
      out.emplace_back(d, e);
    } catch (const std::logic_error&) {
      throw ValidationError("eta spec entries are integers d:e, got '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty eta spec");
  return out;
}

std::pair<long, long> parse_serre_target(const std::string& t) {
  const std::string prefix = "serre:";
  if (t.rfind(prefix, 0) != 0) throw ValidationError("targets look like serre:n,m, got '" + t + "'");
  const std::string rest = t.substr(prefix.size());
  const auto comma = rest.find(',');
  if (comma == std::string::npos) throw ValidationError("targets look like serre:n,m, got '" + t + "'");
  try {
    std::size_t a = 0, b = 0;
    const long n = std::stol(rest.substr(0, comma), &a);
    const long m = std::stol(rest.substr(comma + 1), &b);
    if (a != comma || b != rest.size() - comma - 1) throw std::invalid_argument("trailing");
    return {n, m};
  } catch (const std::logic_error&) {
    throw ValidationError("targets look like serre:n,m, got '" + t + "'");
  }
}

Int int_pow(long b, long e) {
  Int r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

// ---------------------------------------------------------------------------

struct QexpArgs {
  std::string name;
  int k = 0;
  long p = 2;
  std::string spec;
  Common c;
};

int cmd_qexp(const QexpArgs& a, std::ostream& out, std::ostream& err) {
  const long K = resolve_prec(a.c, err);
  nlohmann::json params = nlohmann::json::object();
  auto need_k = [&] {
    if (a.k == 0) throw ValidationError(a.name + " needs --k");
    params["k"] = a.k;
  };
  QSeries f = QSeries::zero(K);
  if (a.name == "E" || a.name == "G") {
    need_k();
    f = eisenstein(a.k, a.name == "E" ? Basis::E : Basis::G, K);
  } else if (a.name == "delta") {
    f = delta(K);
  } else if (a.name == "lambda") {
    params["p"] = a.p;
    f = lambda_hauptmodul(a.p, K);
  } else if (a.name == "e_star") {
    need_k();
    params["p"] = a.p;
    f = e_star(a.k, a.p, K);
  } else if (a.name == "eta_quotient") {
    if (a.spec.empty()) throw ValidationError("eta_quotient needs --spec d:e,...");
    params["spec"] = a.spec;
    f = eta_quotient(parse_eta_spec(a.spec), K);
  } else if (a.name == "script_E4") {
    f = script_e4(K);
  } else if (a.name == "j_inv") {
    f = j_invariant(K);
  } else {
    throw ValidationError("unknown expansion '" + a.name + "'");
  }
  if (a.c.format == "json") {
    emit(a.c, out, json_text({{"name", a.name}, {"params", params}, {"series", to_json(f)}}));
  } else {
    emit(a.c, out, render_text(f) + "\n");
  }
  return kPass;
}

// ---------------------------------------------------------------------------

struct SerreArgs {
  long n = 0, m = 0, p = 2;
  std::string formula = "trace-general";
  Common c;
};

int cmd_serre(const SerreArgs& a, std::ostream& out, std::ostream& err) {
  const SerreParams params{a.p, a.n, a.m};
  validate(params);
  const long K = resolve_prec(a.c, err);
  const TraceFormula formula = a.formula == "trace-delta" ? TraceFormula::delta : TraceFormula::general;
  const SerreCell cell = compute_cell(params, K, formula);
  if (a.c.format == "json") {
    emit(a.c, out, json_text(to_json(cell)));
  } else {
    std::ostringstream s;
    s << "serre p=" << a.p << " n=" << a.n << " m=" << a.m << " K=" << K << " formula=" << formula_name(formula) << "\n";
    s << "trace   " << render_text(cell.series_trace, 6) << "\n";
    if (a.p == 2) {
      s << "closed  " << render_text(*cell.series_closed, 6) << "\n";
      s << "poly    " << render_text(*cell.series_poly, 6) << "\n";
      s << "C = coefficient of q^" << a.n << " = " << to_string(cell.series_trace.coeff(a.n)) << "\n";
      s << "i  val2(c_i)  bound  slack\n";
      for (const auto& b : cell.bounds)
        s << b.i << "  " << b.val.to_string() << "  " << b.bound << "  "
          << (b.slack ? std::to_string(*b.slack) : std::string("-")) << "\n";
      s << "lead is 15^(3 2^m): " << yes(cell.lead_ok) << "\n";
      s << "trace = closed: " << yes(cell.closed_agrees) << "\n";
      s << "trace = poly: " << yes(cell.poly_agrees) << "\n";
      s << "c bounds: " << yes(cell.bounds_ok) << "\n";
    }
    s << (cell.ok() ? "PASS" : "FAIL") << "\n";
    emit(a.c, out, s.str());
  }
  return cell.ok() ? kPass : kVerificationFailure;
}

// ---------------------------------------------------------------------------

struct MldeArgs {
  long n = 0, m = 0, p = 2;
  int degree = 3;
  std::string basis = "M";
  std::string target;
  Common c;
};

int cmd_verify_limit(const MldeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n < 0) throw ValidationError("--n must be >= 0");
  const long K = resolve_prec(a.c, err);
  const auto r = verify_limit_mlde(a.n, K);
  if (a.c.format == "json") {
    emit(a.c, out,
         json_text({{"n", a.n},
                    {"known_through", K},
                    {"identity", check_json(r.identity)},
                    {"weight_shift", check_json(r.weight_shift)},
                    {"ok", r.ok()}}));
  } else {
    std::ostringstream s;
    s << "limit equation n=" << a.n << " K=" << K << "\n";
    s << "D^3 F identity: " << check_text(r.identity) << "\n";
    s << "weight shift: " << check_text(r.weight_shift) << "\n";
    s << (r.ok() ? "PASS" : "FAIL") << "\n";
    emit(a.c, out, s.str());
  }
  return r.ok() ? kPass : kVerificationFailure;
}

int cmd_verify_serre(const MldeArgs& a, std::ostream& out, std::ostream& err) {
  validate(SerreParams{2, a.n, a.m});
  const long K = resolve_prec(a.c, err);
  const auto r = verify_serre_mlde(a.n, a.m, K);
  if (a.c.format == "json") {
    emit(a.c, out,
         json_text({{"n", a.n},
                    {"m", a.m},
                    {"known_through", K},
                    {"equation", to_json(r.equation)},
                    {"sum", check_json(r.sum)},
                    {"t1", check_json(r.t1)},
                    {"t2", check_json(r.t2)},
                    {"ok", r.ok()}}));
  } else {
    std::ostringstream s;
    s << "third-order equation n=" << a.n << " m=" << a.m << " K=" << K << " base weight " << r.equation.base_weight << "\n";
    s << "g_0 = " << to_json(r.equation.coeffs[0]).dump() << "\n";
    s << "g_1 = " << to_json(r.equation.coeffs[1]).dump() << "\n";
    s << "on Delta^n lambda_{n,m}: " << check_text(r.sum) << "\n";
    s << "on the lambda^n part: " << check_text(r.t1) << "\n";
    s << "on the U_2 part: " << check_text(r.t2) << "\n";
    s << (r.ok() ? "PASS" : "FAIL") << "\n";
    emit(a.c, out, s.str());
  }
  return r.ok() ? kPass : kVerificationFailure;
}

int cmd_search(const MldeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.target.empty()) throw ValidationError("search needs --target serre:n,m");
  const auto [n, m] = parse_serre_target(a.target);
  validate(SerreParams{a.p, n, m});
  if (a.degree < 1) throw ValidationError("--degree must be at least 1");
  CoeffSpace space;
  if (a.basis == "M") {
    space = CoeffSpace::M;
  } else if (a.basis == "Mprime" || a.basis == "M'") {
    space = CoeffSpace::Mprime;
  } else {
    throw ValidationError("--basis is M or Mprime, got '" + a.basis + "'");
  }
  const long K = resolve_prec(a.c, err);
  const int weight = static_cast<int>(12 * int_pow(a.p, m).get_si() + 12 * n);
  QSeries f = serre_trace({a.p, n, m}, K);
  if (n > 0) f = (pow(delta(K), n) * f).truncated(K);
  const auto r = mlde_search(f, weight, a.degree, space);
  const bool bad = r.found && !r.reverified;
  if (a.c.format == "json") {
    nlohmann::json j = to_json(r);
    j["target"] = {{"name", "serre"}, {"p", a.p}, {"n", n}, {"m", m}, {"weight", weight}, {"known_through", K}};
    emit(a.c, out, json_text(j));
  } else {
    std::ostringstream s;
    s << "search: Delta^" << n << " lambda_{" << n << "," << m << "} (p=" << a.p << "), weight " << weight << ", degree "
      << a.degree << ", coefficients in " << coeff_space_name(space) << ", K=" << K << "\n";
    s << "equations " << r.equations << ", unknowns " << r.unknowns << ", rank " << r.rank << ", augmented rank "
      << r.augmented_rank << "\n";
    if (r.found) {
      s << "found (solution space dimension " << r.solution_dim << ", re-verified: " << yes(r.reverified) << ")\n";
      for (std::size_t i = 0; i < r.found->coeffs.size(); ++i)
        s << "g_" << i << " = " << to_json(r.found->coeffs[i]).dump() << "\n";
    } else {
      s << "inconsistent: rank " << r.rank << " < augmented rank " << r.augmented_rank << "\n";
    }
    s << "non-monic probe: lead weight " << r.nonmonic_lead_weight << ", " << r.nonmonic_unknowns
      << " unknowns, kernel dimension " << r.nonmonic_kernel_dim << "\n";
    emit(a.c, out, s.str());
  }
  return bad ? kVerificationFailure : kPass;
}

int cmd_indicial(const MldeArgs& a, std::ostream& out) {
  validate(SerreParams{2, a.n, a.m});
  const auto d = indicial_roots(serre_mlde(a.n, a.m));
  const Rat half = make_rat(3, 2) * Rat(int_pow(2, a.m)) + make_rat(a.n, 2);
  std::vector<Rat> want{Rat(2 * a.n), half, Rat(half + make_rat(1, 2))};
  std::sort(want.begin(), want.end());
  const bool ok = d.roots == want;
  if (a.c.format == "json") {
    auto rs = nlohmann::json::array(), ps = nlohmann::json::array(), ws = nlohmann::json::array();
    for (const auto& r : d.roots) rs.push_back(to_string(r));
    for (const auto& c : d.polynomial) ps.push_back(to_string(c));
    for (const auto& r : want) ws.push_back(to_string(r));
    emit(a.c, out, json_text({{"n", a.n}, {"m", a.m}, {"polynomial", ps}, {"roots", rs}, {"expected", ws}, {"ok", ok}}));
  } else {
    std::ostringstream s;
    s << "indicial roots n=" << a.n << " m=" << a.m << ":";
    for (const auto& r : d.roots) s << " " << to_string(r);
    s << "\nexpected:";
    for (const auto& r : want) s << " " << to_string(r);
    s << "\n" << (ok ? "PASS" : "FAIL") << "\n";
    emit(a.c, out, s.str());
  }
  return ok ? kPass : kVerificationFailure;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  long n_max = 0, m_max = 0;
  Common c;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n_max < 1) throw ValidationError("--n-max must be at least 1");
  if (a.m_max < 1 || a.m_max > 5) throw ValidationError("--m-max must lie in 1..5");
  if (a.n_max >= (1L << a.m_max)) throw ValidationError("--n-max must be below 2^m-max");
  const long K = resolve_prec(a.c, err);

  // Throws VerificationError naming (n, m, i) on the first broken bound.
  const auto certs = overconvergence_certificate(a.n_max, a.m_max);

  bool all_ok = true;
  nlohmann::json cells = nlohmann::json::array();
  std::ostringstream s;
  s << "certify n <= " << a.n_max << ", m <= " << a.m_max << ", K = " << K << "\n";
  s << "n m  serre  val2(v)  bound  F_S(v)=poly  F_S(v)=lambda\n";
  for (const auto& cert : certs) {
    const SerreCell cell = compute_cell({2, cert.n, cert.m}, K);
    const bool series_eq = eq_through(eval_poly(character_of(v_square(cert.n, cert.m)), K), cell.series_trace, K);
    const bool ok = cell.ok() && cert.ok() && series_eq;
    all_ok = all_ok && ok;
    cells.push_back({{"n", cert.n},
                     {"m", cert.m},
                     {"serre", {{"lead_is_15_pow", cell.lead_ok},
                                {"trace_eq_closed", cell.closed_agrees},
                                {"trace_eq_poly", cell.poly_agrees},
                                {"coeff_bounds", cell.bounds_ok}}},
                     {"certificate", to_json(cert)},
                     {"character_eq_lambda", series_eq},
                     {"ok", ok}});
    s << cert.n << " " << cert.m << "  " << (cell.ok() ? "ok" : "FAIL") << "  " << cert.val.to_string() << "  " << cert.bound
      << "  " << yes(cert.character_ok) << "  " << yes(series_eq) << "\n";
  }

  // Convergence diagnostics, reported but not asserted.
  nlohmann::json conv = nlohmann::json::array();
  s << "n m  val2(lambda_{n,m} - lambda^n)  val2(v_{n,m+1} - v_{n,m})\n";
  for (long n = 1; n <= a.n_max; ++n) {
    const auto lam = convergence_report(n, a.m_max, K);
    const auto st = cauchy_report(n, a.m_max);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < lam.size() && i < st.size(); ++i) {
      rows.push_back({{"m", lam[i].m}, {"lambda_to_limit", val_json(lam[i].to_limit.value)}, {"state_step", val_json(st[i].step)}});
      s << n << " " << lam[i].m << "  " << lam[i].to_limit.value.to_string() << "  " << st[i].step.to_string() << "\n";
    }
    conv.push_back({{"n", n}, {"rows", rows}});
  }
  s << (all_ok ? "PASS" : "FAIL") << "\n";

  if (a.c.format == "json") {
    emit(a.c, out,
         json_text({{"grid", {{"n_max", a.n_max}, {"m_max", a.m_max}, {"known_through", K}}},
                    {"cells", cells},
                    {"convergence", conv},
                    {"ok", all_ok}}));
  } else {
    emit(a.c, out, s.str());
  }
  return all_ok ? kPass : kVerificationFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Serre's 2-adic sequences, their MLDEs and Heisenberg pre-images", "hauptmodul"};
  app.require_subcommand(1);

  QexpArgs qa;
  auto* qexp = app.add_subcommand("qexp", "print a q-expansion");
  qexp->add_option("name", qa.name, "E, G, delta, lambda, e_star, eta_quotient, script_E4, j_inv")
      ->required()
      ->check(CLI::IsMember({"E", "G", "delta", "lambda", "e_star", "eta_quotient", "script_E4", "j_inv"}));
  qexp->add_option("--k", qa.k, "weight");
  qexp->add_option("--p", qa.p, "prime");
  qexp->add_option("--spec", qa.spec, "eta quotient as d:e,d:e,...");
  add_common(qexp, qa.c);

  SerreArgs sa;
  auto* serre = app.add_subcommand("serre", "one cell of Serre's sequence");
  serre->add_option("--n", sa.n)->required();
  serre->add_option("--m", sa.m)->required();
  serre->add_option("--p", sa.p);
  serre->add_option("--formula", sa.formula)->check(CLI::IsMember({"trace-general", "trace-delta"}));
  add_common(serre, sa.c);

  MldeArgs ma;
  auto* mlde = app.add_subcommand("mlde", "modular linear differential equations");
  mlde->require_subcommand(1);
  auto* vl = mlde->add_subcommand("verify-limit", "limit equation for Delta^n lambda^n");
  vl->add_option("--n", ma.n)->required();
  add_common(vl, ma.c);
  auto* vs = mlde->add_subcommand("verify-serre", "third-order equation for Delta^n lambda_{n,m}");
  vs->add_option("--n", ma.n)->required();
  vs->add_option("--m", ma.m)->required();
  add_common(vs, ma.c);
  auto* se = mlde->add_subcommand("search", "solve for a monic equation");
  se->add_option("--target", ma.target, "serre:n,m")->required();
  se->add_option("--p", ma.p);
  se->add_option("--degree", ma.degree);
  se->add_option("--basis", ma.basis, "M or Mprime");
  add_common(se, ma.c);
  auto* ind = mlde->add_subcommand("indicial", "indicial roots of the third-order equation");
  ind->add_option("--n", ma.n)->required();
  ind->add_option("--m", ma.m)->required();
  add_common(ind, ma.c, false);

  CertifyArgs ca;
  auto* certify = app.add_subcommand("certify", "run the whole pipeline on a grid");
  certify->add_option("--n-max", ca.n_max)->required();
  certify->add_option("--m-max", ca.m_max)->required();
  add_common(certify, ca.c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (const char* dir = std::getenv("HAUPTMODUL_CACHE_DIR"); dir != nullptr && *dir != '\0') {
    set_cache_directory(std::filesystem::path(dir));
  }

  try {
    if (*qexp) return cmd_qexp(qa, out, err);
    if (*serre) return cmd_serre(sa, out, err);
    if (*vl) return cmd_verify_limit(ma, out, err);
    if (*vs) return cmd_verify_serre(ma, out, err);
    if (*se) return cmd_search(ma, out, err);
    if (*ind) return cmd_indicial(ma, out);
    if (*certify) return cmd_certify(ca, out, err);
    err << "error: no command\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PrecisionError& e) {
    err << "precision error: " << e.what() << "\n";
    return kPrecision;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << "\n";
    return kVerificationFailure;
  }
}

}  // namespace haupt::cli
