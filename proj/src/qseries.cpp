#include "haupt/qseries.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

namespace haupt {

long prec_add(long a, long b) {
  if (a >= QSeries::kExact || b >= QSeries::kExact) return QSeries::kExact;
  return a + b;
}

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

std::atomic<MulKernel> g_default_kernel{MulKernel::integer_scaled};

// out[e] = sum_{i+j=e} a[i] b[j] for e < n.
std::vector<Rat> convolve_schoolbook(std::span<const Rat> a, std::span<const Rat> b, std::size_t n) {
  std::vector<Rat> out(n);
  Rat t;
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i] == 0) continue;
    const std::size_t jmax = std::min(b.size(), n - i);
    for (std::size_t j = 0; j < jmax; ++j) {
      if (b[j] == 0) continue;
      mpq_mul(t.get_mpq_t(), a[i].get_mpq_t(), b[j].get_mpq_t());
      mpq_add(out[i + j].get_mpq_t(), out[i + j].get_mpq_t(), t.get_mpq_t());
    }
  }
  return out;
}

Int common_denominator(std::span<const Rat> a) {
  Int l = 1;
  for (const auto& x : a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

std::vector<Int> scale_to_integers(std::span<const Rat> a, const Int& l) {
  std::vector<Int> out(a.size());
  Int t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_divexact(t.get_mpz_t(), l.get_mpz_t(), a[i].get_den_mpz_t());
    mpz_mul(out[i].get_mpz_t(), a[i].get_num_mpz_t(), t.get_mpz_t());
  }
  return out;
}

std::vector<Rat> convolve_integer_scaled(std::span<const Rat> a, std::span<const Rat> b,
                                         std::size_t n) {
  const Int la = common_denominator(a);
  const Int lb = common_denominator(b);
  const auto ia = scale_to_integers(a, la);
  const auto ib = scale_to_integers(b, lb);
  std::vector<Int> acc(n);
  for (std::size_t i = 0; i < ia.size() && i < n; ++i) {
    if (ia[i] == 0) continue;
    const std::size_t jmax = std::min(ib.size(), n - i);
    mpz_srcptr x = ia[i].get_mpz_t();
    for (std::size_t j = 0; j < jmax; ++j) {
      mpz_addmul(acc[i + j].get_mpz_t(), x, ib[j].get_mpz_t());
    }
  }
  const Int den = la * lb;
  std::vector<Rat> out(n);
  for (std::size_t e = 0; e < n; ++e) {
    if (acc[e] == 0) continue;
    out[e] = Rat(acc[e], den);
    out[e].canonicalize();
  }
  return out;
}

}  // namespace

void set_default_mul_kernel(MulKernel kernel) { g_default_kernel.store(kernel); }
MulKernel default_mul_kernel() { return g_default_kernel.load(); }

QSeries::QSeries(long lead, std::vector<Rat> coeffs, long known_through)
    : lead_(lead), known_(std::min(known_through, kExact)), coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  normalize();
}

void QSeries::normalize() {
  if (!is_exact()) {
    // Keep exactly the known coefficients.
    if (known_ <= lead_) {
      coeffs_.clear();
    } else if (stored_end() > known_) {
      coeffs_.resize(static_cast<std::size_t>(known_ - lead_));
    } else if (stored_end() < known_ && !coeffs_.empty()) {
      coeffs_.resize(static_cast<std::size_t>(known_ - lead_), Rat(0));
    }
  } else {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](const Rat& c) { return c != 0; });
  if (first == coeffs_.end()) {
    coeffs_.clear();
    lead_ = known_;
    return;
  }
  lead_ += static_cast<long>(first - coeffs_.begin());
  coeffs_.erase(coeffs_.begin(), first);
}

QSeries QSeries::exact(long lead, std::vector<Rat> coeffs) {
  return QSeries(lead, std::move(coeffs), kExact);
}

QSeries QSeries::monomial(const Rat& c, long exponent, long known_through) {
  if (known_through < kExact && exponent >= known_through) return zero(known_through);
  if (known_through >= kExact) return QSeries(exponent, {c}, kExact);
  std::vector<Rat> cs(static_cast<std::size_t>(known_through - exponent), Rat(0));
  cs[0] = c;
  return QSeries(exponent, std::move(cs), known_through);
}

QSeries QSeries::zero(long known_through) {
  QSeries z;
  z.known_ = std::min(known_through, kExact);
  z.lead_ = z.known_;
  return z;
}

Rat QSeries::coeff(long e) const {
  if (e >= known_) {
    throw PrecisionError("coefficient of q^" + std::to_string(e) + " requested but series is known only below q^" +
                         std::to_string(known_));
  }
  if (e < lead_ || e >= stored_end()) return 0;
  return coeffs_[static_cast<std::size_t>(e - lead_)];
}

QSeries QSeries::truncated(long k) const {
  if (k > known_) {
    throw PrecisionError("cannot truncate to q^" + std::to_string(k) + ": known only below q^" +
                         std::to_string(known_));
  }
  if (k >= kExact) return *this;
  std::vector<Rat> cs;
  if (k > lead_) {
    cs.reserve(static_cast<std::size_t>(k - lead_));
    for (long e = lead_; e < k; ++e) cs.push_back(coeff(e));
  }
  return QSeries(std::min(lead_, k), std::move(cs), k);
}

QSeries QSeries::shifted(long s) const {
  QSeries r = *this;
  if (is_zero()) {
    r.known_ = prec_add(known_, s);
    r.lead_ = r.known_;
    return r;
  }
  r.lead_ += s;
  r.known_ = prec_add(known_, s);
  return r;
}

QSeries QSeries::operator-() const {
  QSeries r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

QSeries& QSeries::operator+=(const QSeries& g) {
  const long k = std::min(known_, g.known_);
  if (g.is_zero() && is_zero()) {
    *this = zero(k);
    return *this;
  }
  long lo = std::min(lead_, g.lead_);
  long hi = (k >= kExact) ? std::max(stored_end(), g.stored_end()) : k;
  lo = std::min(lo, hi);
  std::vector<Rat> cs(static_cast<std::size_t>(hi - lo));
  for (long e = lo; e < hi; ++e) {
    Rat& out = cs[static_cast<std::size_t>(e - lo)];
    if (e >= lead_ && e < stored_end()) out += coeffs_[static_cast<std::size_t>(e - lead_)];
    if (e >= g.lead_ && e < g.stored_end()) out += g.coeffs_[static_cast<std::size_t>(e - g.lead_)];
  }
  *this = QSeries(lo, std::move(cs), k);
  return *this;
}

QSeries& QSeries::operator-=(const QSeries& g) { return *this += -g; }

QSeries& QSeries::operator*=(const Rat& c) {
  if (c == 0) {
    *this = zero(known_);
    return *this;
  }
  for (auto& x : coeffs_) x *= c;
  return *this;
}

QSeries& QSeries::operator*=(const QSeries& g) {
  *this = multiply(*this, g, default_mul_kernel());
  return *this;
}

QSeries operator*(const QSeries& f, const QSeries& g) { return multiply(f, g, default_mul_kernel()); }

QSeries multiply(const QSeries& f, const QSeries& g, MulKernel kernel) {
  const long k = std::min(prec_add(f.known_through(), g.lead()), prec_add(g.known_through(), f.lead()));
  if (f.is_zero() || g.is_zero()) return QSeries::zero(k);
  const long lead = f.lead() + g.lead();
  const long end = (k >= QSeries::kExact) ? f.stored_end() + g.stored_end() - 1 : k;
  if (end <= lead) return QSeries::zero(k);
  const auto n = static_cast<std::size_t>(end - lead);
  std::vector<Rat> cs = kernel == MulKernel::schoolbook
                            ? convolve_schoolbook(f.coeffs(), g.coeffs(), n)
                            : convolve_integer_scaled(f.coeffs(), g.coeffs(), n);
  return QSeries(lead, std::move(cs), k);
}

QSeries invert(const QSeries& f, std::optional<long> known_through) {
  if (f.is_zero()) throw ValidationError("cannot invert a series that is zero on its known range");
  const long v = f.lead();
  long k = prec_add(f.known_through(), -2 * v);
  if (f.is_exact() && f.coeffs().size() == 1) {
    QSeries r = QSeries::monomial(1 / f.coeffs()[0], -v);
    return known_through ? r.truncated(std::min(*known_through, r.known_through())) : r;
  }
  if (known_through) k = std::min(k, *known_through);
  if (k >= QSeries::kExact) {
    throw ValidationError("inverse of an exact non-monomial series needs a precision cap");
  }
  const long n = k + v;  // number of coefficients from exponent -v
  if (n <= 0) return QSeries::zero(k);
  const auto& a = f.coeffs();
  const Rat inv0 = 1 / a[0];
  std::vector<Rat> g(static_cast<std::size_t>(n));
  g[0] = inv0;
  Rat s, t;
  for (long i = 1; i < n; ++i) {
    s = 0;
    const long imax = std::min<long>(i, static_cast<long>(a.size()) - 1);
    for (long j = 1; j <= imax; ++j) {
      if (a[j] == 0) continue;
      mpq_mul(t.get_mpq_t(), a[j].get_mpq_t(), g[i - j].get_mpq_t());
      s += t;
    }
    g[i] = -s * inv0;
  }
  return QSeries(-v, std::move(g), k);
}

QSeries pow(const QSeries& f, long e, std::optional<long> known_through) {
  if (e == 0) return QSeries::one();
  if (e < 0) return pow(invert(f, known_through), -e);
  QSeries base = f;
  QSeries result = QSeries::one();
  bool first = true;
  while (e > 0) {
    if (e & 1) {
      result = first ? base : result * base;
      first = false;
    }
    e >>= 1;
    if (e > 0) base = base * base;
  }
  if (known_through && *known_through < result.known_through()) return result.truncated(*known_through);
  return result;
}

QSeries theta(const QSeries& f) {
  std::vector<Rat> cs = f.coeffs();
  for (std::size_t i = 0; i < cs.size(); ++i) cs[i] *= f.lead() + static_cast<long>(i);
  return QSeries(f.lead(), std::move(cs), f.known_through());
}

QSeries u_p(const QSeries& f, long p) {
  if (p < 2) throw ValidationError("U_p needs p >= 2");
  const long k = f.is_exact() ? QSeries::kExact : ceil_div(f.known_through(), p);
  if (f.is_zero()) return QSeries::zero(k);
  const long lo = ceil_div(f.lead(), p);
  const long hi = f.is_exact() ? floor_div(f.stored_end() - 1, p) + 1 : k;
  std::vector<Rat> cs;
  for (long i = lo; i < hi; ++i) {
    const long e = p * i;
    cs.push_back(e < f.stored_end() ? f.coeffs()[static_cast<std::size_t>(e - f.lead())] : Rat(0));
  }
  return QSeries(lo, std::move(cs), k);
}

QSeries v_p(const QSeries& f, long p) {
  if (p < 1) throw ValidationError("V_p needs p >= 1");
  const long k = f.is_exact() ? QSeries::kExact : p * (f.known_through() - 1) + 1;
  if (f.is_zero()) return QSeries::zero(k);
  const long lo = p * f.lead();
  const long hi = f.is_exact() ? p * (f.stored_end() - 1) + 1 : k;
  std::vector<Rat> cs(static_cast<std::size_t>(hi - lo));
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    const long e = p * static_cast<long>(i);
    if (e < hi - lo) cs[static_cast<std::size_t>(e)] = f.coeffs()[i];
  }
  return QSeries(lo, std::move(cs), k);
}

SeriesVal2 series_val2(const QSeries& f) {
  SeriesVal2 r;
  r.certified_below = f.known_through();
  r.truncated = !f.is_exact();
  for (const auto& c : f.coeffs()) r.value = min(r.value, val2(c));
  return r;
}

std::optional<long> first_difference(const QSeries& f, const QSeries& g, long k) {
  if (k > f.known_through() || k > g.known_through()) {
    throw PrecisionError("comparison through q^" + std::to_string(k) + " but series known only below q^" +
                         std::to_string(std::min(f.known_through(), g.known_through())));
  }
  const long lo = std::min(f.lead(), g.lead());
  for (long e = lo; e < k; ++e) {
    if (f.coeff(e) != g.coeff(e)) return e;
  }
  return std::nullopt;
}

bool eq_through(const QSeries& f, const QSeries& g, long k) { return !first_difference(f, g, k).has_value(); }

std::string render_text(const QSeries& f, std::optional<long> max_terms) {
  std::ostringstream os;
  bool first = true;
  long shown = 0;
  bool elided = false;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    const Rat& c = f.coeffs()[i];
    if (c == 0) continue;
    if (max_terms && shown == *max_terms) {
      elided = true;
      break;
    }
    const long e = f.lead() + static_cast<long>(i);
    const bool neg = sgn(c) < 0;
    const Rat a = abs(c);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    ++shown;
    std::string mag = is_integer(a) ? to_string(a) : "(" + to_string(a) + ")";
    if (e == 0) {
      os << to_string(a);
      continue;
    }
    if (a != 1) os << mag;
    os << "q";
    if (e != 1) os << "^" << e;
  }
  if (elided) os << (first ? "..." : " + ...");
  if (!f.is_exact()) {
    if (!first || elided) os << " + ";
    os << "O(q^" << f.known_through() << ")";
  } else if (first) {
    os << "0";
  }
  return os.str();
}

nlohmann::json to_json(const QSeries& f) {
  nlohmann::json j;
  j["lead"] = f.lead() >= QSeries::kExact ? nlohmann::json(nullptr) : nlohmann::json(f.lead());
  j["known_through"] = f.is_exact() ? nlohmann::json(nullptr) : nlohmann::json(f.known_through());
  auto arr = nlohmann::json::array();
  for (const auto& c : f.coeffs()) arr.push_back(to_string(c));
  j["coeffs"] = std::move(arr);
  return j;
}

QSeries qseries_from_json(const nlohmann::json& j) {
  try {
    const long k = j.at("known_through").is_null() ? QSeries::kExact : j.at("known_through").get<long>();
    const auto& arr = j.at("coeffs");
    if (arr.empty()) return QSeries::zero(k);
    const long lead = j.at("lead").get<long>();
    std::vector<Rat> cs;
    for (const auto& c : arr) cs.push_back(parse_rat(c.get<std::string>()));
    return QSeries(lead, std::move(cs), k);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed series JSON: ") + e.what());
  }
}

}  // namespace haupt
