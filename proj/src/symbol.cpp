#include "nphi/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace nphi {

double trigamma(double x) {
  if (x <= 0.0) throw std::invalid_argument("trigamma: x must be positive");
  double acc = 0.0;
  while (x < 30.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double r = 1.0 / x;
  const double r2 = r * r;
  // 1/x + 1/(2x^2) + 1/(6x^3) - 1/(30x^5) + 1/(42x^7) - 1/(30x^9)
  double s = r + 0.5 * r2 + r * r2 * (1.0 / 6.0 - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 / 30.0)));
  return acc + s;
}

namespace {

std::vector<cplx> strip_trailing(std::vector<cplx> c) {
  while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  return c;
}

// One Blaschke factor (w - mu)/(1 - conj(mu) w) expanded through `order`:
// c_0 = -mu, c_k = conj(mu)^{k-1} (1 - |mu|^2).
std::vector<cplx> blaschke_factor_series(cplx mu, int order) {
  std::vector<cplx> c(static_cast<size_t>(order) + 1, cplx{0.0, 0.0});
  c[0] = -mu;
  const double defect = 1.0 - std::norm(mu);
  cplx pw{1.0, 0.0};
  for (int k = 1; k <= order; ++k) {
    c[static_cast<size_t>(k)] = pw * defect;
    pw *= std::conj(mu);
  }
  return c;
}

std::vector<cplx> series_mult(const std::vector<cplx>& a, const std::vector<cplx>& b, int order) {
  std::vector<cplx> out(static_cast<size_t>(order) + 1, cplx{0.0, 0.0});
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  for (int i = 0; i < na && i <= order; ++i) {
    if (a[static_cast<size_t>(i)] == cplx{0.0, 0.0}) continue;
    const int jmax = std::min(nb - 1, order - i);
    for (int j = 0; j <= jmax; ++j)
      out[static_cast<size_t>(i + j)] += a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
  }
  return out;
}

// Synthetic division of p by (w - r); p must vanish at r to working accuracy.
std::vector<cplx> deflate(const std::vector<cplx>& p, cplx r) {
  const int n = static_cast<int>(p.size()) - 1;
  std::vector<cplx> q(static_cast<size_t>(n), cplx{0.0, 0.0});
  cplx carry = p[static_cast<size_t>(n)];
  for (int k = n - 1; k >= 0; --k) {
    q[static_cast<size_t>(k)] = carry;
    carry = p[static_cast<size_t>(k)] + r * carry;
  }
  return q;  // remainder `carry` is discarded
}

double boundary_min_refined(const Symbol& sym, int samples, bool maximize = false) {
  const double two_pi = 2.0 * std::numbers::pi;
  double best = maximize ? -1.0 : std::numeric_limits<double>::max();
  int best_k = 0;
  for (int k = 0; k < samples; ++k) {
    const double th = two_pi * k / samples;
    const double v = std::abs(sym.eval(std::polar(1.0, th)));
    if (maximize ? (v > best) : (v < best)) {
      best = v;
      best_k = k;
    }
  }
  // golden-section refinement around the grid argmin/argmax
  const double h = two_pi / samples;
  double a = two_pi * best_k / samples - h;
  double b = two_pi * best_k / samples + h;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double th) {
    const double v = std::abs(sym.eval(std::polar(1.0, th)));
    return maximize ? -v : v;
  };
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f(d);
    }
  }
  const double v = std::min(fc, fd);
  return maximize ? std::max(best, -v) : std::min(best, v);
}

}  // namespace

Symbol::Symbol(TaylorPoly p) : rep_(std::move(p)) {
  auto& c = std::get<TaylorPoly>(rep_).coeffs;
  c = strip_trailing(std::move(c));
  if (c.empty()) throw std::invalid_argument("Symbol: zero polynomial is not a valid symbol");
}

Symbol::Symbol(FiniteBlaschke b) : rep_(std::move(b)) {
  const auto& f = std::get<FiniteBlaschke>(rep_);
  for (const cplx& mu : f.zeros) {
    if (std::abs(mu) >= 1.0 - kBlaschkeMargin)
      throw std::invalid_argument("Symbol: Blaschke zero too close to the unit circle");
  }
  if (std::abs(std::abs(f.phase) - 1.0) >= kUnimodularTol)
    throw std::invalid_argument("Symbol: Blaschke phase must be unimodular");
}

Symbol Symbol::taylor(std::vector<cplx> coeffs) { return Symbol(TaylorPoly{std::move(coeffs)}); }

Symbol Symbol::blaschke(std::vector<cplx> zeros, cplx phase) {
  return Symbol(FiniteBlaschke{std::move(zeros), phase});
}

const TaylorPoly& Symbol::as_taylor() const {
  if (!is_taylor()) throw std::logic_error("Symbol: not a polynomial");
  return std::get<TaylorPoly>(rep_);
}

const FiniteBlaschke& Symbol::as_blaschke() const {
  if (!is_blaschke()) throw std::logic_error("Symbol: not a Blaschke product");
  return std::get<FiniteBlaschke>(rep_);
}

cplx Symbol::eval(cplx w) const {
  if (std::abs(w) > 1.0 + 1e-12)
    throw std::invalid_argument("Symbol::eval: |w| > 1 is outside the closed disk");
  if (is_taylor()) {
    const auto& c = as_taylor().coeffs;
    cplx acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * w + *it;
    return acc;
  }
  const auto& b = as_blaschke();
  cplx acc = b.phase;
  for (const cplx& mu : b.zeros) acc *= (w - mu) / (cplx{1.0, 0.0} - std::conj(mu) * w);
  return acc;
}

std::vector<cplx> Symbol::taylor_coeffs(int order) const {
  if (order < 0) throw std::invalid_argument("taylor_coeffs: order must be >= 0");
  if (is_taylor()) {
    const auto& c = as_taylor().coeffs;
    std::vector<cplx> out(static_cast<size_t>(order) + 1, cplx{0.0, 0.0});
    for (size_t k = 0; k < c.size() && k <= static_cast<size_t>(order); ++k) out[k] = c[k];
    return out;
  }
  const auto& b = as_blaschke();
  std::vector<cplx> out(static_cast<size_t>(order) + 1, cplx{0.0, 0.0});
  out[0] = b.phase;
  for (const cplx& mu : b.zeros) out = series_mult(out, blaschke_factor_series(mu, order), order);
  return out;
}

int Symbol::exact_degree() const {
  if (is_taylor()) return static_cast<int>(as_taylor().coeffs.size()) - 1;
  const auto& b = as_blaschke();
  for (const cplx& mu : b.zeros)
    if (std::abs(mu) > 0.0) return -1;
  return static_cast<int>(b.zeros.size());  // c * w^n
}

int Symbol::effective_degree(int max_degree, double rel_tol) const {
  const int ed = exact_degree();
  if (ed >= 0) return std::min(ed, max_degree);
  const auto c = taylor_coeffs(max_degree);
  double m = 0.0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  int d = 0;
  for (int k = 0; k <= max_degree; ++k)
    if (std::abs(c[static_cast<size_t>(k)]) > rel_tol * m) d = k;
  return d;
}

std::string Symbol::describe() const {
  std::ostringstream os;
  if (is_taylor()) {
    os << "taylor[";
    for (const auto& c : as_taylor().coeffs) os << c << ",";
    os << "]";
  } else {
    os << "blaschke[";
    for (const auto& z : as_blaschke().zeros) os << z << ",";
    os << " phase=" << as_blaschke().phase << "]";
  }
  return os.str();
}

std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs_in) {
  std::vector<cplx> c = coeffs_in;
  // drop numerically-zero leading coefficients
  double m = 0.0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  if (m == 0.0) throw std::invalid_argument("poly_roots: zero polynomial");
  while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * m) c.pop_back();

  std::vector<cplx> roots;
  // factor out w^k: trailing zeros on the constant side are roots at 0
  size_t k0 = 0;
  while (k0 < c.size() - 1 && std::abs(c[k0]) <= 1e-300) ++k0;
  for (size_t k = 0; k < k0; ++k) roots.emplace_back(0.0, 0.0);
  c.erase(c.begin(), c.begin() + static_cast<long>(k0));

  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return roots;

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<size_t>(i)] / c[static_cast<size_t>(n)];

  // one pass of two-sided diagonal balancing (powers of 2)
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int i = 0; i < n; ++i) {
      double rnorm = 0.0, cnorm = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) {
          rnorm += std::abs(comp(i, j));
          cnorm += std::abs(comp(j, i));
        }
      }
      if (rnorm == 0.0 || cnorm == 0.0) continue;
      double f = 1.0;
      while (cnorm * f < rnorm / (2.0 * f)) f *= 2.0;
      while (cnorm * f > rnorm * 2.0 / f) f /= 2.0;
      if (f != 1.0) {
        comp.col(i) *= f;
        comp.row(i) /= f;
      }
    }
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("poly_roots: eigensolver failed");
  for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

InnerOuterFactors inner_outer_factor(const Symbol& sym) {
  if (sym.is_blaschke()) {
    FiniteBlaschke b = sym.as_blaschke();
    return InnerOuterFactors{FiniteBlaschke{b.zeros, cplx{1.0, 0.0}},
                             TaylorPoly{{b.phase}}};
  }
  const auto& p = sym.as_taylor().coeffs;
  const auto roots = poly_roots(p);
  std::vector<cplx> inside;
  for (const cplx& r : roots) {
    const double ar = std::abs(r);
    if (std::abs(ar - 1.0) <= kCircleGuard)
      throw std::runtime_error("inner_outer_factor: boundary-root, factorization ill-conditioned");
    if (ar < 1.0) inside.push_back(r);
  }
  std::vector<cplx> q = p;
  for (const cplx& mu : inside) q = deflate(q, mu);
  // h = (phi / prod (w - mu)) * prod (1 - conj(mu) w)
  for (const cplx& mu : inside) {
    std::vector<cplx> lin{cplx{1.0, 0.0}, -std::conj(mu)};
    q = series_mult(q, lin, static_cast<int>(q.size()));
    q = strip_trailing(std::move(q));
  }
  InnerOuterFactors out{FiniteBlaschke{inside, cplx{1.0, 0.0}}, TaylorPoly{q}};

  // product must reproduce phi
  Symbol bsym{out.blaschke_part};
  Symbol hsym{out.outer_part};
  double max_mu = 0.0;
  for (const cplx& mu : inside) max_mu = std::max(max_mu, std::abs(mu));
  const int degp = static_cast<int>(p.size()) - 1;
  int expand = degp;
  if (max_mu > 0.0) {
    const int extra = static_cast<int>(std::ceil(std::log(1e-13) / std::log(max_mu)));
    expand = degp + std::min(extra, 5000);
  }
  const auto bc = bsym.taylor_coeffs(expand);
  const auto hc = hsym.taylor_coeffs(expand);
  const auto prod = series_mult(bc, hc, degp);
  for (int k = 0; k <= degp; ++k) {
    const cplx want = (k < static_cast<int>(p.size())) ? p[static_cast<size_t>(k)] : cplx{0.0, 0.0};
    if (std::abs(prod[static_cast<size_t>(k)] - want) > 1e-10)
      throw std::runtime_error("inner_outer_factor: product does not reproduce the symbol");
  }
  return out;
}

double alpha_inf(const Symbol& sym, int boundary_samples) {
  if (boundary_samples < 256) throw std::invalid_argument("alpha_inf: need >= 256 boundary samples");
  if (sym.is_blaschke()) return sym.as_blaschke().zeros.empty() ? 1.0 : 0.0;
  const auto roots = poly_roots(sym.as_taylor().coeffs);
  for (const cplx& r : roots)
    if (std::abs(r) < 1.0) return 0.0;
  return boundary_min_refined(sym, boundary_samples);
}

double gamma_liminf(const Symbol& sym, int boundary_samples) {
  if (sym.is_blaschke()) return 1.0;
  return boundary_min_refined(sym, boundary_samples);
}

double sup_norm(const Symbol& sym, int boundary_samples) {
  if (sym.is_blaschke()) return 1.0;
  return boundary_min_refined(sym, boundary_samples, /*maximize=*/true);
}

int zero_count(const Symbol& sym, cplx zeta) {
  if (std::abs(zeta) >= 1.0) throw std::invalid_argument("zero_count: |zeta| must be < 1");
  std::vector<cplx> num;
  if (sym.is_taylor()) {
    num = sym.as_taylor().coeffs;
    for (auto& v : num) v = -v;
    num[0] += zeta;
  } else {
    // zeta * prod(1 - conj(mu) w) - c * prod(w - mu)
    const auto& b = sym.as_blaschke();
    std::vector<cplx> den{cplx{1.0, 0.0}};
    std::vector<cplx> nmr{b.phase};
    for (const cplx& mu : b.zeros) {
      const int ord = static_cast<int>(den.size());
      den = series_mult(den, {cplx{1.0, 0.0}, -std::conj(mu)}, ord);
      nmr = series_mult(nmr, {-mu, cplx{1.0, 0.0}}, ord);
    }
    num.assign(std::max(den.size(), nmr.size()), cplx{0.0, 0.0});
    for (size_t k = 0; k < den.size(); ++k) num[k] += zeta * den[k];
    for (size_t k = 0; k < nmr.size(); ++k) num[k] -= nmr[k];
  }
  num = strip_trailing(std::move(num));
  if (num.empty()) throw std::runtime_error("zero_count: zeta - phi vanishes identically");
  if (num.size() == 1) return 0;
  int count = 0;
  for (const cplx& r : poly_roots(num)) {
    const double ar = std::abs(r);
    if (std::abs(ar - 1.0) <= kCircleGuard)
      throw std::runtime_error("zero_count: ill-posed count, root within the circle guard band");
    if (ar < 1.0) ++count;
  }
  return count;
}

cplx derivative_at_zero(const Symbol& sym) { return sym.taylor_coeffs(1)[1]; }

bool image_meets_disk(const Symbol& sym, int samples) {
  if (sym.is_blaschke()) return !sym.as_blaschke().zeros.empty();
  // radial-by-angular sample of the open disk
  const int nr = std::max(4, samples / 64);
  const int nt = std::max(16, samples / nr);
  for (int ir = 0; ir < nr; ++ir) {
    const double r = (ir + 0.5) / nr;
    for (int it = 0; it < nt; ++it) {
      const double th = 2.0 * std::numbers::pi * it / nt;
      if (std::abs(sym.eval(std::polar(r, th))) < 1.0 - 1e-9) return true;
    }
  }
  return false;
}

Symbol mobius_precompose(const Symbol& inner_sym, cplx alpha) {
  if (std::abs(alpha) >= 1.0) throw std::invalid_argument("mobius_precompose: |alpha| must be < 1");
  if (!inner_sym.is_blaschke())
    throw std::invalid_argument("mobius_precompose: closed-form composition needs a Blaschke symbol");
  const auto& b = inner_sym.as_blaschke();
  auto x = [&](cplx w) { return (alpha - w) / (cplx{1.0, 0.0} - std::conj(alpha) * w); };
  std::vector<cplx> zeros;
  cplx phase = b.phase;
  for (const cplx& mu : b.zeros) {
    zeros.push_back(x(mu));
    const cplx t = cplx{1.0, 0.0} - mu * std::conj(alpha);
    phase *= -t / std::conj(t);
  }
  return Symbol::blaschke(std::move(zeros), phase);
}

nlohmann::json symbol_to_json(const Symbol& sym) {
  nlohmann::json j;
  auto pair = [](cplx z) { return nlohmann::json::array({z.real(), z.imag()}); };
  if (sym.is_taylor()) {
    j["type"] = "taylor";
    auto arr = nlohmann::json::array();
    for (const auto& c : sym.as_taylor().coeffs) arr.push_back(pair(c));
    j["coeffs"] = arr;
  } else {
    j["type"] = "blaschke";
    auto arr = nlohmann::json::array();
    for (const auto& z : sym.as_blaschke().zeros) arr.push_back(pair(z));
    j["zeros"] = arr;
    j["phase"] = pair(sym.as_blaschke().phase);
  }
  return j;
}

Symbol symbol_from_json(const nlohmann::json& j) {
  auto as_cplx = [](const nlohmann::json& v) -> cplx {
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument("symbol json: complex entries are [re,im]");
    return cplx{v[0].get<double>(), v[1].get<double>()};
  };
  const std::string type = j.at("type").get<std::string>();
  if (type == "taylor") {
    std::vector<cplx> c;
    for (const auto& v : j.at("coeffs")) c.push_back(as_cplx(v));
    return Symbol::taylor(std::move(c));
  }
  if (type == "blaschke") {
    std::vector<cplx> z;
    for (const auto& v : j.at("zeros")) z.push_back(as_cplx(v));
    cplx phase{1.0, 0.0};
    if (j.contains("phase")) phase = as_cplx(j.at("phase"));
    return Symbol::blaschke(std::move(z), phase);
  }
  throw std::invalid_argument("symbol json: unknown type '" + type + "'");
}

}  // namespace nphi
