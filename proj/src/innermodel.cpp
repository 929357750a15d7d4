#include "nphi/innermodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nphi {

namespace {

std::vector<cplx> geometric_series(cplx ratio, int degree) {
  std::vector<cplx> c(static_cast<size_t>(degree) + 1);
  cplx p{1.0, 0.0};
  for (int k = 0; k <= degree; ++k) {
    c[static_cast<size_t>(k)] = p;
    p *= ratio;
  }
  return c;
}

Eigen::VectorXcd to_vec(const std::vector<cplx>& c) {
  Eigen::VectorXcd v(static_cast<long>(c.size()));
  for (size_t k = 0; k < c.size(); ++k) v(static_cast<long>(k)) = c[k];
  return v;
}

const Symbol& require_inner(const Symbol& sym) {
  if (!sym.is_blaschke())
    throw std::invalid_argument("innermodel: the symbol must be a finite Blaschke product");
  if (sym.as_blaschke().zeros.empty())
    throw std::invalid_argument("innermodel: constant inner symbols give a trivial quotient");
  return sym;
}

// Gauss-Legendre nodes/weights on [0, 1] by Newton on the Legendre recurrence.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<size_t>(n), 0.0);
  w.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[static_cast<size_t>(i)] = 0.5 * (t + 1.0);
    w[static_cast<size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

cplx poly_eval(const std::vector<cplx>& c, cplx z) {
  cplx acc{0.0, 0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<cplx> poly_derivative(const std::vector<cplx>& c) {
  if (c.size() <= 1) return {cplx{0.0, 0.0}};
  std::vector<cplx> d(c.size() - 1);
  for (size_t k = 1; k < c.size(); ++k) d[k - 1] = double(k) * c[k];
  return d;
}

Eigen::MatrixXcd poly_of_matrix(const std::vector<cplx>& c, const Eigen::MatrixXcd& A) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(A.rows(), A.cols());
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    out = out * A;
    out.diagonal().array() += *it;
  }
  return out;
}

}  // namespace

double ModelSpaceBasis::gram_defect() const {
  const int m = dim();
  double worst = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      const cplx g = lambdas[static_cast<size_t>(q)].dot(lambdas[static_cast<size_t>(p)]);
      const cplx want = (p == q) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      worst = std::max(worst, std::abs(g - want));
    }
  return worst;
}

ModelSpaceBasis takenaka_basis(const FiniteBlaschke& b, int degree) {
  if (b.zeros.empty()) throw std::invalid_argument("takenaka_basis: constant Blaschke product");
  ModelSpaceBasis out;
  out.blaschke = b;
  out.degree = degree;
  std::vector<cplx> zeros = b.zeros;
  std::stable_sort(zeros.begin(), zeros.end(),
                   [](cplx a, cplx c) { return std::abs(a) < std::abs(c); });
  std::vector<cplx> running{cplx{1.0, 0.0}};  // prod_{l<k} (w - mu_l)/(1 - conj(mu_l) w)
  for (size_t k = 0; k < zeros.size(); ++k) {
    const cplx mu = zeros[k];
    auto lk = series_multiply(running, geometric_series(std::conj(mu), degree), degree);
    const double scale = std::sqrt(1.0 - std::norm(mu));
    for (auto& v : lk) v *= scale;
    out.lambdas.push_back(to_vec(lk));
    running = series_multiply(running, Symbol::blaschke({mu}).taylor_coeffs(degree), degree);
  }
  return out;
}

std::pair<int, int> basis_E_grid(const Symbol& inner_sym, int j_max, double tail_tol) {
  require_inner(inner_sym);
  const auto& b = inner_sym.as_blaschke();
  const int m = static_cast<int>(b.zeros.size());
  double max_mu = 0.0;
  for (const auto& mu : b.zeros) max_mu = std::max(max_mu, std::abs(mu));
  const int I = j_max + 1;
  const int poly_deg = (m - 1) + j_max * m + 1;
  if (max_mu == 0.0) return {I, poly_deg};
  // rational tails of phi^j carry binomially delayed decay, so measure the
  // worst column profile (lambda_{m-1} phi^{j_max}) instead of guessing
  for (int D = poly_deg + 32;; D *= 2) {
    if (D > 1 << 20) throw std::runtime_error("basis_E_grid: zeros too close to the circle");
    const auto phi = inner_sym.taylor_coeffs(D);
    const ModelSpaceBasis tm = takenaka_basis(b, D);
    std::vector<cplx> s(static_cast<size_t>(D) + 1);
    for (int k = 0; k <= D; ++k) s[static_cast<size_t>(k)] = tm.lambdas.back()(k);
    for (int q = 0; q < j_max; ++q) s = series_multiply(s, phi, D);
    double tail = 0.0;
    int J = D;
    for (int k = D; k >= 0; --k) {
      tail += std::norm(s[static_cast<size_t>(k)]);
      if (tail > tail_tol * tail_tol) {
        J = k + 1;
        break;
      }
    }
    if (J <= (3 * D) / 4) return {I, J};
  }
}

namespace {

// lamphi[k][q] = lambda_k * phi^q, truncated at J
std::vector<std::vector<Eigen::VectorXcd>> lamphi_table(const ModelSpaceBasis& model,
                                                        const Symbol& sym, int max_power, int J) {
  const int m1 = model.dim();
  const auto phi = sym.taylor_coeffs(J);
  std::vector<std::vector<Eigen::VectorXcd>> lamphi(static_cast<size_t>(m1));
  for (int k = 0; k < m1; ++k) {
    std::vector<cplx> cur(static_cast<size_t>(J) + 1, cplx{0.0, 0.0});
    for (int j = 0; j <= J; ++j) cur[static_cast<size_t>(j)] = model.lambdas[static_cast<size_t>(k)](j);
    lamphi[static_cast<size_t>(k)].push_back(to_vec(cur));
    for (int q = 1; q <= max_power; ++q) {
      cur = series_multiply(cur, phi, J);
      lamphi[static_cast<size_t>(k)].push_back(to_vec(cur));
    }
  }
  return lamphi;
}

}  // namespace

SubspaceBasis basis_E(const ModelSpaceBasis& model, const Symbol& inner_sym, int j_max, int I,
                      int J, int guard, double norm_tol) {
  require_inner(inner_sym);
  if (I < j_max) throw std::invalid_argument("basis_E: need I >= j_max");
  if (model.degree < J) throw std::invalid_argument("basis_E: model series shorter than the grid");
  const int m1 = model.dim();
  const auto lamphi = lamphi_table(model, inner_sym, j_max, J);

  SubspaceBasis out;
  out.label = BasisLabel::Model;
  out.I = I;
  out.J = J;
  out.guard = guard;
  out.Q.resize((I + 1) * (J + 1), m1 * (j_max + 1));
  out.Q.setZero();
  int col = 0;
  for (int k = 0; k < m1; ++k)
    for (int j = 0; j <= j_max; ++j, ++col) {
      const double s = 1.0 / std::sqrt(double(j) + 1.0);
      for (int l = 0; l <= j; ++l)
        out.Q.block(l * (J + 1), col, J + 1, 1) = s * lamphi[static_cast<size_t>(k)][static_cast<size_t>(j - l)];
      out.column_j.push_back(j);
      const double n = out.Q.col(col).norm();
      if (std::abs(n - 1.0) > norm_tol)
        throw std::runtime_error("basis_E: truncation too small, column norm strays from 1");
    }
  out.note = "closed-form quotient basis";
  return out;
}

SubspaceBasis basis_X(const ModelSpaceBasis& model, const Symbol& inner_sym, int j_max, int I,
                      int J, int guard, double norm_tol) {
  require_inner(inner_sym);
  if (I < j_max + 1) throw std::invalid_argument("basis_X: need I >= j_max + 1");
  if (model.degree < J) throw std::invalid_argument("basis_X: model series shorter than the grid");
  const int m1 = model.dim();
  const auto lamphi = lamphi_table(model, inner_sym, j_max + 1, J);

  SubspaceBasis out;
  out.label = BasisLabel::WanderingZ;
  out.I = I;
  out.J = J;
  out.guard = guard;
  out.Q.resize((I + 1) * (J + 1), m1 * (j_max + 1));
  out.Q.setZero();
  int col = 0;
  for (int k = 0; k < m1; ++k)
    for (int j = 0; j <= j_max; ++j, ++col) {
      const double s = 1.0 / std::sqrt((j + 1.0) * (j + 2.0));
      for (int l = 0; l <= j; ++l)
        out.Q.block((l + 1) * (J + 1), col, J + 1, 1) =
            s * lamphi[static_cast<size_t>(k)][static_cast<size_t>(j - l)];
      out.Q.block(0, col, J + 1, 1) = -std::sqrt((j + 1.0) / (j + 2.0)) *
                                      lamphi[static_cast<size_t>(k)][static_cast<size_t>(j) + 1];
      out.column_j.push_back(j);
      const double n = out.Q.col(col).norm();
      if (std::abs(n - 1.0) > norm_tol)
        throw std::runtime_error("basis_X: truncation too small, column norm strays from 1");
    }
  out.note = "closed-form wandering basis";
  return out;
}

Eigen::MatrixXcd bergman_shift(int j_max) {
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(j_max + 1, j_max + 1);
  for (int j = 0; j < j_max; ++j) B(j + 1, j) = std::sqrt((j + 1.0) / (j + 2.0));
  return B;
}

double tensor_unitary_check(const Symbol& inner_sym, const SubspaceBasis& E, int j_max) {
  require_inner(inner_sym);
  const Eigen::MatrixXcd Sz = compress_shift('z', E).A;
  const int m1 = E.dim() / (j_max + 1);
  const Eigen::MatrixXcd B = bergman_shift(j_max);
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(E.dim(), E.dim());
  for (int k = 0; k < m1; ++k)
    K.block(k * (j_max + 1), k * (j_max + 1), j_max + 1, j_max + 1) = B;
  const Eigen::MatrixXcd Vint = E.interior_coords();
  return Eigen::MatrixXcd((Sz - K) * Vint).operatorNorm();
}

Eigen::MatrixXcd TensorOperator::dense() const {
  if (terms.empty()) return {};
  const long mk = terms.front().first.rows(), ma = terms.front().second.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(mk * ma, mk * ma);
  for (const auto& [K, A] : terms)
    for (long p = 0; p < mk; ++p)
      for (long q = 0; q < mk; ++q)
        if (K(p, q) != cplx{0.0, 0.0}) out.block(p * ma, q * ma, ma, ma) += K(p, q) * A;
  return out;
}

SwModel sw_model(const Symbol& inner_sym, const ModelSpaceBasis& model, int j_max) {
  require_inner(inner_sym);
  const int m1 = model.dim();
  const int D = model.degree;
  SwModel out;

  // S(phi): compression of multiplication by w to K_phi
  out.Sphi.resize(m1, m1);
  for (int q = 0; q < m1; ++q) {
    Eigen::VectorXcd wl = Eigen::VectorXcd::Zero(D + 1);
    wl.tail(D) = model.lambdas[static_cast<size_t>(q)].head(D);
    for (int p = 0; p < m1; ++p)
      out.Sphi(p, q) = model.lambdas[static_cast<size_t>(p)].dot(wl);
  }

  // u = coords of P_phi 1, v = coords of P_phi(conj(w) phi) = coords of T*_w phi
  out.u.resize(m1);
  for (int k = 0; k < m1; ++k) out.u(k) = std::conj(model.lambdas[static_cast<size_t>(k)](0));
  const auto phi_ext = inner_sym.taylor_coeffs(D + 1);
  Eigen::VectorXcd sphi(D + 1);
  for (int j = 0; j <= D; ++j) sphi(j) = phi_ext[static_cast<size_t>(j) + 1];
  out.v.resize(m1);
  for (int k = 0; k < m1; ++k) out.v(k) = model.lambdas[static_cast<size_t>(k)].dot(sphi);

  out.T0 = out.u * out.v.adjoint();

  const cplx phi0 = inner_sym.eval(cplx{0.0, 0.0});
  const Eigen::MatrixXcd B = bergman_shift(j_max);
  const Eigen::MatrixXcd lhs =
      Eigen::MatrixXcd::Identity(j_max + 1, j_max + 1) - std::conj(phi0) * B;
  const Eigen::MatrixXcd RB = lhs.triangularView<Eigen::Lower>().solve(B);

  out.op.terms.emplace_back(out.Sphi, Eigen::MatrixXcd::Identity(j_max + 1, j_max + 1));
  out.op.terms.emplace_back(out.T0, RB);
  return out;
}

double sw_model_cross_residual(const Symbol& inner_sym, const ModelSpaceBasis& model,
                               const SubspaceBasis& E, int j_max) {
  const SwModel m = sw_model(inner_sym, model, j_max);
  const Eigen::MatrixXcd Sw = compress_shift('w', E).A;
  const Eigen::MatrixXcd Vint = E.interior_coords();
  return Eigen::MatrixXcd((Sw - m.op.dense()) * Vint).operatorNorm();
}

namespace {

// Leading block of [X*, Y] for padded truncations of Bergman-side operators:
// entries with both indices <= J match the infinite commutator when the pad
// covers the band width.
Eigen::MatrixXcd padded_adjoint_commutator_block(const Eigen::MatrixXcd& Xpad,
                                                 const Eigen::MatrixXcd& Ypad, int J) {
  const Eigen::MatrixXcd C = Xpad.adjoint() * Ypad - Ypad * Xpad.adjoint();
  return C.topLeftCorner(J + 1, J + 1);
}

}  // namespace

double bergman_commutator_partial_trace(int J) {
  const Eigen::MatrixXcd B = bergman_shift(J + 2);
  return padded_adjoint_commutator_block(B, B, J).trace().real();
}

double bergman_resolvent_commutator_partial_trace(cplx c, int J) {
  const int n = J + 2;
  const Eigen::MatrixXcd B = bergman_shift(n);
  const Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(n + 1, n + 1) - std::conj(c) * B;
  const Eigen::MatrixXcd RB = lhs.triangularView<Eigen::Lower>().solve(B);
  return padded_adjoint_commutator_block(B, RB, J).trace().real();
}

double bergman_commutator_hs2_with_tail(int J) {
  const Eigen::MatrixXcd B = bergman_shift(J + 2);
  const double partial = padded_adjoint_commutator_block(B, B, J).squaredNorm();
  // remaining diagonal: sum_{j>J} (1/(j+1) - 1/(j+2))^2
  const double x = J + 2;
  const double tail = trigamma(x) + trigamma(x + 1.0) - 2.0 / x;
  return partial + tail;
}

double richardson_bergman(double v1, int j1, double v2, int j2) {
  const double x1 = 1.0 / (j1 + 2.0), x2 = 1.0 / (j2 + 2.0);
  return v2 + (v1 - v2) * x2 / (x2 - x1);
}

cplx richardson_bergman(cplx v1, int j1, cplx v2, int j2) {
  const double x1 = 1.0 / (j1 + 2.0), x2 = 1.0 / (j2 + 2.0);
  return v2 + (v1 - v2) * (x2 / (x2 - x1));
}

HsResult commutator_sw_hs(const Symbol& inner_sym, int j_max) {
  require_inner(inner_sym);
  const cplx phi0 = inner_sym.eval(cplx{0.0, 0.0});
  if (std::abs(phi0) > 1e-12)
    throw std::invalid_argument(
        "commutator_sw_hs: phi(0) != 0; conjugate by the Moebius shift at a zero of phi first");

  double max_mu = 0.0;
  for (const auto& mu : inner_sym.as_blaschke().zeros) max_mu = std::max(max_mu, std::abs(mu));
  const int D = (max_mu == 0.0) ? 64 : std::max<int>(64, static_cast<int>(90.0 / -std::log10(max_mu)) + 64);
  const ModelSpaceBasis model = takenaka_basis(inner_sym.as_blaschke(), D);
  const SwModel m = sw_model(inner_sym, model, 8);  // only the K-side matrices matter here

  const Eigen::MatrixXcd X = m.T0 * m.T0.adjoint();
  const Eigen::MatrixXcd Y = m.T0.adjoint() * m.T0;
  const double nx2 = X.squaredNorm();
  const double ny2 = Y.squaredNorm();
  const double xy = (Y.adjoint() * X).trace().real();

  HsResult out;
  for (int j = 0; j <= j_max; ++j) {
    const double d1 = 1.0 / (j + 1.0), d2 = 1.0 / (j + 2.0);
    out.partial += nx2 * d1 * d1 + ny2 * d2 * d2 - 2.0 * xy * d1 * d2;
  }
  const double x = j_max + 2.0;
  out.tail = nx2 * trigamma(x) + ny2 * trigamma(x + 1.0) - 2.0 * xy / x;
  out.computed = out.partial + out.tail;
  const double dphi0 = std::abs(derivative_at_zero(inner_sym));
  out.expected = std::numbers::pi * std::numbers::pi / 3.0 - 1.0 - 2.0 * dphi0 * dphi0;
  return out;
}

double commutator_sw_hs_per_j(const SwModel& m, int j) {
  const Eigen::MatrixXcd X = m.T0 * m.T0.adjoint();
  const Eigen::MatrixXcd Y = m.T0.adjoint() * m.T0;
  const double d1 = 1.0 / (j + 1.0), d2 = 1.0 / (j + 2.0);
  return X.squaredNorm() * d1 * d1 + Y.squaredNorm() * d2 * d2 -
         2.0 * (Y.adjoint() * X).trace().real() * d1 * d2;
}

TraceResult trace_szw(const Symbol& inner_sym, int j_max) {
  require_inner(inner_sym);
  double max_mu = 0.0;
  for (const auto& mu : inner_sym.as_blaschke().zeros) max_mu = std::max(max_mu, std::abs(mu));
  const int D = (max_mu == 0.0) ? 64 : std::max<int>(64, static_cast<int>(90.0 / -std::log10(max_mu)) + 64);
  const ModelSpaceBasis model = takenaka_basis(inner_sym.as_blaschke(), D);
  const SwModel m = sw_model(inner_sym, model, 8);
  const cplx tr_t0 = m.T0.trace();
  const cplx phi0 = inner_sym.eval(cplx{0.0, 0.0});

  const int j_half = j_max / 2;
  TraceResult out;
  out.at_full = tr_t0 * bergman_resolvent_commutator_partial_trace(phi0, j_max);
  out.at_half = tr_t0 * bergman_resolvent_commutator_partial_trace(phi0, j_half);
  out.computed = richardson_bergman(out.at_half, j_half, out.at_full, j_max);
  out.expected = std::conj(derivative_at_zero(inner_sym));
  return out;
}

HeltonHoweResult helton_howe_check(const std::vector<cplx>& f, const std::vector<cplx>& g,
                                   int j_max) {
  const int degs = static_cast<int>(f.size() + g.size());
  auto partial = [&](int J) {
    const Eigen::MatrixXcd B = bergman_shift(J + degs + 2);
    const Eigen::MatrixXcd F = poly_of_matrix(f, B);
    const Eigen::MatrixXcd G = poly_of_matrix(g, B);
    return padded_adjoint_commutator_block(F, G, J).trace();
  };
  HeltonHoweResult out;
  out.trace_at_full = partial(j_max);
  const cplx half = partial(j_max / 2);
  out.trace_extrapolated = richardson_bergman(half, j_max / 2, out.trace_at_full, j_max);

  // (1/pi) int_D f' conj(g') dA over a radial Gauss-Legendre x angular
  // trapezoid grid; exact for polynomial integrands
  const auto df = poly_derivative(f);
  const auto dg = poly_derivative(g);
  const int nrad = degs + 6;
  const int nang = 2 * degs + 8;
  std::vector<double> xs, ws;
  gauss_legendre_01(nrad, xs, ws);
  cplx acc{0.0, 0.0};
  for (int ir = 0; ir < nrad; ++ir) {
    const double r = xs[static_cast<size_t>(ir)];
    cplx ring{0.0, 0.0};
    for (int it = 0; it < nang; ++it) {
      const cplx w = std::polar(r, 2.0 * std::numbers::pi * it / nang);
      ring += poly_eval(df, w) * std::conj(poly_eval(dg, w));
    }
    acc += ws[static_cast<size_t>(ir)] * 2.0 * r * ring / double(nang);
  }
  out.integral = acc;
  return out;
}

SubspaceBasis example1_basis(cplx a, int j_max) {
  if (a == cplx{0.0, 0.0}) throw std::invalid_argument("example1_basis: a must be nonzero");
  const int I = j_max + 1, J = j_max;
  SubspaceBasis out;
  out.label = BasisLabel::Model;
  out.I = I;
  out.J = J;
  out.guard = 1;
  out.Q = Eigen::MatrixXcd::Zero((I + 1) * (J + 1), j_max + 1);
  for (int j = 0; j <= j_max; ++j) {
    // R_j^2 = 1 + |a|^2 + ... + |a|^{2j}
    double r2 = 0.0, p = 1.0;
    for (int l = 0; l <= j; ++l) {
      r2 += p;
      p *= std::norm(a);
    }
    const double rj = std::sqrt(r2);
    cplx az{1.0, 0.0};
    for (int l = 0; l <= j; ++l) {
      out.Q(l * (J + 1) + (j - l), j) = az / rj;
      az *= std::conj(a);
    }
    out.column_j.push_back(j);
  }
  out.note = "weighted-diagonal quotient basis";
  return out;
}

Example1Report example1_suite(cplx a, int j_max) {
  const SubspaceBasis E = example1_basis(a, j_max);
  const Eigen::MatrixXcd Sz = compress_shift('z', E).A;
  const Eigen::MatrixXcd L0 = left_eval_operator(E).A;
  const Eigen::MatrixXcd C = adjoint_commutator(Sz, Sz);

  std::vector<double> R2(static_cast<size_t>(j_max) + 2);
  {
    double acc = 0.0, p = 1.0;
    for (int j = 0; j <= j_max + 1; ++j) {
      acc += p;
      p *= std::norm(a);
      R2[static_cast<size_t>(j)] = acc;
    }
  }
  auto R = [&](int j) { return (j < 0) ? 0.0 : std::sqrt(R2[static_cast<size_t>(j)]); };

  Example1Report rep;
  rep.a = a;
  rep.j_max = j_max;
  rep.min_cj = std::numeric_limits<double>::max();
  for (int j = 0; j < j_max; ++j) {
    const cplx want = a * R(j) / R(j + 1);
    rep.max_shift_entry_err = std::max(rep.max_shift_entry_err, std::abs(Sz(j + 1, j) - want));
  }
  for (int j = 0; j < j_max; ++j) {  // the last diagonal entry is edge-cut
    const double rr = (j == 0) ? 0.0 : R2[static_cast<size_t>(j - 1)] / R2[static_cast<size_t>(j)];
    const double cj = std::norm(a) * (R2[static_cast<size_t>(j)] / R2[static_cast<size_t>(j + 1)] - rr);
    rep.max_commutator_err = std::max(rep.max_commutator_err, std::abs(C(j, j) - cj));
    rep.min_cj = std::min(rep.min_cj, C(j, j).real());
  }
  for (int j = 0; j <= j_max; ++j)
    rep.max_l0_err = std::max(rep.max_l0_err, std::abs(L0.col(j).norm() - 1.0 / R(j)));
  for (int p = 0; p < j_max; ++p)
    for (int q = 0; q < j_max; ++q)
      if (p != q) rep.off_diagonal_max = std::max(rep.off_diagonal_max, std::abs(C(p, q)));
  return rep;
}

CoeffGrid2D mobius_conjugate(cplx alpha, const CoeffGrid2D& F) {
  if (std::abs(alpha) >= 1.0) throw std::invalid_argument("mobius_conjugate: |alpha| must be < 1");
  const int I = F.zdeg(), J = F.wdeg();

  // psi_j = sqrt(1-|alpha|^2) x_alpha(w)^j / (1 - conj(alpha) w), the image
  // of w^j; unitarity makes 1 - ||psi_j||^2 the exact mass the truncation
  // loses at degree j
  std::vector<cplx> x_series(static_cast<size_t>(J) + 1);
  x_series[0] = alpha;
  {
    cplx p{1.0, 0.0};
    for (int k = 1; k <= J; ++k) {
      x_series[static_cast<size_t>(k)] = (std::norm(alpha) - 1.0) * p;
      p *= std::conj(alpha);
    }
  }
  std::vector<std::vector<cplx>> psi(static_cast<size_t>(J) + 1);
  psi[0] = geometric_series(std::conj(alpha), J);
  const double s = std::sqrt(1.0 - std::norm(alpha));
  for (auto& v : psi[0]) v *= s;
  std::vector<double> loss(static_cast<size_t>(J) + 1, 0.0);
  auto sqnorm = [](const std::vector<cplx>& v) {
    double acc = 0.0;
    for (const auto& c : v) acc += std::norm(c);
    return acc;
  };
  loss[0] = std::max(0.0, 1.0 - sqnorm(psi[0]));
  for (int j = 1; j <= J; ++j) {
    psi[static_cast<size_t>(j)] =
        series_multiply(psi[static_cast<size_t>(j) - 1], x_series, J);
    loss[static_cast<size_t>(j)] = std::max(0.0, 1.0 - sqnorm(psi[static_cast<size_t>(j)]));
  }
  double lost2 = 0.0;
  const double total2 = std::max(F.mat().squaredNorm(), 1e-300);
  for (int j = 0; j <= J; ++j) lost2 += F.mat().col(j).squaredNorm() * loss[static_cast<size_t>(j)];
  // 1e-6 sits above the rounding floor of the loss estimates (~sqrt(n eps))
  // and far below any genuine starvation, which shows up at order one
  if (std::sqrt(lost2 / total2) > 1e-6)
    throw std::runtime_error("mobius_conjugate: truncation insufficient for the composition");

  CoeffGrid2D out(I, J);
  for (int i = 0; i <= I; ++i)
    for (int j = 0; j <= J; ++j) {
      const cplx c = F.coeff(i, j);
      if (c == cplx{0.0, 0.0}) continue;
      for (int k = 0; k <= J; ++k) out.mat()(i, k) += c * psi[static_cast<size_t>(j)][static_cast<size_t>(k)];
    }
  return out;
}

MobiusCheck mobius_identity_check(const Symbol& inner_sym, cplx alpha, int j_max) {
  require_inner(inner_sym);
  const Symbol prime = mobius_precompose(inner_sym, alpha);

  auto [I1, J1] = basis_E_grid(inner_sym, j_max);
  auto [I2, J2] = basis_E_grid(prime, j_max);
  const int I = std::max(I1, I2);
  // composition with x_alpha spreads degree-j mass up to about
  // j (1+|alpha|)/(1-|alpha|); size the w-truncation for that
  const double spread = (1.0 + std::abs(alpha)) / (1.0 - std::abs(alpha));
  int J = std::max(J1, J2);
  J = static_cast<int>(std::ceil(spread * J)) + 8 * static_cast<int>(std::ceil(std::sqrt(spread * J))) + 16;

  const int guard = static_cast<int>(inner_sym.as_blaschke().zeros.size()) + 2;
  const ModelSpaceBasis model = takenaka_basis(inner_sym.as_blaschke(), J);
  const ModelSpaceBasis model_p = takenaka_basis(prime.as_blaschke(), J);
  const SubspaceBasis E = basis_E(model, inner_sym, j_max, I, J, guard);
  const SubspaceBasis Ep = basis_E(model_p, prime, j_max, I, J, guard);

  // W = matrix of U_alpha from the E-basis of phi to the E-basis of phi o x_alpha
  Eigen::MatrixXcd UQ(E.Q.rows(), E.Q.cols());
  for (int q = 0; q < E.dim(); ++q)
    UQ.col(q) = mobius_conjugate(alpha, E.column(q)).flatten();
  const Eigen::MatrixXcd W = Ep.Q.adjoint() * UQ;

  const Eigen::MatrixXcd Sz = compress_shift('z', E).A;
  const Eigen::MatrixXcd Szp = compress_shift('z', Ep).A;
  const Eigen::MatrixXcd Sw = compress_shift('w', E).A;
  const Eigen::MatrixXcd Swp = compress_shift('w', Ep).A;

  const Eigen::MatrixXcd Vint = E.interior_coords();
  MobiusCheck out;
  out.resid_z = Eigen::MatrixXcd((W * Sz - Szp * W) * Vint).operatorNorm();

  const int n = E.dim();
  const Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(n, n) - std::conj(alpha) * Sw;
  const Eigen::MatrixXcd xw = (alpha * Eigen::MatrixXcd::Identity(n, n) - Sw) * lhs.inverse();
  out.resid_w = Eigen::MatrixXcd((W * xw - Swp * W) * Vint).operatorNorm();

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(W * Vint);
  for (int k = 0; k < svd.singularValues().size(); ++k)
    out.unitarity_dev = std::max(out.unitarity_dev, std::abs(svd.singularValues()(k) - 1.0));
  return out;
}

}  // namespace nphi
