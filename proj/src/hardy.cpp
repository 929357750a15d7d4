#include "nphi/hardy.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nphi {

CoeffSeries1D CoeffSeries1D::from(const std::vector<cplx>& coeffs) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(std::max<size_t>(coeffs.size(), 1));
  for (size_t k = 0; k < coeffs.size(); ++k) v(static_cast<long>(k)) = coeffs[k];
  return CoeffSeries1D(std::move(v));
}

cplx CoeffSeries1D::inner(const CoeffSeries1D& other) const {
  const int n = std::min(degree(), other.degree());
  cplx acc{0.0, 0.0};
  for (int j = 0; j <= n; ++j) acc += c_(j) * std::conj(other.c_(j));
  return acc;
}

cplx CoeffGrid2D::inner(const CoeffGrid2D& other) const {
  if (zdeg() != other.zdeg() || wdeg() != other.wdeg())
    throw std::invalid_argument("CoeffGrid2D::inner: ambient truncations differ");
  return (a_.array() * other.a_.array().conjugate()).sum();
}

Eigen::VectorXcd CoeffGrid2D::flatten() const {
  const int rows = static_cast<int>(a_.rows()), cols = static_cast<int>(a_.cols());
  Eigen::VectorXcd v(rows * cols);
  for (int i = 0; i < rows; ++i) v.segment(i * cols, cols) = a_.row(i).transpose();
  return v;
}

CoeffGrid2D CoeffGrid2D::from_flat(const Eigen::VectorXcd& v, int I, int J) {
  if (v.size() != (I + 1) * (J + 1))
    throw std::invalid_argument("CoeffGrid2D::from_flat: size mismatch");
  CoeffGrid2D g(I, J);
  for (int i = 0; i <= I; ++i) g.mat().row(i) = v.segment(i * (J + 1), J + 1).transpose();
  return g;
}

std::vector<cplx> series_multiply(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  int out_degree) {
  std::vector<cplx> out(static_cast<size_t>(out_degree) + 1, cplx{0.0, 0.0});
  for (size_t i = 0; i < a.size() && i <= static_cast<size_t>(out_degree); ++i) {
    if (a[i] == cplx{0.0, 0.0}) continue;
    const size_t jmax = std::min(b.size() - 1, static_cast<size_t>(out_degree) - i);
    for (size_t j = 0; j <= jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<cplx> series_power(const std::vector<cplx>& a, int p, int out_degree) {
  std::vector<cplx> out{cplx{1.0, 0.0}};
  out.resize(static_cast<size_t>(out_degree) + 1, cplx{0.0, 0.0});
  for (int k = 0; k < p; ++k) out = series_multiply(out, a, out_degree);
  return out;
}

Eigen::VectorXcd toeplitz_adjoint_raw(const std::vector<cplx>& phi, const Eigen::VectorXcd& f,
                                      int out_degree) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(out_degree + 1);
  const int fd = static_cast<int>(f.size()) - 1;
  for (int n = 0; n <= out_degree; ++n) {
    cplx acc{0.0, 0.0};
    const int mmax = std::min(static_cast<int>(phi.size()) - 1, fd - n);
    for (int m = 0; m <= mmax; ++m) acc += std::conj(phi[static_cast<size_t>(m)]) * f(n + m);
    out(n) = acc;
  }
  return out;
}

CoeffSeries1D toeplitz_adjoint(const Symbol& sym, const CoeffSeries1D& f, int out_degree) {
  if (out_degree > f.degree())
    throw std::invalid_argument("toeplitz_adjoint: out_degree exceeds the input degree");
  const auto phi = sym.taylor_coeffs(f.degree());
  return CoeffSeries1D(toeplitz_adjoint_raw(phi, f.vec(), out_degree));
}

APhiResult a_phi_series(const Symbol& sym, const CoeffSeries1D& f, int z_degree,
                        double divergence_threshold) {
  if (z_degree < 0) throw std::invalid_argument("a_phi_series: z_degree must be >= 0");
  const int J = f.degree();
  const auto phi = sym.taylor_coeffs(J);
  CoeffGrid2D grid(z_degree, J);
  std::vector<double> sums;
  sums.reserve(static_cast<size_t>(z_degree) + 1);
  Eigen::VectorXcd row = f.vec();
  double acc = 0.0;
  bool diverging = false;
  for (int n = 0; n <= z_degree; ++n) {
    grid.mat().row(n) = row.transpose();
    acc += row.squaredNorm();
    sums.push_back(acc);
    if (acc > divergence_threshold) diverging = true;
    if (n < z_degree) row = toeplitz_adjoint_raw(phi, row, J);
  }
  return APhiResult(std::move(grid), std::move(sums), diverging);
}

CoeffSeries1D eval_left(const CoeffGrid2D& F, cplx lambda) {
  if (std::abs(lambda) >= 1.0) throw std::invalid_argument("eval_left: |lambda| must be < 1");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(F.wdeg() + 1);
  cplx p{1.0, 0.0};
  for (int i = 0; i <= F.zdeg(); ++i) {
    out += p * F.mat().row(i).transpose();
    p *= lambda;
  }
  return CoeffSeries1D(std::move(out));
}

CoeffSeries1D eval_right(const CoeffGrid2D& F, cplx lambda) {
  if (std::abs(lambda) >= 1.0) throw std::invalid_argument("eval_right: |lambda| must be < 1");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(F.zdeg() + 1);
  cplx p{1.0, 0.0};
  for (int j = 0; j <= F.wdeg(); ++j) {
    out += p * F.mat().col(j);
    p *= lambda;
  }
  return CoeffSeries1D(std::move(out));
}

namespace {
CoeffGrid2D shift_up(const CoeffGrid2D& F, bool along_z, bool allow_truncate) {
  const int I = F.zdeg(), J = F.wdeg();
  CoeffGrid2D out(I, J);
  double dropped;
  if (along_z) {
    dropped = F.mat().row(I).norm();
    out.mat().bottomRows(I) = F.mat().topRows(I);
  } else {
    dropped = F.mat().col(J).norm();
    out.mat().rightCols(J) = F.mat().leftCols(J);
  }
  if (dropped > 0.0) {
    if (!allow_truncate)
      throw std::runtime_error("mult: product would exceed the grid truncation");
    out.mark_truncated();
  }
  if (F.truncated()) out.mark_truncated();
  return out;
}
}  // namespace

CoeffGrid2D mult_z(const CoeffGrid2D& F, bool allow_truncate) { return shift_up(F, true, allow_truncate); }
CoeffGrid2D mult_w(const CoeffGrid2D& F, bool allow_truncate) { return shift_up(F, false, allow_truncate); }

CoeffGrid2D backshift_z(const CoeffGrid2D& F) {
  const int I = F.zdeg(), J = F.wdeg();
  CoeffGrid2D out(I, J);
  out.mat().topRows(I) = F.mat().bottomRows(I);
  if (F.truncated()) out.mark_truncated();
  return out;
}

CoeffGrid2D backshift_w(const CoeffGrid2D& F) {
  const int I = F.zdeg(), J = F.wdeg();
  CoeffGrid2D out(I, J);
  out.mat().leftCols(J) = F.mat().rightCols(J);
  if (F.truncated()) out.mark_truncated();
  return out;
}

KernelPair kernel_function(const Symbol& sym, cplx w0, int I, int J) {
  if (std::abs(w0) >= 1.0) throw std::invalid_argument("kernel_function: |w0| must be < 1");
  const cplx pv = sym.eval(w0);
  if (std::abs(pv) >= 1.0)
    throw std::invalid_argument("kernel_function: w0 is not in Omega_phi (|phi(w0)| >= 1)");
  CoeffGrid2D raw(I, J);
  cplx zi{1.0, 0.0};
  for (int i = 0; i <= I; ++i) {
    cplx wj{1.0, 0.0};
    for (int j = 0; j <= J; ++j) {
      raw.set(i, j, zi * wj);
      wj *= std::conj(w0);
    }
    zi *= std::conj(pv);
  }
  const double scale = std::sqrt((1.0 - std::norm(w0)) * (1.0 - std::norm(pv)));
  CoeffGrid2D normalized(raw.mat() * scale);
  // tail^2 of the normalized kernel: 1 - (1 - p1)(1 - p2) = p1 + p2 - p1 p2,
  // formed without cancellation
  const double p1 = std::pow(std::norm(pv), I + 1);
  const double p2 = std::pow(std::norm(w0), J + 1);
  const double tail = std::sqrt(std::max(0.0, p1 + p2 - p1 * p2));
  return KernelPair(std::move(raw), std::move(normalized), tail);
}

std::pair<int, int> kernel_truncation(const Symbol& sym, cplx w0, double tail_tol) {
  const cplx pv = sym.eval(w0);
  if (std::abs(pv) >= 1.0)
    throw std::invalid_argument("kernel_truncation: w0 is not in Omega_phi");
  auto need = [&](double r) {
    if (r <= 0.0) return 1;
    // r^{2(n+1)} <= tail_tol^2 / 2
    const double n = std::log(tail_tol * tail_tol / 2.0) / (2.0 * std::log(r)) - 1.0;
    return std::max(1, static_cast<int>(std::ceil(n)) + 1);
  };
  return {need(std::abs(pv)), need(std::abs(w0))};
}

void write_grid_csv(const CoeffGrid2D& F, std::ostream& os) {
  os << "i,j,re,im\n";
  char buf[96];
  for (int i = 0; i <= F.zdeg(); ++i)
    for (int j = 0; j <= F.wdeg(); ++j) {
      const cplx v = F.coeff(i, j);
      if (v == cplx{0.0, 0.0}) continue;
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", i, j, v.real(), v.imag());
      os << buf;
    }
}

}  // namespace nphi
