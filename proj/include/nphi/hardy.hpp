#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nphi/common.hpp"
#include "nphi/symbol.hpp"

namespace nphi {

// A function in H^2(Gamma_w) truncated at a fixed degree: coefficient j is
// the w^j coefficient.
class CoeffSeries1D {
 public:
  explicit CoeffSeries1D(int degree) : c_(Eigen::VectorXcd::Zero(degree + 1)) {}
  explicit CoeffSeries1D(Eigen::VectorXcd c) : c_(std::move(c)) {}
  static CoeffSeries1D from(const std::vector<cplx>& coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  cplx coeff(int j) const { return (j >= 0 && j <= degree()) ? c_(j) : cplx{0.0, 0.0}; }
  void set(int j, cplx v) { c_(j) = v; }
  const Eigen::VectorXcd& vec() const { return c_; }
  Eigen::VectorXcd& vec() { return c_; }

  double norm() const { return c_.norm(); }
  // <a, b> = sum a_j conj(b_j)
  cplx inner(const CoeffSeries1D& other) const;

 private:
  Eigen::VectorXcd c_;
};

// A function in H^2(Gamma^2) truncated at (I, J): entry (i, j) is the
// z^i w^j coefficient. Operations never silently exceed the truncation;
// anything that drops mass marks the result `truncated`.
class CoeffGrid2D {
 public:
  CoeffGrid2D(int I, int J) : a_(Eigen::MatrixXcd::Zero(I + 1, J + 1)) {}
  explicit CoeffGrid2D(Eigen::MatrixXcd a) : a_(std::move(a)) {}

  int zdeg() const { return static_cast<int>(a_.rows()) - 1; }
  int wdeg() const { return static_cast<int>(a_.cols()) - 1; }
  cplx coeff(int i, int j) const { return a_(i, j); }
  void set(int i, int j, cplx v) { a_(i, j) = v; }
  const Eigen::MatrixXcd& mat() const { return a_; }
  Eigen::MatrixXcd& mat() { return a_; }

  bool truncated() const { return truncated_; }
  void mark_truncated() { truncated_ = true; }

  double norm() const { return a_.norm(); }
  cplx inner(const CoeffGrid2D& other) const;

  // column-of-rows flattening: linear index i * (J+1) + j
  Eigen::VectorXcd flatten() const;
  static CoeffGrid2D from_flat(const Eigen::VectorXcd& v, int I, int J);

 private:
  Eigen::MatrixXcd a_;
  bool truncated_ = false;
};

// --- series utilities -------------------------------------------------------

std::vector<cplx> series_multiply(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  int out_degree);
std::vector<cplx> series_power(const std::vector<cplx>& a, int p, int out_degree);

// (T*_phi f)_n = sum_m conj(phi_m) f_{n+m}; exact for polynomial data.
CoeffSeries1D toeplitz_adjoint(const Symbol& sym, const CoeffSeries1D& f, int out_degree);
// Low-level variant on raw coefficients (phi already expanded).
Eigen::VectorXcd toeplitz_adjoint_raw(const std::vector<cplx>& phi, const Eigen::VectorXcd& f,
                                      int out_degree);

// --- the A_phi construction -------------------------------------------------

struct APhiResult {
  CoeffGrid2D grid;                  // z-row n holds T*^n_phi f
  std::vector<double> partial_sums;  // sum_{n<=N} ||T*^n f||^2
  bool diverging = false;            // partial sums blew past the threshold
  APhiResult(CoeffGrid2D g, std::vector<double> ps, bool d)
      : grid(std::move(g)), partial_sums(std::move(ps)), diverging(d) {}
};

APhiResult a_phi_series(const Symbol& sym, const CoeffSeries1D& f, int z_degree,
                        double divergence_threshold = kDivergenceThreshold);

// --- evaluation and shifts ---------------------------------------------------

// f(lambda, w) and f(z, lambda); |lambda| < 1.
CoeffSeries1D eval_left(const CoeffGrid2D& F, cplx lambda);
CoeffSeries1D eval_right(const CoeffGrid2D& F, cplx lambda);

// Multiplication shifts indices up; without allow_truncate the call errors
// when nonzero mass would fall off the grid. Backshift drops row/column 0.
CoeffGrid2D mult_z(const CoeffGrid2D& F, bool allow_truncate = false);
CoeffGrid2D mult_w(const CoeffGrid2D& F, bool allow_truncate = false);
CoeffGrid2D backshift_z(const CoeffGrid2D& F);
CoeffGrid2D backshift_w(const CoeffGrid2D& F);

// --- reproducing kernels ------------------------------------------------------

struct KernelPair {
  CoeffGrid2D raw;         // truncation of 1/((1 - conj(phi(w0)) z)(1 - conj(w0) w))
  CoeffGrid2D normalized;  // sqrt((1-|w0|^2)(1-|phi(w0)|^2)) * raw
  double tail_norm_bound;  // norm of the neglected tail of `normalized`
  KernelPair(CoeffGrid2D r, CoeffGrid2D n, double t)
      : raw(std::move(r)), normalized(std::move(n)), tail_norm_bound(t) {}
};

// Requires w0 in Omega_phi, i.e. |phi(w0)| < 1 (and |w0| < 1).
KernelPair kernel_function(const Symbol& sym, cplx w0, int I, int J);

// Smallest (I, J) for which the normalized kernel tail stays below tail_tol.
std::pair<int, int> kernel_truncation(const Symbol& sym, cplx w0,
                                      double tail_tol = kKernelTailTol);

// CSV dump, header "i,j,re,im", one row per nonzero entry.
void write_grid_csv(const CoeffGrid2D& F, std::ostream& os);

}  // namespace nphi
