#include "nphi/jordan.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nphi {

namespace {

// Flattened-index shift helpers on (I+1) x (J+1) grids, column index
// linearized as i * (J+1) + j. Multiplication drops overflow (tracked by the
// caller through norms when needed).
Eigen::MatrixXcd shift_mult(const Eigen::MatrixXcd& Q, int I, int J, bool along_z) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(Q.rows(), Q.cols());
  const int cols = J + 1;
  if (along_z) {
    out.bottomRows(I * cols) = Q.topRows(I * cols);
  } else {
    for (int i = 0; i <= I; ++i)
      out.block(i * cols + 1, 0, J, Q.cols()) = Q.block(i * cols, 0, J, Q.cols());
  }
  return out;
}

Eigen::MatrixXcd shift_back(const Eigen::MatrixXcd& Q, int I, int J, bool along_z) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(Q.rows(), Q.cols());
  const int cols = J + 1;
  if (along_z) {
    out.topRows(I * cols) = Q.bottomRows(I * cols);
  } else {
    for (int i = 0; i <= I; ++i)
      out.block(i * cols, 0, J, Q.cols()) = Q.block(i * cols + 1, 0, J, Q.cols());
  }
  return out;
}

}  // namespace

CompressedOperator compress_shift(char var, const SubspaceBasis& N) {
  if (var != 'z' && var != 'w') throw std::invalid_argument("compress_shift: var must be 'z' or 'w'");
  const Eigen::MatrixXcd shifted = shift_mult(N.Q, N.I, N.J, var == 'z');
  CompressedOperator op;
  op.name = (var == 'z') ? "S_z" : "S_w";
  op.in_label = op.out_label = N.label;
  op.A = N.Q.adjoint() * shifted;
  const double nrm = op.A.operatorNorm();
  if (nrm > 1.0 + 1e-8)
    throw std::runtime_error("compress_shift: compression of an isometry exceeded norm 1");
  return op;
}

CompressedOperator defect_dz(const SubspaceBasis& W, const SubspaceBasis& N, double span_tol) {
  if (W.I != N.I || W.J != N.J) throw std::invalid_argument("defect_dz: ambient mismatch");
  const Eigen::MatrixXcd img = shift_back(W.Q, W.I, W.J, true);
  CompressedOperator op;
  op.name = "D_z";
  op.in_label = W.label;
  op.out_label = N.label;
  op.A = N.Q.adjoint() * img;
  // images of guard-interior wandering vectors must land in span(N)
  const Eigen::MatrixXcd Vint = W.interior_coords();
  const Eigen::MatrixXcd img_int = img * Vint;
  const Eigen::MatrixXcd resid = img_int - N.Q * (N.Q.adjoint() * img_int);
  for (int k = 0; k < resid.cols(); ++k) {
    if (resid.col(k).norm() > span_tol)
      throw std::runtime_error("defect_dz: column image leaves span(N) beyond tolerance");
  }
  return op;
}

CompressedOperator left_eval_operator(const SubspaceBasis& N) {
  CompressedOperator op;
  op.name = "L0";
  op.in_label = N.label;
  op.out_label = BasisLabel::Custom;
  op.A = N.Q.topRows(N.J + 1);  // z-degree-0 block
  return op;
}

CompressedOperator right_eval_operator(const SubspaceBasis& N) {
  CompressedOperator op;
  op.name = "R0";
  op.in_label = N.label;
  op.out_label = BasisLabel::Custom;
  op.A.resize(N.I + 1, N.dim());
  for (int i = 0; i <= N.I; ++i) op.A.row(i) = N.Q.row(i * (N.J + 1));
  return op;
}

IdentityResiduals identity_residuals(const SubspaceBasis& N, const SubspaceBasis& W,
                                     double mass_tol, int max_dim) {
  const Eigen::MatrixXcd Sz = compress_shift('z', N).A;
  const Eigen::MatrixXcd Dz = defect_dz(W, N).A;
  const Eigen::MatrixXcd L0 = left_eval_operator(N).A;
  const int n = N.dim();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd Vint = N.interior_coords(mass_tol);
  if (max_dim >= 0 && Vint.cols() > max_dim) Vint = Vint.leftCols(max_dim).eval();
  IdentityResiduals out;
  out.interior_dim = static_cast<int>(Vint.cols());
  if (out.interior_dim == 0) return out;
  const Eigen::MatrixXcd R1 = (Sz.adjoint() * Sz + Dz * Dz.adjoint() - I) * Vint;
  const Eigen::MatrixXcd R2 = (Sz * Sz.adjoint() + L0.adjoint() * L0 - I) * Vint;
  out.r1 = R1.operatorNorm();
  out.r2 = R2.operatorNorm();
  return out;
}

Eigen::MatrixXcd adjoint_commutator(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("adjoint_commutator: dimension mismatch");
  return A.adjoint() * B - B * A.adjoint();
}

CompressedOperator commutator(const CompressedOperator& A, const CompressedOperator& B) {
  CompressedOperator op;
  op.name = "[" + A.name + "*, " + B.name + "]";
  op.in_label = B.in_label;
  op.out_label = A.in_label;
  op.A = adjoint_commutator(A.A, B.A);
  return op;
}

double hs_norm(const Eigen::MatrixXcd& A) { return A.norm(); }

cplx trace(const Eigen::MatrixXcd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("trace: matrix not square");
  return A.trace();
}

double range_dz_weighted_norm(const Eigen::MatrixXcd& coeffs_kj) {
  double acc = 0.0;
  for (int j = 0; j < coeffs_kj.cols(); ++j)
    acc += (j + 1) * coeffs_kj.col(j).squaredNorm();
  return acc;
}

double restricted_sigma_max(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& V) {
  const Eigen::MatrixXcd M = (V.size() == 0) ? A : Eigen::MatrixXcd(A * V);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()(0);
}

double restricted_sigma_min(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& V) {
  const Eigen::MatrixXcd M = (V.size() == 0) ? A : Eigen::MatrixXcd(A * V);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

void write_operator_csv(const CompressedOperator& op, std::ostream& os) {
  os << "row,col,re,im\n";
  char buf[96];
  for (int r = 0; r < op.rows(); ++r)
    for (int c = 0; c < op.cols(); ++c) {
      const cplx v = op.A(r, c);
      if (v == cplx{0.0, 0.0}) continue;
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", r, c, v.real(), v.imag());
      os << buf;
    }
}

}  // namespace nphi
