#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "nphi/subspace.hpp"

namespace nphi {

// Dense matrix of an operator between named orthonormal bases. Column q
// holds the coefficients of the image of the q-th input basis vector.
struct CompressedOperator {
  std::string name;  // "S_z", "S_w", "D_z", "D_w", "L0", "R0", or custom
  Eigen::MatrixXcd A;
  BasisLabel in_label = BasisLabel::Custom;
  BasisLabel out_label = BasisLabel::Custom;
  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }
};

// Compression P_N T_var |_N of multiplication by z or w. Contractivity
// (||A|| <= 1 up to edge tolerance) is asserted.
CompressedOperator compress_shift(char var, const SubspaceBasis& N);

// T*_z restricted to M ominus zM, expressed in the quotient basis. Column
// images must lie in span(N) within span_tol on guard-interior columns
// (interior mass tolerance tau admits amplitudes up to sqrt(tau), hence the
// default guard level).
CompressedOperator defect_dz(const SubspaceBasis& W, const SubspaceBasis& N,
                             double span_tol = 1e-3);

// L(0)|_N into the monomial w-basis (dimension J+1).
CompressedOperator left_eval_operator(const SubspaceBasis& N);
// R(0)|_N into the monomial z-basis (dimension I+1).
CompressedOperator right_eval_operator(const SubspaceBasis& N);

struct IdentityResiduals {
  double r1 = 0.0;  // ||(S*_z S_z + D_z D*_z - I) restricted||
  double r2 = 0.0;  // ||(S_z S*_z + L0* L0 - I) restricted||
  int interior_dim = 0;
};

// Defect identities on guard-interior test vectors of N. Ladder comparisons
// should cap the test family at the smaller run's interior dimension
// (max_dim), otherwise the family itself grows with the truncation.
IdentityResiduals identity_residuals(const SubspaceBasis& N, const SubspaceBasis& W,
                                     double mass_tol = kInteriorMassTol, int max_dim = -1);

// [A*, B] = A^H B - B A^H.
Eigen::MatrixXcd adjoint_commutator(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);
CompressedOperator commutator(const CompressedOperator& A, const CompressedOperator& B);

double hs_norm(const Eigen::MatrixXcd& A);
cplx trace(const Eigen::MatrixXcd& A);

// sum (j+1) |a_{k,j}|^2 over a coefficient table in the E-basis: the
// finite-truncation range-membership functional for D_z.
double range_dz_weighted_norm(const Eigen::MatrixXcd& coeffs_kj);

// Largest / smallest singular value of A restricted to the test subspace
// given by coordinate columns V (identity when V is empty).
double restricted_sigma_max(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& V);
double restricted_sigma_min(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& V);

// CSV dump, header "row,col,re,im", nonzero entries only.
void write_operator_csv(const CompressedOperator& op, std::ostream& os);

}  // namespace nphi
