#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nphi/jordan.hpp"
#include "nphi/subspace.hpp"

namespace nphi {

// Takenaka-Malmquist orthonormal basis of K_b = H^2 ominus b H^2 for a
// finite Blaschke product b, expanded as truncated power series. Zeros are
// ordered by modulus so a zero at the origin yields lambda_0 = 1.
struct ModelSpaceBasis {
  FiniteBlaschke blaschke;
  int degree = 0;  // series truncation degree of each lambda_k
  std::vector<Eigen::VectorXcd> lambdas;

  int dim() const { return static_cast<int>(lambdas.size()); }
  // max |Gram - I|; grows with the neglected series tails
  double gram_defect() const;
};

ModelSpaceBasis takenaka_basis(const FiniteBlaschke& b, int degree);

// Orthonormal columns E_{k,j} = lambda_k(w) e_j(z, phi(w)),
// e_j(z, x) = (x^j + x^{j-1} z + ... + z^j)/sqrt(j+1), for j <= j_max and
// all k, ordered k-major so the matrix of I (x) B matches kron(I, B).
// Columns whose truncated norm strays from 1 beyond norm_tol are rejected.
SubspaceBasis basis_E(const ModelSpaceBasis& model, const Symbol& inner_sym, int j_max, int I,
                      int J, int guard, double norm_tol = 1e-8);

// Orthonormal columns X_{k,j} = lambda_k(w)/sqrt(j+2) (z e_j(z, phi(w)) -
// sqrt(j+1) phi^{j+1}(w)) spanning M ominus zM, ordered like basis_E.
SubspaceBasis basis_X(const ModelSpaceBasis& model, const Symbol& inner_sym, int j_max, int I,
                      int J, int guard, double norm_tol = 1e-8);

// Grid degrees that hold every E_{k,j} exactly (polynomial phi) or within
// the geometric tail of a Blaschke expansion.
std::pair<int, int> basis_E_grid(const Symbol& inner_sym, int j_max, double tail_tol = 1e-12);

// Weighted shift with subdiagonal sqrt((j+1)/(j+2)) on degrees 0..j_max.
Eigen::MatrixXcd bergman_shift(int j_max);

// || S_z(E-basis) - I (x) B || on guard-interior columns.
double tensor_unitary_check(const Symbol& inner_sym, const SubspaceBasis& E, int j_max);

// sum_i K_i (x) A_i acting on K_phi (x) (truncated Bergman space).
struct TensorOperator {
  std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> terms;
  Eigen::MatrixXcd dense() const;
};

struct SwModel {
  Eigen::MatrixXcd Sphi;  // compression of w to K_phi
  Eigen::MatrixXcd T0;    // rank one: u v^H
  Eigen::VectorXcd u;     // coords of P_phi 1
  Eigen::VectorXcd v;     // coords of P_phi (conj(w) phi)
  TensorOperator op;      // S(phi) (x) I + T0 (x) (1 - conj(phi(0)) B)^{-1} B
};

SwModel sw_model(const Symbol& inner_sym, const ModelSpaceBasis& model, int j_max);

// || S_w(E-basis) - dense model || on guard-interior columns.
double sw_model_cross_residual(const Symbol& inner_sym, const ModelSpaceBasis& model,
                               const SubspaceBasis& E, int j_max);

// --- Bergman-side scalar diagnostics ----------------------------------------

// Partial trace sum_{j<=J} of the diagonal of [B*, B], computed from padded
// truncations so every retained entry matches the infinite operator.
double bergman_commutator_partial_trace(int J);

// Same partial sums for [B*, (1 - conj(c) B)^{-1} B].
double bergman_resolvent_commutator_partial_trace(cplx c, int J);

// Frobenius^2 of [B*, B] over the leading (J+1)-block plus the analytic tail.
double bergman_commutator_hs2_with_tail(int J);

// Two-point Richardson extrapolation to x = 0 with nodes x_i = 1/(J_i + 2).
double richardson_bergman(double value_at_j1, int j1, double value_at_j2, int j2);
cplx richardson_bergman(cplx value_at_j1, int j1, cplx value_at_j2, int j2);

// --- the scalar formulas of the inner case ----------------------------------

struct HsResult {
  double computed = 0.0;  // truncated Frobenius^2 + analytic tail
  double expected = 0.0;  // pi^2/3 - 1 - 2|phi'(0)|^2
  double partial = 0.0;
  double tail = 0.0;
};

// Requires phi(0) = 0; callers with phi(0) != 0 must conjugate by a Moebius
// shift at a zero of phi first.
HsResult commutator_sw_hs(const Symbol& inner_sym, int j_max);

// Per-ladder-index Frobenius contribution sum_k ||[S*_w,S_w] lambda_k e_j||^2
// from the model matrices (for comparison with the closed form).
double commutator_sw_hs_per_j(const SwModel& m, int j);

struct TraceResult {
  cplx computed{0.0, 0.0};  // Richardson-extrapolated
  cplx expected{0.0, 0.0};  // conj(phi'(0))
  cplx at_full{0.0, 0.0};
  cplx at_half{0.0, 0.0};
};

TraceResult trace_szw(const Symbol& inner_sym, int j_max);

struct HeltonHoweResult {
  cplx trace_extrapolated{0.0, 0.0};
  cplx trace_at_full{0.0, 0.0};
  cplx integral{0.0, 0.0};  // (1/pi) int_D f'(w) conj(g'(w)) dA
};

HeltonHoweResult helton_howe_check(const std::vector<cplx>& f, const std::vector<cplx>& g,
                                   int j_max);

// --- Example-1 style exact bases ---------------------------------------------

// e_j = (w^j + (conj(a) z) w^{j-1} + ... + (conj(a) z)^j)/R_j on the grid
// (j_max + 1, j_max); columns ordered by j.
SubspaceBasis example1_basis(cplx a, int j_max);

struct Example1Report {
  cplx a;
  int j_max = 0;
  double max_shift_entry_err = 0.0;  // S_z entries vs a R_j / R_{j+1}
  double max_commutator_err = 0.0;   // [S*_z, S_z] diagonal vs c_j
  double max_l0_err = 0.0;           // ||L0 e_j|| vs 1/R_j
  double min_cj = 0.0;               // hyponormality: c_j >= 0
  double off_diagonal_max = 0.0;     // commutator must be diagonal
};

Example1Report example1_suite(cplx a, int j_max);

// --- Moebius conjugation ------------------------------------------------------

// U_alpha f(z, w) = sqrt(1-|alpha|^2)/(1 - conj(alpha) w) f(z, x_alpha(w)).
CoeffGrid2D mobius_conjugate(cplx alpha, const CoeffGrid2D& F);

struct MobiusCheck {
  double resid_z = 0.0;       // || W S_z - S'_z W || on interior columns
  double resid_w = 0.0;       // || W x_alpha(S_w) - S'_w W || on interior columns
  double unitarity_dev = 0.0; // max |sigma(W restricted) - 1|
};

MobiusCheck mobius_identity_check(const Symbol& inner_sym, cplx alpha, int j_max);

}  // namespace nphi
