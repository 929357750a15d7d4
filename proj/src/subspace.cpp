#include "nphi/subspace.hpp"

#include <cmath>
#include <stdexcept>

namespace nphi {

std::string to_string(BasisLabel label) {
  switch (label) {
    case BasisLabel::Submodule: return "M";
    case BasisLabel::Quotient: return "N";
    case BasisLabel::WanderingZ: return "MominusZM";
    case BasisLabel::WanderingW: return "MominusWM";
    case BasisLabel::Model: return "model";
    case BasisLabel::Custom: return "custom";
  }
  return "?";
}

namespace {

void check_symbol_usable(const Symbol& sym) {
  if (!image_meets_disk(sym))
    throw std::invalid_argument("subspace: phi(D) misses the open disk, the quotient is trivial");
}

// Orthonormalize columns in order (Householder QR, no pivoting so the
// column ladder survives). Columns are pre-normalized; near-dependence is
// rejected rather than silently dropped.
Eigen::MatrixXcd ordered_orthonormalize(Eigen::MatrixXcd V) {
  for (int k = 0; k < V.cols(); ++k) {
    const double n = V.col(k).norm();
    if (n == 0.0) throw std::runtime_error("subspace: zero spanning column");
    V.col(k) /= n;
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(V);
  const Eigen::MatrixXcd R = qr.matrixQR().topRows(V.cols()).triangularView<Eigen::Upper>();
  for (int k = 0; k < V.cols(); ++k)
    if (std::abs(R(k, k)) < 1e-12)
      throw std::runtime_error("subspace: spanning set numerically dependent");
  return qr.householderQ() * Eigen::MatrixXcd::Identity(V.rows(), V.cols());
}

// SVD-based orthonormal range with relative rank tolerance.
Eigen::MatrixXcd svd_range(const Eigen::MatrixXcd& V, int* rank_out) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > kRankTol * s(0)) ++rank;
  if (rank_out) *rank_out = rank;
  return svd.matrixU().leftCols(rank);
}

std::vector<cplx> expanded_symbol(const Symbol& sym, int J, int* degree_out) {
  const int d = sym.effective_degree(J);
  if (degree_out) *degree_out = d;
  auto phi = sym.taylor_coeffs(d);
  return phi;
}

}  // namespace

Eigen::MatrixXcd SubspaceBasis::interior_coords(double mass_tol) const {
  const int n = dim();
  if (!column_j.empty()) {
    int jmax = 0;
    for (int j : column_j) jmax = std::max(jmax, j);
    const int cut = jmax - guard;
    std::vector<int> keep;
    for (int k = 0; k < n; ++k)
      if (column_j[static_cast<size_t>(k)] <= cut) keep.push_back(k);
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n, static_cast<int>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) V(keep[c], static_cast<int>(c)) = 1.0;
    return V;
  }
  // edge band: z-degree > I - guard or w-degree > J - guard
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(ambient_dim());
  for (int i = 0; i <= I; ++i)
    for (int j = 0; j <= J; ++j)
      if (i > I - guard || j > J - guard) mask(i * (J + 1) + j) = 1.0;
  Eigen::MatrixXcd E = mask.asDiagonal() * Q;             // P_edge Q
  Eigen::MatrixXcd G = Q.adjoint() * E;                   // compressed edge mass form
  G = cplx{0.5, 0.0} * (G + Eigen::MatrixXcd(G.adjoint()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  int m = 0;
  for (int k = 0; k < n; ++k)
    if (es.eigenvalues()(k) <= mass_tol) ++m;
  return es.eigenvectors().leftCols(m);
}

double SubspaceBasis::gram_defect() const {
  const Eigen::MatrixXcd G = Q.adjoint() * Q;
  return (G - Eigen::MatrixXcd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

SubspaceBasis submodule_basis(const Symbol& sym, int I, int J, int guard) {
  check_symbol_usable(sym);
  int d = 0;
  const auto phi = expanded_symbol(sym, J, &d);
  if (I < 1 || J < d)
    throw std::invalid_argument("submodule_basis: grid too small for the symbol degree");
  const int gi = I, gj = J - d + 1;  // generators (z - phi) z^i w^j, i < I, j <= J - d
  if (gi * gj <= 0) throw std::invalid_argument("submodule_basis: empty generator set");
  const int amb = (I + 1) * (J + 1);
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(amb, gi * gj);
  int col = 0;
  for (int i = 0; i < gi; ++i)
    for (int j = 0; j < gj; ++j, ++col) {
      V((i + 1) * (J + 1) + j, col) += 1.0;  // z^{i+1} w^j
      for (int m = 0; m <= d; ++m) V(i * (J + 1) + j + m, col) -= phi[static_cast<size_t>(m)];
    }
  SubspaceBasis out;
  out.label = BasisLabel::Submodule;
  out.I = I;
  out.J = J;
  out.guard = guard;
  out.generator_count = gi * gj;
  int rank = 0;
  out.Q = svd_range(V, &rank);
  out.note = "rank " + std::to_string(rank) + " of " + std::to_string(gi * gj) + " generators";
  return out;
}

SubspaceBasis quotient_basis(const Symbol& sym, int I, int J, int guard) {
  check_symbol_usable(sym);
  int d = 0;
  const auto phi = expanded_symbol(sym, J, &d);
  if (I < 1 || J < d)
    throw std::invalid_argument("quotient_basis: grid too small for the symbol degree");
  if (guard < d + 1)
    throw std::invalid_argument("quotient_basis: guard must be at least deg(phi) + 1");
  const int cols = J + 1, icols = J - d;  // forced columns are 0..J-d
  const int amb = (I + 1) * cols;
  const int dim = (J + 1) + I * d;

  // row_{i+1} = (T*_phi row_i) restricted to the forced columns; the edge
  // columns of each subsequent row are free parameters.
  auto propagate = [&](Eigen::VectorXcd row) {
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(cols);
    for (int n = 0; n <= icols; ++n) {
      cplx acc{0.0, 0.0};
      for (int m = 0; m <= d && n + m <= J; ++m)
        acc += std::conj(phi[static_cast<size_t>(m)]) * row(n + m);
      next(n) = acc;
    }
    return next;
  };

  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(amb, dim);
  std::vector<int> seeds;
  int col = 0;
  for (int j0 = 0; j0 <= J; ++j0, ++col) {  // free row-0 seeds
    Eigen::VectorXcd row = Eigen::VectorXcd::Zero(cols);
    row(j0) = 1.0;
    for (int i = 0; i <= I; ++i) {
      V.block(i * cols, col, cols, 1) = row;
      if (i < I) row = propagate(row);
    }
    seeds.push_back(j0);
  }
  for (int i0 = 1; i0 <= I; ++i0)  // free edge-column seeds of rows 1..I
    for (int j0 = icols + 1; j0 <= J; ++j0, ++col) {
      Eigen::VectorXcd row = Eigen::VectorXcd::Zero(cols);
      row(j0) = 1.0;
      for (int i = i0; i <= I; ++i) {
        V.block(i * cols, col, cols, 1) = row;
        if (i < I) row = propagate(row);
      }
      seeds.push_back(J + 1);  // edge ladder position past every interior seed
    }

  SubspaceBasis out;
  out.label = BasisLabel::Quotient;
  out.I = I;
  out.J = J;
  out.guard = guard;
  out.Q = ordered_orthonormalize(std::move(V));
  out.note = "recursion complement, dim " + std::to_string(dim);
  return out;
}

SubspaceBasis quotient_basis_dense(const Symbol& sym, int I, int J, int guard) {
  if ((I + 1) * (J + 1) > 4096)
    throw std::invalid_argument("quotient_basis_dense: grid too large for the dense path");
  SubspaceBasis M = submodule_basis(sym, I, J, guard);
  const int amb = M.ambient_dim();
  // full SVD of the orthonormal M-columns: the trailing left singular vectors
  // span the complement
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M.Q, Eigen::ComputeFullU);
  SubspaceBasis out;
  out.label = BasisLabel::Quotient;
  out.I = I;
  out.J = J;
  out.guard = guard;
  out.Q = svd.matrixU().rightCols(amb - M.dim());
  out.note = "dense complement of the generator span";
  return out;
}

std::optional<SubspaceBasis> quotient_basis_aphi(const Symbol& sym, int I, int J, int guard,
                                                 std::string* note) {
  check_symbol_usable(sym);
  const int d = sym.effective_degree(J);
  const int mmax = J - guard;
  if (mmax < 0) throw std::invalid_argument("quotient_basis_aphi: guard exceeds J");
  (void)d;
  Eigen::MatrixXcd V((I + 1) * (J + 1), mmax + 1);
  for (int m = 0; m <= mmax; ++m) {
    CoeffSeries1D seed(J);
    seed.set(m, cplx{1.0, 0.0});
    APhiResult r = a_phi_series(sym, seed, I);
    if (r.diverging) {
      if (note) *note = "A_phi membership series diverging for seed w^" + std::to_string(m);
      return std::nullopt;
    }
    V.col(m) = r.grid.flatten();
  }
  SubspaceBasis out;
  out.label = BasisLabel::Quotient;
  out.I = I;
  out.J = J;
  out.guard = guard;
  out.Q = ordered_orthonormalize(std::move(V));
  out.note = "A_phi cross-validation span";
  return out;
}

namespace {

SubspaceBasis wandering_impl(const Symbol& sym, int I, int J, int guard, bool along_z) {
  check_symbol_usable(sym);
  // V = {degree-0 rows in the shifted variable} + shift * N(smaller grid);
  // intersect with M by solving <sum x_a v_a, n_b> = 0.
  SubspaceBasis Nfull = quotient_basis(sym, I, J, guard);
  SubspaceBasis Nsmall = along_z ? quotient_basis(sym, I - 1, J, guard)
                                 : quotient_basis(sym, I, J - 1, guard);
  const int amb = (I + 1) * (J + 1);
  const int mono = along_z ? (J + 1) : (I + 1);
  const int dimV = mono + Nsmall.dim();
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(amb, dimV);
  if (along_z) {
    for (int j = 0; j <= J; ++j) V(j, j) = 1.0;  // w^j at z-degree 0
    for (int k = 0; k < Nsmall.dim(); ++k) {
      CoeffGrid2D g = Nsmall.column(k);
      CoeffGrid2D lifted(I, J);
      lifted.mat().bottomRows(I) = g.mat();  // multiply by z
      V.col(mono + k) = lifted.flatten();
    }
  } else {
    for (int i = 0; i <= I; ++i) V(i * (J + 1), i) = 1.0;  // z^i at w-degree 0
    for (int k = 0; k < Nsmall.dim(); ++k) {
      CoeffGrid2D g = Nsmall.column(k);
      CoeffGrid2D lifted(I, J);
      lifted.mat().rightCols(J) = g.mat();  // multiply by w
      V.col(mono + k) = lifted.flatten();
    }
  }
  // x in null(C) with C_{b,a} = <v_a, n_b>
  Eigen::MatrixXcd C = Nfull.Q.adjoint() * V;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
  int rank = 0;
  const auto& s = svd.singularValues();
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > kRankTol * s(0)) ++rank;
  Eigen::MatrixXcd X = svd.matrixV().rightCols(dimV - rank);
  SubspaceBasis out;
  out.label = along_z ? BasisLabel::WanderingZ : BasisLabel::WanderingW;
  out.I = I;
  out.J = J;
  out.guard = guard;
  out.Q = V * X;  // orthonormal: V has orthonormal columns and X is isometric
  out.note = "wandering subspace, dim " + std::to_string(out.dim());
  return out;
}

}  // namespace

SubspaceBasis wandering_basis_z(const Symbol& sym, int I, int J, int guard) {
  return wandering_impl(sym, I, J, guard, true);
}

SubspaceBasis wandering_basis_w(const Symbol& sym, int I, int J, int guard) {
  return wandering_impl(sym, I, J, guard, false);
}

CoeffGrid2D project(const SubspaceBasis& basis, const CoeffGrid2D& F) {
  if (F.zdeg() != basis.I || F.wdeg() != basis.J)
    throw std::invalid_argument("project: ambient truncation mismatch");
  Eigen::VectorXcd f = F.flatten();
  Eigen::VectorXcd p = basis.Q * (basis.Q.adjoint() * f);
  return CoeffGrid2D::from_flat(p, basis.I, basis.J);
}

double max_principal_angle(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.I != b.I || a.J != b.J)
    throw std::invalid_argument("max_principal_angle: ambient mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.Q.adjoint() * b.Q);
  const int n = std::min(a.dim(), b.dim());
  double smin = svd.singularValues()(n - 1);
  smin = std::clamp(smin, -1.0, 1.0);
  return std::acos(smin);
}

double containment_angle_sin(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.I != b.I || a.J != b.J)
    throw std::invalid_argument("containment_angle_sin: ambient mismatch");
  const Eigen::MatrixXcd R = a.Q - b.Q * (b.Q.adjoint() * a.Q);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R);
  return svd.singularValues()(0);
}

}  // namespace nphi
