#include <doctest.h>

#include <cmath>
#include <random>

#include "nphi/subspace.hpp"
#include "oracles.hpp"

using namespace nphi;
using doctest::Approx;

namespace {
Symbol coordinate() { return Symbol::taylor({cplx{0.0, 0.0}, cplx{1.0, 0.0}}); }
Symbol affine() { return Symbol::taylor({cplx{0.8, 0.0}, cplx{0.4, 0.0}}); }

CoeffGrid2D ej_coordinate(int j, int I, int J) {
  // (w^j + w^{j-1} z + ... + z^j)/sqrt(j+1)
  CoeffGrid2D g(I, J);
  for (int l = 0; l <= j; ++l) g.set(l, j - l, cplx{1.0 / std::sqrt(j + 1.0), 0.0});
  return g;
}
}  // namespace

TEST_CASE("submodule_basis dimensions and first vector") {
  const SubspaceBasis M = submodule_basis(coordinate(), 2, 2, 2);
  CHECK(M.dim() == 4);  // generator Gram has full rank
  CHECK(M.gram_defect() < kGramTol);

  // (z - w)/sqrt(2) lies in the span
  CoeffGrid2D g(2, 2);
  g.set(1, 0, cplx{1.0 / std::sqrt(2.0), 0.0});
  g.set(0, 1, cplx{-1.0 / std::sqrt(2.0), 0.0});
  const CoeffGrid2D p = project(M, g);
  CHECK((p.mat() - g.mat()).norm() < 1e-12);
}

TEST_CASE("submodule_basis: affine symbol at the smallest grid") {
  const SubspaceBasis M = submodule_basis(affine(), 1, 1, 2);
  CHECK(M.dim() == 1);
  // the single generator is z - 0.8 - 0.4 w normalized
  const CoeffGrid2D c = M.column(0);
  const double scale = std::sqrt(1.0 + 0.64 + 0.16);
  CHECK(std::abs(std::abs(c.coeff(1, 0)) - 1.0 / scale) < 1e-12);
}

TEST_CASE("quotient_basis: complement dimension bookkeeping") {
  for (const Symbol& sym : {coordinate(), affine()}) {
    for (int I : {2, 5, 9}) {
      const int J = I + 1;
      const int d = sym.effective_degree(J);
      const SubspaceBasis M = submodule_basis(sym, I, J, d + 1);
      const SubspaceBasis N = quotient_basis(sym, I, J, d + 1);
      CHECK(M.dim() + N.dim() == (I + 1) * (J + 1));
      CHECK(N.gram_defect() < kGramTol);
    }
  }
}

TEST_CASE("quotient_basis equals the dense complement") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const std::vector<Symbol> symbols = {
      coordinate(), affine(), Symbol::blaschke({cplx{0.4, 0.1}}),
      Symbol::taylor({cplx{u(rng), u(rng)}, cplx{u(rng), u(rng)}, cplx{1.0, 0.0}})};
  for (const auto& sym : symbols) {
    const int J = 8, I = 7;
    const int d = sym.effective_degree(J);
    const SubspaceBasis a = quotient_basis(sym, I, J, d + 1);
    const SubspaceBasis b = quotient_basis_dense(sym, I, J, d + 1);
    CHECK(a.dim() == b.dim());
    CHECK(containment_angle_sin(a, b) < 1e-10);
    CHECK(containment_angle_sin(b, a) < 1e-10);
  }
}

TEST_CASE("quotient of the coordinate symbol reproduces the diagonal vectors") {
  const SubspaceBasis N = quotient_basis(coordinate(), 2, 2, 2);
  CHECK(N.dim() == 5);
  for (int j = 0; j <= 2; ++j) {
    const CoeffGrid2D e = ej_coordinate(j, 2, 2);
    const CoeffGrid2D p = project(N, e);
    CHECK((p.mat() - e.mat()).norm() < 1e-10);
  }
}

TEST_CASE("quotient and submodule are mutually orthogonal") {
  const SubspaceBasis M = submodule_basis(affine(), 6, 6, 2);
  const SubspaceBasis N = quotient_basis(affine(), 6, 6, 2);
  for (int k = 0; k < M.dim(); ++k) {
    const CoeffGrid2D p = project(N, M.column(k));
    CHECK(p.norm() < 1e-10);
  }
  // project(basis, b_k) = b_k on its own columns
  for (int k = 0; k < N.dim(); ++k) {
    const CoeffGrid2D p = project(N, N.column(k));
    CHECK((p.mat() - N.column(k).mat()).norm() < 1e-12);
  }
}

TEST_CASE("projected kernels stay fixed: the kernel lies in the quotient") {
  for (const Symbol& sym : {coordinate(), affine()}) {
    const SubspaceBasis N = quotient_basis(sym, 12, 12, sym.effective_degree(12) + 1);
    for (const cplx w0 : {cplx{0.0, 0.0}, cplx{-0.4, 0.2}}) {
      if (std::abs(sym.eval(w0)) >= 1.0) continue;
      const KernelPair k = kernel_function(sym, w0, 12, 12);
      const CoeffGrid2D p = project(N, k.raw);
      CHECK((p.mat() - k.raw.mat()).norm() / k.raw.norm() < 1e-10);
    }
  }
}

TEST_CASE("A_phi cross-validation spans sit inside the quotient") {
  for (double a : {0.5, 1.0, 2.0}) {
    const Symbol sym = Symbol::taylor({cplx{0.0, 0.0}, cplx{a, 0.0}});
    const int I = 10, J = 10, guard = 3;
    const SubspaceBasis N = quotient_basis(sym, I, J, guard);
    std::string note;
    const auto A = quotient_basis_aphi(sym, I, J, guard, &note);
    REQUIRE(A.has_value());
    // every cross-validation vector is inside the complement span
    CHECK(containment_angle_sin(*A, N) < 1e-6);
  }
}

TEST_CASE("A_phi cross-validation reports divergence cleanly") {
  // phi = 1.2 + w meets the disk near w = -1, but |phi(0)| > 1 makes the
  // membership sums grow geometrically
  std::string note;
  const auto A = quotient_basis_aphi(Symbol::taylor({cplx{1.2, 0.0}, cplx{1.0, 0.0}}), 80, 8, 2,
                                     &note);
  CHECK_FALSE(A.has_value());
  CHECK(note.find("diverging") != std::string::npos);
}

TEST_CASE("wandering_basis_z: dimension matches the shift-injectivity count") {
  for (const Symbol& sym : {coordinate(), affine()}) {
    const int I = 6, J = 7;
    const int d = sym.effective_degree(J);
    const SubspaceBasis W = wandering_basis_z(sym, I, J, d + 1);
    const SubspaceBasis Ma = submodule_basis(sym, I, J, d + 1);
    const SubspaceBasis Mb = submodule_basis(sym, I - 1, J, d + 1);
    CHECK(W.dim() == Ma.dim() - Mb.dim());
    CHECK(W.gram_defect() < kGramTol);
    // wandering vectors live inside M and orthogonal to z*M(I-1, J)
    for (int k = 0; k < W.dim(); ++k) {
      const CoeffGrid2D c = W.column(k);
      CHECK((project(Ma, c).mat() - c.mat()).norm() < 1e-9);
      const CoeffGrid2D back = backshift_z(c);
      CoeffGrid2D small(I - 1, J);
      small.mat() = back.mat().topRows(I);
      CHECK(project(Mb, small).norm() < 1e-9);
    }
  }
}

TEST_CASE("wandering_basis_z of the coordinate contains (z - w)/sqrt(2)") {
  const SubspaceBasis W = wandering_basis_z(coordinate(), 3, 3, 2);
  CoeffGrid2D x(3, 3);
  x.set(1, 0, cplx{1.0 / std::sqrt(2.0), 0.0});
  x.set(0, 1, cplx{-1.0 / std::sqrt(2.0), 0.0});
  CHECK((project(W, x).mat() - x.mat()).norm() < 1e-10);
}

TEST_CASE("wandering_basis_w mirrors the z version") {
  const Symbol sym = affine();
  const SubspaceBasis W = wandering_basis_w(sym, 6, 6, 2);
  const SubspaceBasis Ma = submodule_basis(sym, 6, 6, 2);
  const SubspaceBasis Mb = submodule_basis(sym, 6, 5, 2);
  CHECK(W.dim() == Ma.dim() - Mb.dim());
}

TEST_CASE("direct-sum decomposition recovers interior vectors by least squares") {
  // f in truncated M splits as h1 + (z - lambda) h2 with h1 wandering
  const Symbol sym = affine();
  const int I = 8, J = 8;
  const SubspaceBasis W = wandering_basis_z(sym, I, J, 2);
  const SubspaceBasis Msmall = submodule_basis(sym, I - 1, J, 2);
  const cplx lambda{0.3, 0.1};

  // columns: wandering vectors plus (z - lambda) * M(I-1, J) vectors
  const int amb = (I + 1) * (J + 1);
  Eigen::MatrixXcd cols(amb, W.dim() + Msmall.dim());
  cols.leftCols(W.dim()) = W.Q;
  for (int k = 0; k < Msmall.dim(); ++k) {
    CoeffGrid2D g = Msmall.column(k);
    CoeffGrid2D lift(I, J);
    lift.mat().bottomRows(I) = g.mat();
    lift.mat().topRows(I) -= lambda * g.mat();
    cols.col(W.dim() + k) = lift.flatten();
  }
  // guard-interior test vectors: generators supported well inside the grid
  const auto phi = sym.taylor_coeffs(1);
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2; ++j) {
      CoeffGrid2D f(I, J);
      f.set(i + 1, j, cplx{1.0, 0.0});
      f.set(i, j, -phi[0]);
      f.set(i, j + 1, -phi[1]);
      const Eigen::VectorXcd rhs = f.flatten();
      const Eigen::VectorXcd x = cols.colPivHouseholderQr().solve(rhs);
      CHECK((cols * x - rhs).norm() <= 1e-8 * rhs.norm());
    }
}

TEST_CASE("guard-interior split behaves on model-style bases") {
  SubspaceBasis b;
  b.label = BasisLabel::Model;
  b.I = 3;
  b.J = 3;
  b.guard = 2;
  b.Q = Eigen::MatrixXcd::Identity(16, 4);
  b.column_j = {0, 1, 2, 3};
  const Eigen::MatrixXcd V = b.interior_coords();
  CHECK(V.cols() == 2);  // j <= 3 - guard
}

TEST_CASE("guard-interior split finds decaying directions on the grid path") {
  const SubspaceBasis N = quotient_basis(affine(), 16, 16, 3);
  const Eigen::MatrixXcd V = N.interior_coords(1e-8);
  CHECK(V.cols() > 0);
  CHECK(V.cols() < N.dim());
  // selected directions really have tiny edge mass
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(N.ambient_dim());
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j)
      if (i > 13 || j > 13) mask(i * 17 + j) = 1.0;
  const Eigen::MatrixXcd cols = N.Q * V;
  for (int k = 0; k < cols.cols(); ++k) {
    double edge = 0.0;
    for (int r = 0; r < cols.rows(); ++r) edge += mask(r) * std::norm(cols(r, k));
    CHECK(edge < 1e-7);
  }
}

TEST_CASE("quotient_basis validates its preconditions") {
  CHECK_THROWS_AS(quotient_basis(affine(), 4, 4, 1), std::invalid_argument);  // guard < d + 1
  CHECK_THROWS_AS(quotient_basis(Symbol::taylor({cplx{3.0, 0.0}, cplx{1.0, 0.0}}), 4, 4, 2),
                  std::invalid_argument);  // image misses the disk
}
