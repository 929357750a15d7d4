#include <doctest.h>

#include <random>
#include <sstream>

#include "nphi/hardy.hpp"
#include "oracles.hpp"

using namespace nphi;
using doctest::Approx;

namespace {
Symbol coordinate() { return Symbol::taylor({cplx{0.0, 0.0}, cplx{1.0, 0.0}}); }
Symbol affine() { return Symbol::taylor({cplx{0.8, 0.0}, cplx{0.4, 0.0}}); }
}  // namespace

TEST_CASE("toeplitz_adjoint: backward shift cases") {
  CoeffSeries1D f(3);
  f.set(2, cplx{1.0, 0.0});  // w^2
  const auto r1 = toeplitz_adjoint(coordinate(), f, 3);
  CHECK(r1.coeff(1) == cplx{1.0, 0.0});
  CHECK(r1.coeff(0) == cplx{0.0, 0.0});
  CHECK(r1.coeff(2) == cplx{0.0, 0.0});

  const auto r2 = toeplitz_adjoint(Symbol::taylor({cplx{0.0, 0.0}, cplx{2.0, 0.0}}), f, 3);
  CHECK(r2.coeff(1) == cplx{2.0, 0.0});
}

TEST_CASE("toeplitz_adjoint reproduces the kernel eigenvalue relation") {
  // T*_phi applied to the truncated Szego kernel at w0 multiplies it by
  // conj(phi(w0)) on the shared degrees
  const Symbol phi = affine();
  const cplx w0{0.5, 0.0};
  const int J = 64;
  CoeffSeries1D k(J);
  cplx p{1.0, 0.0};
  for (int j = 0; j <= J; ++j) {
    k.set(j, p);
    p *= std::conj(w0);
  }
  const auto img = toeplitz_adjoint(phi, k, J - 1);
  const cplx ev = std::conj(phi.eval(w0));
  for (int j = 0; j + 1 <= J - 1; ++j) CHECK(std::abs(img.coeff(j) - ev * k.coeff(j)) < 1e-13);
}

TEST_CASE("composition law: T*_phi T*_psi = T*_{psi phi} on random polynomials") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pc = oracle::random_poly(rng, 2 + trial % 4);
    const auto qc = oracle::random_poly(rng, 1 + trial % 3);
    const auto gc = oracle::random_poly(rng, 8);
    const Symbol phi = Symbol::taylor(pc), psi = Symbol::taylor(qc);
    const CoeffSeries1D g = CoeffSeries1D::from(gc);
    const auto inner = toeplitz_adjoint(psi, g, g.degree());
    const auto lhs = toeplitz_adjoint(phi, inner, g.degree());
    const Symbol prod = Symbol::taylor(oracle::conv(qc, pc));
    const auto rhs = toeplitz_adjoint(prod, g, g.degree());
    for (int j = 0; j <= g.degree(); ++j) CHECK(std::abs(lhs.coeff(j) - rhs.coeff(j)) < 1e-12);
  }
}

TEST_CASE("factored iteration: T*^n_h b^{m-n} g = T*^n_phi b^m g") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> mag(0.1, 0.6), arg(0.0, 6.28);
  const int D = 220;
  for (int trial = 0; trial < 100; ++trial) {
    const cplx mu = std::polar(mag(rng), arg(rng));
    const Symbol b = Symbol::blaschke({mu});
    const auto hc = oracle::random_poly(rng, 1 + trial % 3);
    const auto gc = oracle::random_poly(rng, 4);
    const Symbol h = Symbol::taylor(hc);
    const auto bexp = b.taylor_coeffs(D);
    const auto hexp = h.taylor_coeffs(D);
    const auto phiexp = series_multiply(bexp, hexp, D);

    const int m = 2 + trial % 3, n = 1 + trial % m;
    auto bpow = [&](int p) { return series_power(bexp, p, D); };
    // lhs: T*^n_h applied to b^{m-n} g
    Eigen::VectorXcd lhs = CoeffSeries1D::from(series_multiply(bpow(m - n), gc, D)).vec();
    for (int k = 0; k < n; ++k) lhs = toeplitz_adjoint_raw(hexp, lhs, D);
    // rhs: T*^n_phi applied to b^m g
    Eigen::VectorXcd rhs = CoeffSeries1D::from(series_multiply(bpow(m), gc, D)).vec();
    for (int k = 0; k < n; ++k) rhs = toeplitz_adjoint_raw(phiexp, rhs, D);
    for (int j = 0; j <= 40; ++j) CHECK(std::abs(lhs(j) - rhs(j)) < 1e-12);
  }
}

TEST_CASE("a_phi_series: weighted coordinate terminates") {
  CoeffSeries1D f(2);
  f.set(2, cplx{1.0, 0.0});
  const auto r = a_phi_series(Symbol::taylor({cplx{0.0, 0.0}, cplx{2.0, 0.0}}), f, 2);
  CHECK(r.grid.coeff(0, 2) == cplx{1.0, 0.0});
  CHECK(r.grid.coeff(1, 1) == cplx{2.0, 0.0});
  CHECK(r.grid.coeff(2, 0) == cplx{4.0, 0.0});
  CHECK_FALSE(r.diverging);
}

TEST_CASE("a_phi_series: constant seed under the coordinate symbol") {
  CoeffSeries1D f(2);
  f.set(0, cplx{1.0, 0.0});
  const auto r = a_phi_series(coordinate(), f, 3);
  CHECK(r.grid.coeff(0, 0) == cplx{1.0, 0.0});
  CHECK(r.grid.norm() == Approx(1.0));
}

TEST_CASE("a_phi_series: frozen partial sums for the affine symbol") {
  // hand convolution: rows 1, 0.8, 0.64; sums 1, 1.64, 2.0496
  CoeffSeries1D f(2);
  f.set(0, cplx{1.0, 0.0});
  const auto r = a_phi_series(affine(), f, 2);
  CHECK(std::abs(r.grid.coeff(1, 0) - cplx{0.8, 0.0}) < 1e-15);
  CHECK(std::abs(r.grid.coeff(2, 0) - cplx{0.64, 0.0}) < 1e-15);
  REQUIRE(r.partial_sums.size() == 3);
  CHECK(r.partial_sums[0] == Approx(1.0));
  CHECK(r.partial_sums[1] == Approx(1.64));
  CHECK(r.partial_sums[2] == Approx(2.0496));
}

TEST_CASE("a_phi_series flags divergence without throwing") {
  CoeffSeries1D f(0);
  f.set(0, cplx{1.0, 0.0});
  const auto r = a_phi_series(Symbol::taylor({cplx{1.5, 0.0}}), f, 60);
  CHECK(r.diverging);
}

TEST_CASE("left/right evaluation") {
  // F = z^2 w + 3 w^2
  CoeffGrid2D F(2, 2);
  F.set(2, 1, cplx{1.0, 0.0});
  F.set(0, 2, cplx{3.0, 0.0});
  const auto l = eval_left(F, cplx{0.0, 0.0});
  CHECK(l.coeff(2) == cplx{3.0, 0.0});
  CHECK(l.coeff(1) == cplx{0.0, 0.0});
  const auto r = eval_right(F, cplx{0.0, 0.0});
  CHECK(r.norm() == 0.0);
  const auto l2 = eval_left(F, cplx{0.5, 0.0});
  CHECK(std::abs(l2.coeff(1) - cplx{0.25, 0.0}) < 1e-15);
  CHECK_THROWS_AS((void)eval_left(F, cplx{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("left evaluation inverts the A_phi construction at 0") {
  std::mt19937 rng(31);
  const auto fc = oracle::random_poly(rng, 6);
  const CoeffSeries1D f = CoeffSeries1D::from(fc);
  const auto r = a_phi_series(affine(), f, 5);
  const auto back = eval_left(r.grid, cplx{0.0, 0.0});
  for (int j = 0; j <= 6; ++j) CHECK(std::abs(back.coeff(j) - f.coeff(j)) < 1e-15);
}

TEST_CASE("shift operations and the truncation contract") {
  CoeffGrid2D F(2, 2);
  F.set(2, 1, cplx{1.0, 0.0});  // z^2 w
  const auto b = backshift_z(F);
  CHECK(b.coeff(1, 1) == cplx{1.0, 0.0});
  CHECK(backshift_z(backshift_z(b)).norm() == 0.0);

  CoeffGrid2D G(1, 1);
  G.set(0, 0, cplx{1.0, 0.0});
  G.set(0, 1, cplx{1.0, 0.0});  // 1 + w
  const auto mz = mult_z(G);
  CHECK(mz.coeff(1, 0) == cplx{1.0, 0.0});
  CHECK(mz.coeff(1, 1) == cplx{1.0, 0.0});
  CHECK_FALSE(mz.truncated());
  CHECK_THROWS_AS((void)mult_z(mz), std::runtime_error);
  const auto cut = mult_z(mz, /*allow_truncate=*/true);
  CHECK(cut.truncated());
  CHECK(cut.norm() == 0.0);
}

TEST_CASE("multiplicativity across separated variables") {
  // ||phi(w) f(z)|| = ||phi|| ||f|| exactly in coefficient arithmetic
  std::mt19937 rng(41);
  const auto pc = oracle::random_poly(rng, 5);
  const auto fc = oracle::random_poly(rng, 4);
  CoeffGrid2D F(4, 5);
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 5; ++j) F.set(i, j, fc[(size_t)i] * pc[(size_t)j]);
  const double pn = CoeffSeries1D::from(pc).norm(), fn = CoeffSeries1D::from(fc).norm();
  CHECK(F.norm() == Approx(pn * fn).epsilon(1e-14));
}

TEST_CASE("Parseval: grid norm squares to the row sum") {
  std::mt19937 rng(43);
  CoeffGrid2D F(3, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 4; ++j) F.set(i, j, cplx{u(rng), u(rng)});
  double rows = 0.0;
  for (int i = 0; i <= 3; ++i) rows += F.mat().row(i).squaredNorm();
  CHECK(F.norm() * F.norm() == Approx(rows).epsilon(1e-14));
}

TEST_CASE("kernel_function frozen norms") {
  // phi = w at w0 = 0: the kernel is the constant 1
  const KernelPair k0 = kernel_function(coordinate(), cplx{0.0, 0.0}, 4, 4);
  CHECK(k0.raw.norm() == Approx(1.0));
  CHECK(k0.raw.coeff(0, 0) == cplx{1.0, 0.0});

  // phi(w0) = 0, w0 = 0.5: ||k||^2 = 1/(1 - 0.25) = 4/3
  const KernelPair k1 =
      kernel_function(Symbol::taylor({cplx{-0.5, 0.0}, cplx{1.0, 0.0}}), cplx{0.5, 0.0}, 8, 220);
  CHECK(k1.raw.norm() * k1.raw.norm() == Approx(4.0 / 3.0).epsilon(1e-10));

  // affine symbol at 0: 1/(1 - 0.8 z) tensor 1, squared norm 1/0.36
  auto [I, J] = kernel_truncation(affine(), cplx{0.0, 0.0});
  const KernelPair k2 = kernel_function(affine(), cplx{0.0, 0.0}, I, J);
  CHECK(k2.raw.norm() * k2.raw.norm() == Approx(1.0 / 0.36).epsilon(1e-10));
  CHECK(k2.normalized.norm() == Approx(1.0).epsilon(1e-9));
  CHECK(k2.tail_norm_bound < kKernelTailTol * 1.01);
}

TEST_CASE("kernel_function rejects points outside Omega_phi") {
  CHECK_THROWS_AS(kernel_function(Symbol::taylor({cplx{2.0, 0.0}, cplx{1.0, 0.0}}),
                                  cplx{0.0, 0.0}, 4, 4),
                  std::invalid_argument);
}

TEST_CASE("grid csv dump") {
  CoeffGrid2D F(1, 1);
  F.set(1, 0, cplx{0.5, -1.0});
  std::ostringstream os;
  write_grid_csv(F, os);
  CHECK(os.str() == "i,j,re,im\n1,0,0.5,-1\n");
}
