#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nphi/spectra.hpp"

using namespace nphi;
using doctest::Approx;

namespace {
Symbol coordinate() { return Symbol::taylor({cplx{0.0, 0.0}, cplx{1.0, 0.0}}); }
Symbol affine() { return Symbol::taylor({cplx{0.8, 0.0}, cplx{0.4, 0.0}}); }
Symbol shifted() { return Symbol::taylor({cplx{-0.5, 0.0}, cplx{1.0, 0.0}}); }

// deterministic sample of Omega_phi points with margins in both coordinates
std::vector<cplx> omega_samples(const Symbol& sym, double max_abs, double max_image, int want) {
  std::vector<cplx> out;
  for (double r : {0.15, 0.25, 0.35, 0.45, 0.5, 0.55, 0.6}) {
    for (int t = 0; t < 32 && static_cast<int>(out.size()) < want; ++t) {
      const cplx a = std::polar(r, 2.0 * std::numbers::pi * t / 32);
      if (std::abs(a) <= max_abs && std::abs(sym.eval(a)) <= max_image) out.push_back(a);
    }
    if (static_cast<int>(out.size()) >= want) break;
  }
  return out;
}
}  // namespace

TEST_CASE("spectrum of the truncated Bergman block is nilpotent") {
  const SubspaceBasis E = example1_basis(cplx{1.0, 0.0}, 16);
  const CompressedOperator Sz = compress_shift('z', E);
  const auto eigs = spectrum_truncated(Sz, E.interior_coords());
  for (const cplx& e : eigs) CHECK(std::abs(e) < 1e-8);
}

TEST_CASE("1x1 compression returns its single entry") {
  CompressedOperator op;
  op.A = Eigen::MatrixXcd::Constant(1, 1, cplx{0.3, 0.1});
  const auto eigs = spectrum_truncated(op, Eigen::MatrixXcd());
  REQUIRE(eigs.size() == 1);
  CHECK(std::abs(eigs[0] - cplx{0.3, 0.1}) < 1e-15);
}

TEST_CASE("interior spectrum stays near the image region") {
  const Symbol sym = affine();
  const SubspaceBasis N = quotient_basis(sym, 24, 24, 3);
  const CompressedOperator Sz = compress_shift('z', N);
  const double tol = 3.0 * std::sqrt(std::numbers::pi / 16384.0);
  const SpectralReport rep = spectral_inclusion_report(sym, Sz, N.interior_coords(), tol);
  CHECK(rep.inclusion_violations.empty());
  CHECK(rep.max_region_distance <= tol);
  // the image region of the affine symbol is the lens disk(0.8, 0.4) cap D
  for (const cplx& e : rep.eigenvalues) {
    CHECK(std::abs(e - cplx{0.8, 0.0}) < 0.4 + 0.05);
    CHECK(std::abs(e) < 1.0 + 1e-9);
  }
}

TEST_CASE("inclusion distance shrinks along the ladder") {
  const Symbol sym = affine();
  auto maxdist = [&](int size) {
    const SubspaceBasis N = quotient_basis(sym, size, size, 3);
    const CompressedOperator Sz = compress_shift('z', N);
    const SpectralReport rep = spectral_inclusion_report(sym, Sz, N.interior_coords(), 1.0);
    return rep.max_region_distance;
  };
  const double a = maxdist(12), b = maxdist(24);
  CHECK(b <= a + 1e-3);
}

TEST_CASE("point-spectrum witnesses at frozen points") {
  // phi = w at w0 = 0: the kernel is constant, the residual vanishes
  CHECK(point_spectrum_witness(coordinate(), cplx{0.0, 0.0}, 8, 8) < 1e-15);
  // phi = w at w0 = 0.5 with the tail-rule truncation
  {
    auto [I, J] = witness_truncation(coordinate(), cplx{0.5, 0.0}, 1e-9);
    CHECK(point_spectrum_witness(coordinate(), cplx{0.5, 0.0}, I, J) < 1e-8);
  }
  // affine symbol at 0: eigenvalue 0.8
  {
    auto [I, J] = witness_truncation(affine(), cplx{0.0, 0.0}, 1e-7);
    CHECK(point_spectrum_witness(affine(), cplx{0.0, 0.0}, I, J) < 1e-6);
  }
}

TEST_CASE("projected and bound-path witnesses agree at moderate size") {
  const Symbol sym = affine();
  const SubspaceBasis N = quotient_basis(sym, 40, 40, 3);
  const cplx w0{-0.4, 0.1};
  const double via_basis = point_spectrum_witness(sym, w0, N);
  const double via_bound = point_spectrum_witness(sym, w0, 40, 40);
  CHECK(via_basis <= via_bound * (1.0 + 1e-6) + 1e-12);
  CHECK(via_bound < 1e-5);
}

TEST_CASE("fredholm probe: coordinate symbol carries index -1 everywhere inside") {
  const Symbol sym = coordinate();
  const SubspaceBasis N = quotient_basis(sym, 32, 32, 3);
  const CompressedOperator Sw = compress_shift('w', N);
  const Eigen::MatrixXcd Vint = N.interior_coords();
  for (const cplx& a : omega_samples(sym, 0.6, 0.63, 10)) {
    const FredholmResult f = fredholm_probe(Sw, a, Vint);
    CHECK_FALSE(f.indeterminate);
    CHECK(f.ker_dim == 0);
    CHECK(f.coker_dim == 1);
    CHECK(f.index == f.ker_dim - f.coker_dim);
  }
}

TEST_CASE("fredholm probe: squared coordinate gives index -2 for the z shift") {
  const Symbol sym = Symbol::taylor({cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0}});
  const SubspaceBasis N = quotient_basis(sym, 32, 32, 3);
  const CompressedOperator Sz = compress_shift('z', N);
  const FredholmResult f = fredholm_probe(Sz, cplx{0.0, 0.0}, N.interior_coords());
  CHECK_FALSE(f.indeterminate);
  CHECK(f.ker_dim == 0);
  CHECK(f.coker_dim == 2);
  CHECK(f.index == -2);
}

TEST_CASE("fredholm probe: identity control") {
  CompressedOperator id;
  id.A = Eigen::MatrixXcd::Identity(24, 24);
  const FredholmResult f = fredholm_probe(id, cplx{0.4, 0.1}, Eigen::MatrixXcd());
  CHECK_FALSE(f.indeterminate);
  CHECK(f.ker_dim == 0);
  CHECK(f.coker_dim == 0);
  CHECK(f.index == 0);
}

TEST_CASE("norm report converges to the closed forms on the interior") {
  const Symbol sym = affine();
  const SubspaceBasis N = quotient_basis(sym, 40, 40, 4);
  const NormReport r = norm_report(sym, N);
  CHECK(r.expected_l0 == Approx(std::sqrt(0.84)).epsilon(1e-12));
  CHECK(r.expected_szstar_min == Approx(0.4).epsilon(1e-12));
  CHECK(std::abs(r.l0_norm_interior - r.expected_l0) < 2e-2);
  CHECK(std::abs(r.szstar_min_interior - r.expected_szstar_min) < 2e-2);
}

TEST_CASE("norm report: contractive symbol norm") {
  const Symbol sym = Symbol::taylor({cplx{0.0, 0.0}, cplx{0.5, 0.0}});
  const SubspaceBasis N = quotient_basis(sym, 40, 40, 3);
  const NormReport r = norm_report(sym, N);
  CHECK(r.expected_sz == Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(r.sz_norm_interior - 0.5) < 1e-2);
}

TEST_CASE("essential witness identities along the dyadic path") {
  const Symbol sym = shifted();
  std::vector<cplx> path;
  for (int j = 0; j <= 10; ++j) path.emplace_back(1.0 - std::pow(2.0, -j), 0.0);
  const EssentialWitnessTable t = essential_witness(sym, path);
  REQUIRE(t.rows.size() == path.size());
  for (const auto& row : t.rows) {
    if (!row.in_domain) continue;
    CHECK(std::abs(row.l0k_computed - row.l0k_expected) < 1e-6);
    CHECK(std::abs(row.szk_computed - row.szk_expected) < 1e-6);
  }
  CHECK(std::abs(t.l0_limit_extrapolated - std::sqrt(0.75)) < 1e-2);
}

TEST_CASE("essential witness on an inner symbol heads to zero") {
  // gamma = 1 for inner symbols: the witness values head to 0
  const Symbol sym = Symbol::blaschke({cplx{0.3, 0.0}});
  std::vector<cplx> path;
  for (int j = 1; j <= 8; ++j) path.emplace_back(1.0 - std::pow(2.0, -j), 0.0);
  const EssentialWitnessTable t = essential_witness(sym, path);
  double last = 1.0;
  for (const auto& row : t.rows) {
    CHECK(row.in_domain);  // Omega of an inner symbol is the whole disk
    last = row.l0k_computed;
  }
  CHECK(last < 0.2);  // 1 - |phi|^2 -> 0 along the path
}

TEST_CASE("compactness probe: contractive weighted shift stays bounded below") {
  const Symbol sym = Symbol::taylor({cplx{0.0, 0.0}, cplx{0.5, 0.0}});
  const CompactnessProfile p = compactness_probe(sym, {24, 48, 96});
  CHECK(p.verdict_l0 == "bounded-below");
  CHECK(p.floor_l0 >= std::sqrt(0.75) - 1e-6);
}

TEST_CASE("compactness probe: the coordinate symbol decays at the exact rate") {
  const Symbol sym = Symbol::blaschke({cplx{0.0, 0.0}});
  const CompactnessProfile p = compactness_probe(sym, {24, 48, 96});
  CHECK(p.verdict_l0 == "decaying");
  const auto& svs = p.l0_singular_values.back();
  for (size_t k = 0; k < svs.size(); ++k)
    CHECK(std::abs(svs[k] - 1.0 / std::sqrt(k + 1.0)) < 1e-9);
  REQUIRE_FALSE(p.dz_singular_values.empty());
  CHECK(p.verdict_dz == "decaying");
  const auto& dsvs = p.dz_singular_values.back();
  for (size_t k = 0; k + 2 < dsvs.size(); ++k)
    CHECK(std::abs(dsvs[k] - 1.0 / std::sqrt(k + 2.0)) < 1e-8);
}

TEST_CASE("compactness probe: expanding weighted shift decays") {
  const Symbol sym = Symbol::taylor({cplx{0.0, 0.0}, cplx{2.0, 0.0}});
  const CompactnessProfile p = compactness_probe(sym, {24, 48, 96});
  CHECK(p.verdict_l0 == "decaying");
}

TEST_CASE("closed range witnesses respect the outer-part bound") {
  // phi = w - 0.5 factors through h = 1 - 0.5 w; |h| -> 0.5 along the path
  const Symbol sym = shifted();
  std::vector<cplx> path;
  for (int j = 2; j <= 8; ++j) path.emplace_back(1.0 - std::pow(2.0, -j), 0.0);
  const ClosedRangeReport rep = closed_range_witness(sym, path, 48, 220);
  REQUIRE_FALSE(rep.rows.empty());
  for (size_t k = 0; k < rep.rows.size(); ++k) {
    CHECK(rep.rows[k].ratio <= rep.rows[k].bound * 1.01);
    if (k) CHECK(rep.rows[k].bound <= rep.rows[k - 1].bound + 1e-12);
  }
  // the bound falls toward its limit value 0.5/sqrt(0.75)
  CHECK(rep.rows.back().bound < 0.59);
  CHECK(rep.rows.back().bound >= 0.5 / std::sqrt(0.75) - 1e-12);
}

TEST_CASE("closed range lower bound for a bounded-below symbol") {
  const Symbol sym = affine();  // alpha = 0.4 > 0, Blaschke part constant
  const SubspaceBasis N = quotient_basis(sym, 40, 40, 4);
  const ClosedRangeReport rep = closed_range_witness(sym, {}, 40, 40, &N);
  CHECK(rep.szstar_min_lower_bound == Approx(0.4 / std::sqrt(1.16)).epsilon(1e-12));
  CHECK(rep.szstar_min_observed >= rep.szstar_min_lower_bound - 1e-9);
}

TEST_CASE("closed range observed minimum for the coordinate symbol") {
  // h = 1, alpha = 1: the bound is 1/sqrt(2) and the exact model meets it
  const Symbol sym = coordinate();
  const SubspaceBasis N = quotient_basis(sym, 32, 32, 2);
  const ClosedRangeReport rep = closed_range_witness(sym, {}, 32, 32, &N);
  CHECK(rep.szstar_min_lower_bound == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.szstar_min_observed >= rep.szstar_min_lower_bound - 1e-6);
}

TEST_CASE("norm chain: evaluation operator and shift-adjoint minimum") {
  // 1 - sup ||L0 F||^2 = inf ||S*_z F||^2 on matched interior vectors
  const Symbol sym = affine();
  const SubspaceBasis N = quotient_basis(sym, 40, 40, 4);
  const NormReport r = norm_report(sym, N);
  const double lhs = 1.0 - r.l0_norm_interior * r.l0_norm_interior;
  const double rhs = r.szstar_min_interior * r.szstar_min_interior;
  CHECK(std::abs(lhs - rhs) < 1e-2);
}

TEST_CASE("kernel of the adjoint shift counts the Blaschke degree") {
  // ker S*_z is the model space of the inner factor
  struct Case {
    Symbol sym;
    int expected_dim;
    int size;  // big enough for the interior split to resolve the kernel
  };
  const std::vector<Case> cases = {
      {Symbol::taylor({cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0}}), 2, 24},
      {affine(), 0, 24},
      {shifted(), 1, 44}};
  for (const auto& c : cases) {
    const SubspaceBasis N = quotient_basis(c.sym, c.size, c.size, 4);
    const Eigen::MatrixXcd Szst = compress_shift('z', N).A.adjoint();
    const Eigen::MatrixXcd V = N.interior_coords();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Szst * V);
    const auto& s = svd.singularValues();
    int small = 0;
    for (int k = 0; k < s.size(); ++k)
      if (s(k) < 1e-6 * s(0)) ++small;
    CHECK(small == c.expected_dim);
  }
}

TEST_CASE("defect adjoint is injective on interior quotient vectors") {
  const Symbol sym = Symbol::blaschke({cplx{0.0, 0.0}});
  const int jm = 20;
  auto [I, J] = basis_E_grid(sym, jm);
  const ModelSpaceBasis m = takenaka_basis(sym.as_blaschke(), J);
  const SubspaceBasis E = basis_E(m, sym, jm, I, J, 3);
  const SubspaceBasis X = basis_X(m, sym, jm - 1, I, J, 3);
  const CompressedOperator Dz = defect_dz(X, E);
  const Eigen::MatrixXcd V = E.interior_coords();
  // D*_z E_{k,j} = X_{k,j}/sqrt(j+2): smallest restricted singular value
  const double smin = restricted_sigma_min(Eigen::MatrixXcd(Dz.A.adjoint()), V);
  CHECK(smin > 0.9 / std::sqrt(jm - 3 + 2.0));
}

TEST_CASE("mixed commutator Hilbert-Schmidt norms stabilize along the ladder") {
  const Symbol sym = affine();
  std::vector<double> values;
  for (int size : {24, 32, 48}) {
    const SubspaceBasis N = quotient_basis(sym, size, size, 4);
    const Eigen::MatrixXcd Sz = compress_shift('z', N).A;
    const Eigen::MatrixXcd Sw = compress_shift('w', N).A;
    const Eigen::MatrixXcd V = N.interior_coords();
    values.push_back(Eigen::MatrixXcd(V.adjoint() * adjoint_commutator(Sz, Sw) * V).norm());
  }
  CHECK(std::abs(values[1] - values[0]) < 5e-3);
  CHECK(std::abs(values[2] - values[1]) < 1e-3);

  // inner case: the tensor model pins the limit at sqrt(pi^2/3 - 3)
  const Symbol in = Symbol::blaschke({cplx{0.0, 0.0}, cplx{0.5, 0.0}});
  auto [I, J] = basis_E_grid(in, 32);
  const ModelSpaceBasis m = takenaka_basis(in.as_blaschke(), J);
  const SubspaceBasis E = basis_E(m, in, 32, I, J, 4);
  const Eigen::MatrixXcd V = E.interior_coords();
  const Eigen::MatrixXcd C =
      adjoint_commutator(compress_shift('z', E).A, compress_shift('w', E).A);
  const double want = std::sqrt(std::numbers::pi * std::numbers::pi / 3.0 - 3.0);
  CHECK(std::abs(Eigen::MatrixXcd(V.adjoint() * C * V).norm() - want) < 1e-3);
}

TEST_CASE("both self-commutators decay for a finite Blaschke symbol") {
  const Symbol in = Symbol::blaschke({cplx{0.0, 0.0}, cplx{0.5, 0.0}});
  auto svs_at = [&](int jm) {
    auto [I, J] = basis_E_grid(in, jm);
    const ModelSpaceBasis m = takenaka_basis(in.as_blaschke(), J);
    const SubspaceBasis E = basis_E(m, in, jm, I, J, 4);
    const Eigen::MatrixXcd V = E.interior_coords();
    const Eigen::MatrixXcd Sz = compress_shift('z', E).A;
    const Eigen::MatrixXcd Sw = compress_shift('w', E).A;
    auto svs = [&](const Eigen::MatrixXcd& C) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(V.adjoint() * C * V));
      return svd.singularValues();
    };
    return std::make_pair(svs(adjoint_commutator(Sz, Sz)), svs(adjoint_commutator(Sw, Sw)));
  };
  const auto [z16, w16] = svs_at(16);
  const auto [z32, w32] = svs_at(32);
  // fixed-rank values are stable while the trailing values fall off
  CHECK(std::abs(z32(4) - z16(4)) < 1e-8);
  CHECK(std::abs(w32(4) - w16(4)) < 1e-6);
  CHECK(z32(z32.size() - 1) < 0.05 * z32(0));
  CHECK(w32(w32.size() - 1) < 0.05 * w32(0));
}

TEST_CASE("svdecay csv dump") {
  CompactnessProfile p;
  p.sizes = {4};
  p.l0_singular_values = {{1.0, 0.5}};
  std::ostringstream os;
  write_svdecay_csv(p, os);
  CHECK(os.str() == "trunc_size,rank,sigma\n4,0,1\n4,1,0.5\n");
}

TEST_CASE("region cloud and csv emitters") {
  const auto cloud = region_cloud(affine(), 4096);
  CHECK(cloud.size() > 1000);
  for (const cplx& p : cloud) {
    CHECK(std::abs(p) <= 1.0 + 1e-9);
    CHECK(std::abs(p - cplx{0.8, 0.0}) <= 0.4 + 1e-9);
  }
  CHECK(region_distance(cloud, cplx{0.8, 0.0}) < 0.05);

  std::ostringstream os;
  write_spectrum_csv({cplx{1.0, -2.0}}, os);
  CHECK(os.str() == "re,im\n1,-2\n");
}
