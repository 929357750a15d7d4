#pragma once

#include <string>
#include <vector>

#include "nphi/innermodel.hpp"
#include "nphi/jordan.hpp"
#include "nphi/subspace.hpp"

namespace nphi {

// Eigenvalues of the guard-interior compression V^H A V of a square
// compressed operator.
std::vector<cplx> spectrum_truncated(const CompressedOperator& S, const Eigen::MatrixXcd& Vint);

// Sample cloud of the closed region phi(closed D) intersect closed D.
std::vector<cplx> region_cloud(const Symbol& sym, int target_points = 16384);

// Distance from z to the cloud (nearest neighbor).
double region_distance(const std::vector<cplx>& cloud, cplx z);

// || S*_z k - conj(phi(w0)) k || / ||k|| for the grid-truncated kernel of
// the point w0 in Omega_phi. The N-free variant bounds the projected
// residual from above (the kernel lies in the truncated quotient exactly
// for polynomial symbols); the basis variant projects explicitly.
double point_spectrum_witness(const Symbol& sym, cplx w0, int I, int J);
double point_spectrum_witness(const Symbol& sym, cplx w0, const SubspaceBasis& N);

// Grid degrees from the geometric tail rule for a target witness residual.
std::pair<int, int> witness_truncation(const Symbol& sym, cplx w0, double target_residual);

struct FredholmResult {
  int ker_dim = 0;
  int coker_dim = 0;
  int index = 0;
  bool indeterminate = false;
  double gap = 0.0;  // ratio guarding the singular-value count
};

// Kernel/cokernel of S - lambda by singular-value counts on the domain
// restricted to the guard-interior subspace; a cluster straddling the
// threshold reports indeterminate rather than a silent count.
FredholmResult fredholm_probe(const CompressedOperator& S, cplx lambda,
                              const Eigen::MatrixXcd& Vint,
                              double rel_tol = kFredholmRelTol,
                              double gap_factor = kFredholmGapFactor);

struct NormReport {
  double l0_norm = 0.0;             // sup ||L(0) F|| / ||F|| over the truncated quotient
  double l0_norm_interior = 0.0;
  double szstar_min = 0.0;          // inf ||S*_z F|| / ||F||
  double szstar_min_interior = 0.0;
  double sz_norm_interior = 0.0;    // ||S_z|| on guard-interior vectors
  double expected_l0 = 0.0;         // sqrt(1 - alpha^2)
  double expected_szstar_min = 0.0; // alpha
  double expected_sz = 0.0;         // min(sup|phi|, 1)
};

NormReport norm_report(const Symbol& sym, const SubspaceBasis& N);

struct EssentialWitnessRow {
  cplx w{0.0, 0.0};
  bool in_domain = false;     // w in Omega_phi
  double l0k_computed = 0.0;  // ||L(0) k_w||
  double l0k_expected = 0.0;  // sqrt(1 - |phi(w)|^2)
  double szk_computed = 0.0;  // ||S*_z k_w||
  double szk_expected = 0.0;  // |phi(w)|
};

struct EssentialWitnessTable {
  std::vector<EssentialWitnessRow> rows;
  double l0_limit_extrapolated = 0.0;  // trend of the L(0) witness values
};

EssentialWitnessTable essential_witness(const Symbol& sym, const std::vector<cplx>& path);

struct CompactnessProfile {
  std::vector<int> sizes;
  std::vector<std::vector<double>> l0_singular_values;  // sorted descending, per size
  std::vector<std::vector<double>> dz_singular_values;  // empty when unavailable
  std::string verdict_l0;  // "decaying" | "bounded-below" | "inconclusive"
  std::string verdict_dz;
  double floor_l0 = 0.0;   // smallest retained singular value at the largest size
};

// Singular-value decay of L(0) (and D_z for inner symbols) along a ladder of
// truncation sizes. Symbols a*w and finite Blaschke products ride their
// closed-form bases; other symbols use the grid quotient.
CompactnessProfile compactness_probe(const Symbol& sym, const std::vector<int>& ladder);

struct ClosedRangeRow {
  cplx w{0.0, 0.0};
  double ratio = 0.0;  // ||S*_z F_k|| / ||F_k||
  double bound = 0.0;  // |h(w_k)| / sqrt(1 - |h(w_k)|^2)
};

struct ClosedRangeReport {
  std::vector<ClosedRangeRow> rows;      // witness sequence data
  double szstar_min_lower_bound = 0.0;   // alpha_h / sqrt(1 + alpha_h^2)
  double szstar_min_observed = 0.0;      // on N ominus K_b (0 when not computed)
};

// Witness data of the closed-range dichotomy: the explicit F_k sequence
// along `path` with its upper bound, plus the lower bound alpha/sqrt(1+a^2)
// compared against the observed minimum on N (via `N`, optional).
ClosedRangeReport closed_range_witness(const Symbol& sym, const std::vector<cplx>& path, int I,
                                       int J, const SubspaceBasis* N = nullptr);

struct SpectralReport {
  std::vector<cplx> eigenvalues;
  std::vector<cplx> region_samples;
  std::vector<std::pair<cplx, double>> inclusion_violations;  // (eigenvalue, distance)
  double max_region_distance = 0.0;
  std::string note;
};

SpectralReport spectral_inclusion_report(const Symbol& sym, const CompressedOperator& Sz,
                                         const Eigen::MatrixXcd& Vint, double tol);

void write_spectrum_csv(const std::vector<cplx>& eigs, std::ostream& os);
void write_region_csv(const std::vector<cplx>& cloud, std::ostream& os);
void write_svdecay_csv(const CompactnessProfile& profile, std::ostream& os);

}  // namespace nphi
