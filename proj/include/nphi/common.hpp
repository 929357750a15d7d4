#pragma once

#include <complex>

namespace nphi {

using cplx = std::complex<double>;

// Numerical policy constants shared across the library.
inline constexpr double kRankTol = 1e-10;          // relative SVD rank cutoff
inline constexpr double kGramTol = 1e-10;          // orthonormality check
inline constexpr double kCircleGuard = 1e-9;       // guard band around |w| = 1 for roots
inline constexpr double kBlaschkeMargin = 1e-12;   // zeros must satisfy |mu| < 1 - margin
inline constexpr double kUnimodularTol = 1e-12;
inline constexpr double kKernelTailTol = 1e-10;    // neglected kernel tail norm
inline constexpr double kDivergenceThreshold = 1e8;
inline constexpr int kBoundarySamples = 4096;
inline constexpr double kInteriorMassTol = 1e-8;   // edge-band mass for interior split
inline constexpr double kFredholmRelTol = 1e-6;    // sigma < tol * sigma_max counts as kernel
inline constexpr double kFredholmGapFactor = 10.0; // required gap between counted/uncounted
inline constexpr double kRootClusterTol = 1e-7;    // multiplicity clustering

// Trigamma psi'(x) = sum_{k>=0} 1/(x+k)^2, via shift + asymptotic series.
double trigamma(double x);

}  // namespace nphi
