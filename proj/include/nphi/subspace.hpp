#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nphi/common.hpp"
#include "nphi/hardy.hpp"
#include "nphi/symbol.hpp"

namespace nphi {

enum class BasisLabel { Submodule, Quotient, WanderingZ, WanderingW, Model, Custom };

std::string to_string(BasisLabel label);

// Orthonormal basis of a subspace of the (I, J)-truncated grid, stored as
// flattened coefficient columns (linear index i * (J+1) + j).
struct SubspaceBasis {
  BasisLabel label = BasisLabel::Custom;
  int I = 0, J = 0;
  int guard = 0;  // trusted interior degree margin
  Eigen::MatrixXcd Q;
  // Model-style bases are ordered by a per-column ladder index (the j of
  // E_{k,j}); empty for generic grid bases.
  std::vector<int> column_j;
  int generator_count = 0;  // for SVD-built bases: input columns
  std::string note;

  int ambient_dim() const { return (I + 1) * (J + 1); }
  int dim() const { return static_cast<int>(Q.cols()); }
  CoeffGrid2D column(int k) const { return CoeffGrid2D::from_flat(Q.col(k), I, J); }

  // Coordinates (in this basis) of the guard-interior test subspace.
  //
  // Model bases: the columns with ladder index <= max(column_j) - guard.
  // Grid bases: the span of eigenvectors of the compressed edge-band mass
  // form whose eigenvalue is <= mass_tol; only directions representable
  // inside degrees (I - guard, J - guard) up to that mass are trusted.
  Eigen::MatrixXcd interior_coords(double mass_tol = kInteriorMassTol) const;

  // Orthonormality audit: max |Gram - I| entry.
  double gram_defect() const;
};

// Orthonormalized generator set {(z - phi) z^i w^j : i <= I-1, j <= J - d}
// via SVD with relative rank tolerance kRankTol (d = effective degree of phi
// inside the grid).
SubspaceBasis submodule_basis(const Symbol& sym, int I, int J, int guard);

// Orthogonal complement of the truncated submodule, built directly from the
// row recursion row_{i+1} = T*_phi row_i on interior columns. Identical to
// complementing the generator span, at the cost of a small QR.
SubspaceBasis quotient_basis(const Symbol& sym, int I, int J, int guard);

// Reference complement through a dense SVD of the generator matrix; small
// grids only, used to cross-validate quotient_basis.
SubspaceBasis quotient_basis_dense(const Symbol& sym, int I, int J, int guard);

// Cross-validation span {A_phi(w^m) : m <= J - guard}; unavailable when the
// membership partial sums blow up for some seed.
std::optional<SubspaceBasis> quotient_basis_aphi(const Symbol& sym, int I, int J, int guard,
                                                 std::string* note = nullptr);

// Truncated M ominus z*(truncated M at (I-1, J)); analogously in w.
SubspaceBasis wandering_basis_z(const Symbol& sym, int I, int J, int guard);
SubspaceBasis wandering_basis_w(const Symbol& sym, int I, int J, int guard);

// Orthogonal projection of F onto the span of the basis columns.
CoeffGrid2D project(const SubspaceBasis& basis, const CoeffGrid2D& F);

// Largest principal angle (radians) between the spans, computed from the
// cross-Gram singular values. Bases must share the ambient grid.
double max_principal_angle(const SubspaceBasis& a, const SubspaceBasis& b);

// sin of the largest angle from span(a) INTO span(b): 0 when a's span is
// contained in b's.
double containment_angle_sin(const SubspaceBasis& a, const SubspaceBasis& b);

}  // namespace nphi
