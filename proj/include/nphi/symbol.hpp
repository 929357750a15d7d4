#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nphi/common.hpp"

#include <json.hpp>

namespace nphi {

// Polynomial in w, ascending degree, at least one nonzero coefficient.
struct TaylorPoly {
  std::vector<cplx> coeffs;
};

// c * prod_k (w - mu_k) / (1 - conj(mu_k) w), |mu_k| < 1, |c| = 1.
// An empty zero list is the unimodular constant c.
struct FiniteBlaschke {
  std::vector<cplx> zeros;
  cplx phase{1.0, 0.0};
};

// The one-variable symbol phi(w). Two concrete shapes cover every test
// target: polynomials and finite Blaschke products.
class Symbol {
 public:
  explicit Symbol(TaylorPoly p);
  explicit Symbol(FiniteBlaschke b);

  static Symbol taylor(std::vector<cplx> coeffs);
  static Symbol blaschke(std::vector<cplx> zeros, cplx phase = cplx{1.0, 0.0});

  bool is_taylor() const { return std::holds_alternative<TaylorPoly>(rep_); }
  bool is_blaschke() const { return std::holds_alternative<FiniteBlaschke>(rep_); }
  const TaylorPoly& as_taylor() const;
  const FiniteBlaschke& as_blaschke() const;

  // phi(w) for |w| <= 1 (Horner / factor product). |w| > 1 is a domain error.
  cplx eval(cplx w) const;

  // Power-series coefficients through degree `order`. Exact for polynomials;
  // Blaschke factors use the closed-form geometric expansion.
  std::vector<cplx> taylor_coeffs(int order) const;

  // Exact polynomial degree, or -1 for a Blaschke product with zeros
  // away from the origin (infinite expansion).
  int exact_degree() const;

  // Largest index with a coefficient above rel_tol * max|coeff| in the
  // expansion through max_degree. The grid modules truncate phi here.
  int effective_degree(int max_degree, double rel_tol = 1e-14) const;

  std::string describe() const;

 private:
  std::variant<TaylorPoly, FiniteBlaschke> rep_;
};

struct InnerOuterFactors {
  FiniteBlaschke blaschke_part;  // phase 1; unimodular data lives in outer_part
  TaylorPoly outer_part;         // no roots in the open disk
};

// Roots of a complex polynomial (ascending coefficients) via the balanced
// companion matrix. Trailing zero coefficients become roots at the origin.
std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs);

// phi = b * h with b collecting the roots inside the disk. Roots within
// kCircleGuard of the circle are rejected as ill-conditioned.
InnerOuterFactors inner_outer_factor(const Symbol& sym);

// alpha = inf_D |phi|: 0 when phi has a root in the disk, otherwise the
// boundary minimum (minimum-modulus principle) with golden-section refinement.
double alpha_inf(const Symbol& sym, int boundary_samples = kBoundarySamples);

// gamma = liminf_{|w|->1} |phi(w)|; boundary minimum for polynomials,
// exactly 1 for Blaschke products.
double gamma_liminf(const Symbol& sym, int boundary_samples = kBoundarySamples);

// sup_Gamma |phi|; exactly 1 for Blaschke products.
double sup_norm(const Symbol& sym, int boundary_samples = kBoundarySamples);

// Number of roots of zeta - phi(w) in the open disk, counting multiplicity.
// Roots inside the circle guard band raise an ill-posed-count error.
int zero_count(const Symbol& sym, cplx zeta);

// Coefficient of w^1 in the expansion of phi.
cplx derivative_at_zero(const Symbol& sym);

// True when phi(D) meets the open disk (sampled); quotient-space
// constructions require this, otherwise the quotient is trivial.
bool image_meets_disk(const Symbol& sym, int samples = 512);

// phi composed with the disk involution x_a(w) = (a - w)/(1 - conj(a) w),
// exact on Blaschke products (zero set and phase transform in closed form).
Symbol mobius_precompose(const Symbol& inner_sym, cplx alpha);

// {"type":"taylor","coeffs":[[re,im],...]} or
// {"type":"blaschke","zeros":[[re,im],...],"phase":[re,im]}
nlohmann::json symbol_to_json(const Symbol& sym);
Symbol symbol_from_json(const nlohmann::json& j);

}  // namespace nphi
