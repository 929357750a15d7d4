#include "nphi/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>

#include "nphi/innermodel.hpp"
#include "nphi/spectra.hpp"

namespace nphi {

namespace {

cplx json_to_cplx(const nlohmann::json& v, std::vector<std::string>& errors,
                  const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    errors.push_back(field + ": expected [re, im]");
    return cplx{0.0, 0.0};
  }
  return cplx{v[0].get<double>(), v[1].get<double>()};
}

const std::vector<std::string> kKnownSuites = {"identities", "norms",    "spectra", "compactness",
                                               "inner",      "example1", "bergman", "mobius"};

}  // namespace

LabConfig config_from_json(const nlohmann::json& j) {
  std::vector<std::string> errors;
  LabConfig c;
  if (!j.contains("symbol")) {
    errors.push_back("symbol: missing");
  } else {
    try {
      c.symbol = symbol_from_json(j.at("symbol"));
    } catch (const std::exception& e) {
      errors.push_back(std::string("symbol: ") + e.what());
    }
  }
  if (j.contains("truncation")) {
    const auto& t = j.at("truncation");
    if (t.contains("I")) c.truncation.I = t.at("I").get<int>();
    if (t.contains("J")) c.truncation.J = t.at("J").get<int>();
    if (t.contains("guard")) c.truncation.guard = t.at("guard").get<int>();
    if (t.contains("ladder")) {
      c.truncation.ladder.clear();
      for (const auto& v : t.at("ladder")) c.truncation.ladder.push_back(v.get<int>());
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (t.contains("identity")) c.tolerances.identity = t.at("identity").get<double>();
    if (t.contains("norm")) c.tolerances.norm = t.at("norm").get<double>();
    if (t.contains("spectral")) c.tolerances.spectral = t.at("spectral").get<double>();
  }
  if (j.contains("witnesses")) {
    const auto& w = j.at("witnesses");
    if (w.contains("w0_list")) {
      int idx = 0;
      for (const auto& v : w.at("w0_list"))
        c.witnesses.w0_list.push_back(
            json_to_cplx(v, errors, "witnesses.w0_list[" + std::to_string(idx++) + "]"));
    }
    if (w.contains("boundary_path")) {
      const auto& p = w.at("boundary_path");
      if (p.contains("base")) c.witnesses.boundary_path.base = p.at("base").get<double>();
      if (p.contains("count")) c.witnesses.boundary_path.count = p.at("count").get<int>();
      if (p.contains("direction"))
        c.witnesses.boundary_path.direction =
            json_to_cplx(p.at("direction"), errors, "witnesses.boundary_path.direction");
    }
  }
  if (j.contains("suites")) {
    for (const auto& v : j.at("suites")) {
      const std::string s = v.get<std::string>();
      if (std::find(kKnownSuites.begin(), kKnownSuites.end(), s) == kKnownSuites.end())
        errors.push_back("suites: unknown suite '" + s + "'");
      else
        c.suites.push_back(s);
    }
  }

  // invariants; for Blaschke symbols the degree is the number of zeros (the
  // ladder margin), for polynomials the Taylor degree
  const int d = c.symbol.is_blaschke()
                    ? static_cast<int>(c.symbol.as_blaschke().zeros.size())
                    : c.symbol.effective_degree(c.truncation.J);
  if (c.truncation.guard < d + 1)
    errors.push_back("truncation.guard: must be >= deg(phi) + 1 = " + std::to_string(d + 1));
  for (size_t k = 1; k < c.truncation.ladder.size(); ++k)
    if (c.truncation.ladder[k] <= c.truncation.ladder[k - 1]) {
      errors.push_back("truncation.ladder: must be strictly increasing");
      break;
    }
  if (c.tolerances.identity <= 0 || c.tolerances.norm <= 0 || c.tolerances.spectral <= 0)
    errors.push_back("tolerances: must be positive");

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  return c;
}

nlohmann::json config_to_json(const LabConfig& c) {
  nlohmann::json j;
  j["symbol"] = symbol_to_json(c.symbol);
  j["truncation"] = {{"I", c.truncation.I},
                     {"J", c.truncation.J},
                     {"guard", c.truncation.guard},
                     {"ladder", c.truncation.ladder}};
  j["tolerances"] = {{"identity", c.tolerances.identity},
                     {"norm", c.tolerances.norm},
                     {"spectral", c.tolerances.spectral}};
  nlohmann::json w0s = nlohmann::json::array();
  for (const auto& w : c.witnesses.w0_list) w0s.push_back({w.real(), w.imag()});
  j["witnesses"] = {{"w0_list", w0s},
                    {"boundary_path",
                     {{"base", c.witnesses.boundary_path.base},
                      {"count", c.witnesses.boundary_path.count},
                      {"direction",
                       {c.witnesses.boundary_path.direction.real(),
                        c.witnesses.boundary_path.direction.imag()}}}}};
  j["suites"] = c.suites;
  return j;
}

int VerificationReport::count(const std::string& status) const {
  int n = 0;
  for (const auto& c : checks)
    if (c.status == status) ++n;
  return n;
}

namespace {

CheckRecord numeric_check(std::string suite, std::string name, std::string anchor, cplx computed,
                          cplx expected, double tolerance, bool converged = true,
                          std::string note = {}) {
  CheckRecord r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.paper_anchor = std::move(anchor);
  r.computed = computed;
  r.expected = expected;
  r.abs_err = std::abs(computed - expected);
  r.tolerance = tolerance;
  r.status = !converged ? "unconverged" : (r.abs_err <= tolerance ? "pass" : "fail");
  r.note = std::move(note);
  return r;
}

CheckRecord qualitative_check(std::string suite, std::string name, std::string anchor,
                              std::string computed, std::string expected, std::string note = {}) {
  CheckRecord r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.paper_anchor = std::move(anchor);
  r.qualitative = true;
  r.computed_text = std::move(computed);
  r.expected_text = std::move(expected);
  if (r.computed_text == "inconclusive" || r.computed_text == "indeterminate")
    r.status = "indeterminate";
  else
    r.status = (r.computed_text == r.expected_text) ? "pass" : "fail";
  r.note = std::move(note);
  return r;
}

CheckRecord untested_check(std::string suite, std::string name, std::string anchor,
                           std::string reason) {
  CheckRecord r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.paper_anchor = std::move(anchor);
  r.qualitative = true;
  r.computed_text = "untested";
  r.expected_text = "untested";
  r.status = "untested";
  r.note = std::move(reason);
  return r;
}

using SuiteFn = std::function<std::vector<CheckRecord>(const LabConfig&)>;

std::vector<CheckRecord> suite_bergman(const LabConfig& c) {
  std::vector<CheckRecord> out;
  const int J = std::max(16, c.truncation.J);
  const double t_full = bergman_commutator_partial_trace(J);
  const double t_half = bergman_commutator_partial_trace(J / 2);
  out.push_back(numeric_check("bergman", "trace_partial", "Example 2",
                              cplx{t_full, 0.0}, cplx{1.0 - 1.0 / (J + 2.0), 0.0},
                              c.tolerances.identity));
  const double extrap = richardson_bergman(t_half, J / 2, t_full, J);
  out.push_back(numeric_check("bergman", "trace_extrapolated", "Example 2", cplx{extrap, 0.0},
                              cplx{1.0, 0.0}, std::max(c.tolerances.identity, 1e-9)));
  const double pi = 3.14159265358979323846;
  out.push_back(numeric_check("bergman", "hs_bergman", "Example 2",
                              cplx{bergman_commutator_hs2_with_tail(J), 0.0},
                              cplx{pi * pi / 3.0 - 3.0, 0.0},
                              std::max(c.tolerances.identity, 1e-6)));
  return out;
}

std::vector<CheckRecord> suite_identities(const LabConfig& c) {
  std::vector<CheckRecord> out;
  const auto& sym = c.symbol;
  if (sym.is_blaschke()) {
    // closed-form quotient and wandering bases
    const int j_max = std::max(8, c.truncation.I);
    auto [I, J] = basis_E_grid(sym, j_max);
    const ModelSpaceBasis model = takenaka_basis(sym.as_blaschke(), J);
    const SubspaceBasis E = basis_E(model, sym, j_max, I, J, c.truncation.guard);
    const SubspaceBasis X = basis_X(model, sym, j_max - 1, I, J, c.truncation.guard);
    const IdentityResiduals r = identity_residuals(E, X);
    out.push_back(numeric_check("identities", "defect_r1", "Lemma 2.2(i)", cplx{r.r1, 0.0},
                                cplx{0.0, 0.0}, c.tolerances.identity));
    out.push_back(numeric_check("identities", "defect_r2", "Lemma 2.2(ii)", cplx{r.r2, 0.0},
                                cplx{0.0, 0.0}, c.tolerances.identity));
    return out;
  }
  // grid path with a two-step ladder convergence audit over a matched
  // interior test family
  const int I1 = c.truncation.I, I2 = 2 * c.truncation.I;
  auto residuals = [&](int size, int max_dim) {
    const SubspaceBasis N = quotient_basis(sym, size, size, c.truncation.guard);
    const SubspaceBasis W = wandering_basis_z(sym, size, size, c.truncation.guard);
    return identity_residuals(N, W, kInteriorMassTol, max_dim);
  };
  const IdentityResiduals ra = residuals(I1, -1);
  const IdentityResiduals rb = residuals(I2, ra.interior_dim);
  const bool conv1 = rb.r1 <= ra.r1 * 1.05 + 1e-14;
  const bool conv2 = rb.r2 <= ra.r2 * 1.05 + 1e-14;
  const double tol = std::max(c.tolerances.identity, 1e-2);
  out.push_back(numeric_check("identities", "defect_r1", "Lemma 2.2(i)", cplx{rb.r1, 0.0},
                              cplx{0.0, 0.0}, tol, conv1,
                              "grid path; value at doubled truncation"));
  out.push_back(numeric_check("identities", "defect_r2", "Lemma 2.2(ii)", cplx{rb.r2, 0.0},
                              cplx{0.0, 0.0}, tol, conv2,
                              "grid path; value at doubled truncation"));
  return out;
}

std::vector<CheckRecord> suite_norms(const LabConfig& c) {
  std::vector<CheckRecord> out;
  auto report = [&](int size) {
    const SubspaceBasis N = quotient_basis(c.symbol, size, size, c.truncation.guard);
    return norm_report(c.symbol, N);
  };
  const NormReport a = report(c.truncation.I);
  const NormReport b = report(2 * c.truncation.I);
  // pass/fail always reads the guard-interior values; the full-truncation
  // numbers are polluted by free-edge artifacts and are reported only
  const double conv_tol = c.tolerances.norm / 2.0;
  out.push_back(numeric_check("norms", "l0_norm", "Prop 4.5", cplx{b.l0_norm_interior, 0.0},
                              cplx{b.expected_l0, 0.0}, c.tolerances.norm,
                              std::abs(b.l0_norm_interior - a.l0_norm_interior) <= conv_tol,
                              "full-truncation value " + std::to_string(b.l0_norm)));
  out.push_back(numeric_check("norms", "szstar_smallest_sv", "Cor 4.6",
                              cplx{b.szstar_min_interior, 0.0},
                              cplx{b.expected_szstar_min, 0.0}, c.tolerances.norm,
                              std::abs(b.szstar_min_interior - a.szstar_min_interior) <= conv_tol,
                              "full-truncation value " + std::to_string(b.szstar_min)));
  out.push_back(numeric_check("norms", "sz_norm_interior", "Prop 3.5 of the quotient-shift norm",
                              cplx{b.sz_norm_interior, 0.0}, cplx{b.expected_sz, 0.0},
                              std::max(c.tolerances.norm, 5e-2),
                              std::abs(b.sz_norm_interior - a.sz_norm_interior) <= 5e-2));
  return out;
}

std::vector<CheckRecord> suite_spectra(const LabConfig& c) {
  std::vector<CheckRecord> out;

  // kernel-vector witnesses are grid-free and run for every symbol shape
  int idx = 0;
  for (const cplx& w0 : c.witnesses.w0_list) {
    const std::string name = "point_witness_" + std::to_string(idx++);
    if (std::abs(w0) >= 1.0 || std::abs(c.symbol.eval(w0)) >= 1.0 - 1e-6) {
      out.push_back(untested_check("spectra", name, "Prop 3.1", "w0 outside Omega_phi"));
      continue;
    }
    auto [wi, wj] = witness_truncation(c.symbol, w0, c.tolerances.spectral / 10.0);
    const double resid = point_spectrum_witness(c.symbol, w0, wi, wj);
    out.push_back(numeric_check("spectra", name, "Prop 3.1", cplx{resid, 0.0}, cplx{0.0, 0.0},
                                c.tolerances.spectral));
  }

  // the inclusion probe rides the grid quotient at the configured size
  try {
    const SubspaceBasis N =
        quotient_basis(c.symbol, c.truncation.I, c.truncation.J, c.truncation.guard);
    const CompressedOperator Sz = compress_shift('z', N);
    const double incl_tol = 3.0 * std::sqrt(3.14159265358979323846 / 16384.0);
    const SpectralReport sr = spectral_inclusion_report(c.symbol, Sz, N.interior_coords(),
                                                        incl_tol);
    out.push_back(numeric_check("spectra", "inclusion_max_distance", "Prop 3.1",
                                cplx{sr.max_region_distance, 0.0}, cplx{0.0, 0.0}, incl_tol, true,
                                sr.note));
  } catch (const std::exception& e) {
    out.push_back(untested_check("spectra", "inclusion_max_distance", "Prop 3.1", e.what()));
  }

  // Fredholm probes size the truncation so the cokernel witness of each
  // sample is resolvable through the interior subspace:
  // max(|alpha|, |phi(alpha)|)^{2(size-guard)} must undercut the counting
  // threshold squared times the interior mass tolerance
  try {
    constexpr int kSizeCap = 128;
    std::vector<std::pair<int, cplx>> accepted;  // (index, alpha)
    int needed = c.truncation.I;
    idx = 0;
    for (const cplx& alpha : c.witnesses.w0_list) {
      const int my_idx = idx++;
      const std::string name = "fredholm_sw_" + std::to_string(my_idx);
      const double rho = std::max(std::abs(alpha), std::abs(c.symbol.eval(alpha)));
      if (std::abs(alpha) > 0.75 || std::abs(c.symbol.eval(alpha)) >= 1.0 - 0.05) {
        out.push_back(
            untested_check("spectra", name, "Prop 3.2", "alpha lacks margin in Omega_phi"));
        continue;
      }
      const int need =
          c.truncation.guard + static_cast<int>(std::ceil(25.0 / std::log(1.0 / rho)));
      if (need > kSizeCap) {
        out.push_back(untested_check(
            "spectra", name, "Prop 3.2",
            "witness needs truncation " + std::to_string(need) + " beyond the cap"));
        continue;
      }
      needed = std::max(needed, need);
      accepted.emplace_back(my_idx, alpha);
    }
    if (!accepted.empty()) {
      const SubspaceBasis Nf = quotient_basis(c.symbol, needed, needed, c.truncation.guard);
      const CompressedOperator Sw = compress_shift('w', Nf);
      const Eigen::MatrixXcd Vf = Nf.interior_coords();
      for (const auto& [my_idx, alpha] : accepted) {
        const FredholmResult f = fredholm_probe(Sw, alpha, Vf);
        out.push_back(qualitative_check(
            "spectra", "fredholm_sw_" + std::to_string(my_idx), "Prop 3.2",
            f.indeterminate ? "indeterminate"
                            : "(" + std::to_string(f.ker_dim) + "," + std::to_string(f.coker_dim) +
                                  "," + std::to_string(f.index) + ")",
            "(0,1,-1)", "probed at truncation " + std::to_string(needed)));
      }
    }
  } catch (const std::exception& e) {
    out.push_back(untested_check("spectra", "fredholm_sw", "Prop 3.2", e.what()));
  }
  return out;
}

std::vector<CheckRecord> suite_compactness(const LabConfig& c) {
  std::vector<CheckRecord> out;
  std::vector<int> ladder = c.truncation.ladder;
  if (ladder.size() < 3) ladder = {c.truncation.I, 2 * c.truncation.I, 4 * c.truncation.I};
  const CompactnessProfile p = compactness_probe(c.symbol, ladder);
  const InnerOuterFactors fac = inner_outer_factor(c.symbol);
  const double alpha_h = alpha_inf(Symbol{fac.outer_part});
  const std::string expected = (alpha_h >= 1.0 - 1e-9) ? "decaying" : "bounded-below";
  out.push_back(qualitative_check("compactness", "l0_singular_value_decay", "Thm 4.2",
                                  p.verdict_l0, expected,
                                  "floor " + std::to_string(p.floor_l0)));
  if (!p.dz_singular_values.empty())
    out.push_back(qualitative_check("compactness", "dz_singular_value_decay", "Thm 4.4",
                                    p.verdict_dz, expected));
  return out;
}

std::vector<CheckRecord> suite_inner(const LabConfig& c) {
  std::vector<CheckRecord> out;
  if (!c.symbol.is_blaschke()) {
    out.push_back(untested_check("inner", "tensor_model", "Eq (5.1)",
                                 "symbol is not a finite Blaschke product"));
    return out;
  }
  const int j_max = std::max(8, c.truncation.I);
  auto [I, J] = basis_E_grid(c.symbol, j_max);
  const ModelSpaceBasis model = takenaka_basis(c.symbol.as_blaschke(), J);
  const SubspaceBasis E = basis_E(model, c.symbol, j_max, I, J, c.truncation.guard);

  out.push_back(numeric_check("inner", "basis_gram_defect", "Lemma 5.1",
                              cplx{E.gram_defect(), 0.0}, cplx{0.0, 0.0},
                              c.tolerances.identity));
  out.push_back(numeric_check("inner", "tensor_unitary_residual", "Eq (5.1)",
                              cplx{tensor_unitary_check(c.symbol, E, j_max), 0.0},
                              cplx{0.0, 0.0}, std::max(c.tolerances.identity, 1e-8)));

  const SwModel m = sw_model(c.symbol, model, j_max);
  const Eigen::MatrixXcd Ik = Eigen::MatrixXcd::Identity(m.Sphi.rows(), m.Sphi.cols());
  const double d52a = (Ik - m.Sphi.adjoint() * m.Sphi -
                       (m.T0.adjoint() * m.T0) / m.u.squaredNorm())
                          .norm();
  const double d52b = (Ik - m.Sphi * m.Sphi.adjoint() -
                       (m.T0 * m.T0.adjoint()) / m.v.squaredNorm())
                          .norm();
  out.push_back(numeric_check("inner", "model_defect_identities", "Eq (5.2)",
                              cplx{std::max(d52a, d52b), 0.0}, cplx{0.0, 0.0},
                              c.tolerances.identity));
  out.push_back(numeric_check("inner", "sw_model_cross_residual", "Eq (5.3)",
                              cplx{sw_model_cross_residual(c.symbol, model, E, j_max), 0.0},
                              cplx{0.0, 0.0}, std::max(c.tolerances.identity, 1e-9)));

  const cplx phi0 = c.symbol.eval(cplx{0.0, 0.0});
  if (std::abs(phi0) <= 1e-12) {
    const HsResult hs = commutator_sw_hs(c.symbol, std::max(64, c.truncation.J));
    out.push_back(numeric_check("inner", "sw_self_commutator_hs2", "Eq (5.5)",
                                cplx{hs.computed, 0.0}, cplx{hs.expected, 0.0},
                                std::max(c.tolerances.identity, 1e-3)));
  } else {
    out.push_back(untested_check("inner", "sw_self_commutator_hs2", "Eq (5.5)",
                                 "phi(0) != 0; use the mobius suite to transfer"));
  }
  const TraceResult tr = trace_szw(c.symbol, std::max(64, c.truncation.J));
  out.push_back(numeric_check("inner", "szw_commutator_trace", "Eq (5.6)", tr.computed,
                              tr.expected, std::max(c.tolerances.identity, 1e-3)));

  // both interior self-commutator tails must keep falling along the ladder
  // for a finite Blaschke symbol
  {
    auto tail_ratios = [&](int jm) {
      auto [Ib, Jb] = basis_E_grid(c.symbol, jm);
      const ModelSpaceBasis mb = takenaka_basis(c.symbol.as_blaschke(), Jb);
      const SubspaceBasis Eb = basis_E(mb, c.symbol, jm, Ib, Jb, c.truncation.guard);
      const Eigen::MatrixXcd V = Eb.interior_coords();
      const Eigen::MatrixXcd Sz = compress_shift('z', Eb).A;
      const Eigen::MatrixXcd Sw = compress_shift('w', Eb).A;
      auto ratio = [&](const Eigen::MatrixXcd& C) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(V.adjoint() * C * V));
        const auto& s = svd.singularValues();
        return s(s.size() - 1) / std::max(s(0), 1e-300);
      };
      return std::make_pair(ratio(adjoint_commutator(Sz, Sz)),
                            ratio(adjoint_commutator(Sw, Sw)));
    };
    const auto [z1, w1] = tail_ratios(j_max);
    const auto [z2, w2] = tail_ratios(2 * j_max);
    const bool decay_z = z2 < 0.05 || z2 < 0.7 * z1;
    const bool decay_w = w2 < 0.05 || w2 < 0.7 * w1;
    out.push_back(qualitative_check(
        "inner", "essential_reductivity", "Thm 5.3",
        (decay_z && decay_w) ? "decaying" : "inconclusive", "decaying",
        "self-commutator tail ratios " + std::to_string(z1) + " -> " + std::to_string(z2) +
            ", " + std::to_string(w1) + " -> " + std::to_string(w2) +
            "; non-Blaschke inner symbols are out of scope"));
  }
  return out;
}

std::vector<CheckRecord> suite_example1(const LabConfig& c) {
  std::vector<CheckRecord> out;
  cplx a{0.0, 0.0};
  const bool axis = c.symbol.is_taylor() && c.symbol.as_taylor().coeffs.size() == 2 &&
                    c.symbol.as_taylor().coeffs[0] == cplx{0.0, 0.0};
  if (!axis) {
    out.push_back(untested_check("example1", "closed_forms", "Example 1",
                                 "symbol is not of the form a*w"));
    return out;
  }
  a = c.symbol.as_taylor().coeffs[1];
  const Example1Report rep = example1_suite(a, std::max(16, c.truncation.I));
  out.push_back(numeric_check("example1", "shift_entries", "Example 1",
                              cplx{rep.max_shift_entry_err, 0.0}, cplx{0.0, 0.0},
                              c.tolerances.identity));
  out.push_back(numeric_check("example1", "commutator_diagonal", "Example 1",
                              cplx{rep.max_commutator_err, 0.0}, cplx{0.0, 0.0},
                              c.tolerances.identity));
  out.push_back(numeric_check("example1", "l0_column_norms", "Example 1",
                              cplx{rep.max_l0_err, 0.0}, cplx{0.0, 0.0}, c.tolerances.identity));
  out.push_back(qualitative_check("example1", "hyponormality", "Example 1",
                                  rep.min_cj >= -1e-12 ? "hyponormal" : "not hyponormal",
                                  "hyponormal"));
  return out;
}

std::vector<CheckRecord> suite_mobius(const LabConfig& c) {
  std::vector<CheckRecord> out;
  if (!c.symbol.is_blaschke()) {
    out.push_back(untested_check("mobius", "conjugation", "Sec 5 conjugation identities",
                                 "symbol is not a finite Blaschke product"));
    return out;
  }
  cplx alpha{0.0, 0.0};
  for (const cplx& z : c.symbol.as_blaschke().zeros)
    if (std::abs(z) > std::abs(alpha)) alpha = z;
  const MobiusCheck mc = mobius_identity_check(c.symbol, alpha, std::max(8, c.truncation.I / 2));
  out.push_back(numeric_check("mobius", "conjugated_sz_residual", "Sec 5 conjugation identities",
                              cplx{mc.resid_z, 0.0}, cplx{0.0, 0.0},
                              std::max(c.tolerances.identity, 1e-8)));
  out.push_back(numeric_check("mobius", "conjugated_sw_residual", "Sec 5 conjugation identities",
                              cplx{mc.resid_w, 0.0}, cplx{0.0, 0.0},
                              std::max(c.tolerances.identity, 1e-8)));
  out.push_back(numeric_check("mobius", "unitarity_deviation", "Sec 5 conjugation identities",
                              cplx{mc.unitarity_dev, 0.0}, cplx{0.0, 0.0},
                              std::max(c.tolerances.identity, 1e-9)));
  return out;
}

}  // namespace

VerificationReport run(const LabConfig& config) {
  const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"identities", suite_identities}, {"norms", suite_norms},
      {"spectra", suite_spectra},       {"compactness", suite_compactness},
      {"inner", suite_inner},           {"example1", suite_example1},
      {"bergman", suite_bergman},       {"mobius", suite_mobius}};

  std::vector<std::pair<std::string, SuiteFn>> selected;
  for (const auto& name : config.suites)
    for (const auto& entry : table)
      if (entry.first == name) selected.push_back(entry);

  int threads = 1;
  if (const char* env = std::getenv("NPHILAB_THREADS")) threads = std::max(1, std::atoi(env));

  VerificationReport report;
  auto guarded = [&](const std::pair<std::string, SuiteFn>& entry) {
    try {
      return entry.second(config);
    } catch (const std::exception& e) {
      return std::vector<CheckRecord>{
          untested_check(entry.first, "suite_precondition", "-", e.what())};
    }
  };

  if (threads <= 1) {
    for (const auto& entry : selected) {
      auto recs = guarded(entry);
      report.checks.insert(report.checks.end(), recs.begin(), recs.end());
    }
  } else {
    std::vector<std::future<std::vector<CheckRecord>>> futures;
    size_t next = 0;
    while (next < selected.size()) {
      const size_t batch = std::min<size_t>(threads, selected.size() - next);
      futures.clear();
      for (size_t k = 0; k < batch; ++k)
        futures.push_back(std::async(std::launch::async, guarded, selected[next + k]));
      for (auto& f : futures) {
        auto recs = f.get();
        report.checks.insert(report.checks.end(), recs.begin(), recs.end());
      }
      next += batch;
    }
  }

  std::sort(report.checks.begin(), report.checks.end(), [](const CheckRecord& a, const CheckRecord& b) {
    return std::tie(a.suite, a.name) < std::tie(b.suite, b.name);
  });
  return report;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

// key order is fixed (sorted) so identical reports serialize byte-identically
void record_json(const CheckRecord& c, std::ostream& os) {
  os << "{";
  os << "\"abs_err\":" << fmt_double(c.abs_err) << ",";
  if (c.qualitative) {
    os << "\"computed\":\"" << json_escape(c.computed_text) << "\",";
    os << "\"expected\":\"" << json_escape(c.expected_text) << "\",";
  } else {
    os << "\"computed\":[" << fmt_double(c.computed.real()) << "," << fmt_double(c.computed.imag())
       << "],";
    os << "\"expected\":[" << fmt_double(c.expected.real()) << "," << fmt_double(c.expected.imag())
       << "],";
  }
  os << "\"name\":\"" << json_escape(c.name) << "\",";
  os << "\"note\":\"" << json_escape(c.note) << "\",";
  os << "\"paper_anchor\":\"" << json_escape(c.paper_anchor) << "\",";
  os << "\"status\":\"" << json_escape(c.status) << "\",";
  os << "\"suite\":\"" << json_escape(c.suite) << "\",";
  os << "\"tolerance\":" << fmt_double(c.tolerance);
  os << "}";
}

}  // namespace

std::string report_to_json(const VerificationReport& report) {
  std::ostringstream os;
  os << "{\"checks\":[";
  for (size_t k = 0; k < report.checks.size(); ++k) {
    if (k) os << ",";
    record_json(report.checks[k], os);
  }
  os << "],\"summary\":{";
  const std::vector<std::string> statuses = {"fail", "indeterminate", "pass", "unconverged",
                                             "untested"};
  for (size_t k = 0; k < statuses.size(); ++k) {
    if (k) os << ",";
    os << "\"" << statuses[k] << "\":" << report.count(statuses[k]);
  }
  os << "}}\n";
  return os.str();
}

std::string report_to_csv(const VerificationReport& report) {
  std::ostringstream os;
  os << "suite,name,paper_anchor,computed_re,computed_im,expected_re,expected_im,abs_err,"
        "tolerance,status\n";
  for (const auto& c : report.checks) {
    os << c.suite << "," << c.name << "," << c.paper_anchor << ",";
    if (c.qualitative)
      os << c.computed_text << ",," << c.expected_text << ",,";
    else
      os << fmt_double(c.computed.real()) << "," << fmt_double(c.computed.imag()) << ","
         << fmt_double(c.expected.real()) << "," << fmt_double(c.expected.imag()) << ",";
    os << fmt_double(c.abs_err) << "," << fmt_double(c.tolerance) << "," << c.status << "\n";
  }
  return os.str();
}

void emit(const VerificationReport& report, const std::string& format, const std::string& path) {
  const std::string payload = (format == "csv") ? report_to_csv(report) : report_to_json(report);
  if (path.empty() || path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
  os << payload;
  if (!os) throw std::runtime_error("emit: write failed for '" + path + "'");
}

}  // namespace nphi
