#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nphi/symbol.hpp"

namespace nphi {

struct Truncation {
  int I = 24, J = 24;
  int guard = 4;
  std::vector<int> ladder{12, 24, 48};
};

struct Tolerances {
  double identity = 1e-10;
  double norm = 2e-2;
  double spectral = 1e-6;
};

struct BoundaryPathSpec {
  double base = 2.0;  // w_j = direction * (1 - base^-j)
  int count = 10;
  cplx direction{1.0, 0.0};
};

struct Witnesses {
  std::vector<cplx> w0_list;
  BoundaryPathSpec boundary_path;
};

struct LabConfig {
  Symbol symbol = Symbol::taylor({cplx{0.0, 0.0}, cplx{1.0, 0.0}});
  Truncation truncation;
  Tolerances tolerances;
  Witnesses witnesses;
  std::vector<std::string> suites;
};

// Throws std::invalid_argument listing every offending field.
LabConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const LabConfig& c);

struct CheckRecord {
  std::string suite;
  std::string name;
  std::string paper_anchor;
  bool qualitative = false;
  cplx computed{0.0, 0.0};
  cplx expected{0.0, 0.0};
  std::string computed_text;  // qualitative checks
  std::string expected_text;
  double abs_err = 0.0;
  double tolerance = 0.0;
  std::string status;  // pass | fail | unconverged | indeterminate | untested
  std::string note;
};

struct VerificationReport {
  std::vector<CheckRecord> checks;  // sorted by (suite, name)
  int count(const std::string& status) const;
  bool ok() const { return count("fail") == 0; }
};

// Known suite names: identities, norms, spectra, compactness, inner,
// example1, bergman, mobius. Suite preconditions that fail produce
// "untested" records, never a crash. Deterministic for a fixed config;
// NPHILAB_THREADS > 1 runs suites concurrently.
VerificationReport run(const LabConfig& config);

// Bit-stable serialization: sorted keys, floats at 17 significant digits.
std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);
void emit(const VerificationReport& report, const std::string& format, const std::string& path);

}  // namespace nphi
