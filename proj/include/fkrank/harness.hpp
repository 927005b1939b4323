#pragma once

// Deterministic generators, the property-suite registry and report emission.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fkrank/io.hpp"
#include "fkrank/maps.hpp"
#include "fkrank/regring.hpp"

namespace fkrank {

// ---------------------------------------------------------------------------
// Generators

struct FamilySpec {
  std::string name;
  Index k = -1;             // random_projection, random_idempotent; -1 picks n / 2
  double cond_max = 1e2;    // random_invertible, canonical_form, perturbed_form
  double eps = 1e-2;        // perturbed_form
  JordanKind jordan = JordanKind::identity;
  bool conjugated = false;
  bool unital = false;      // canonical_form with b = a^{-1}
};

using Generated = std::variant<CMatrix, MatrixMap, Projection>;

const std::vector<std::string>& family_names();

/// Deterministic in (family, n, seed). Throws UsageError on bad parameters.
Generated generate(const FamilySpec& family, Index n, std::uint64_t seed);

/// Random a J(x) b with cond(a), cond(b) <= cond_max; b = a^{-1} when unital.
MapForm random_form(Index n, Stream& rng, JordanKind jordan, bool conjugated, double cond_max, bool unital);

/// Adds eps ||op||_F G / ||G||_F to the operator of f, G Ginibre.
MatrixMap perturb(const MatrixMap& f, double eps, Stream& rng);

io::json to_json(const Generated& g);

// ---------------------------------------------------------------------------
// Suites

struct SuiteConfig {
  std::string suite;
  std::vector<Index> n_values;  // empty: the suite's defaults
  Index trials = 100;
  std::uint64_t seed = 20240601;
  std::map<std::string, double> tolerances;
  std::string output;                    // JSON report path, optional
  std::vector<std::string> properties;   // empty: every property of the suite
  bool inject_mutant = false;
  std::vector<std::string> env_overrides;  // filled by apply_environment

  double tolerance(const std::string& key, double fallback) const;
};

SuiteConfig config_from_json(const io::json& j);
io::json to_json(const SuiteConfig& c);

/// Applies FKRANK_SEED and FKRANK_TOL_<key> (upper-cased key) overrides.
void apply_environment(SuiteConfig& c);

struct PropertyRecord {
  std::string name;
  std::string anchor;
  Index trials = 0;
  Index failures = 0;
  double worst_residual = 0.0;
  std::vector<io::json> witnesses;  // first few failing trials
};

struct Report {
  std::string suite;
  std::vector<PropertyRecord> properties;
  SuiteConfig config;
  double wall_clock = 0.0;

  Index failures() const;
  int exit_code() const { return failures() == 0 ? 0 : 1; }
  /// Timing is excluded unless requested so that equal configs give equal bytes.
  io::json to_json(bool include_timing = true) const;
  std::string to_text() const;
};

struct PropertyInfo {
  std::string suite;
  std::string name;
  std::string anchor;
};

const std::vector<std::string>& suite_names();
std::vector<Index> default_n_values(const std::string& suite);
std::vector<PropertyInfo> registry();

/// Runs every registered property of config.suite. Throws UsageError for an
/// unknown suite or property name.
Report run_suite(const SuiteConfig& config);

}  // namespace fkrank
