#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rds/measures.hpp"
#include "rds/noise_kernels.hpp"
#include "rds/stochastic_flows.hpp"

namespace rds {

struct SystemSpec {
  std::string type;  // "map" or "sde"
  std::string name;
  std::map<std::string, double> params;
  double dt = 1e-3;       // sde only
  double horizon = 20.0;  // sde only
};

struct KernelSpec {
  std::string variant;  // additive_map | random_jump | parametric | degenerate_trap | delta
  double epsilon = 0.0;
};

struct CandidateSpec {
  std::string type = "dirac";  // "dirac" | "lebesgue"
  double at = 0.0;
};

struct ResolutionConfig {
  int bins = 2000;
  long orbit_steps = 100000;
  int ensemble = 100;
  long lyapunov_steps = 20000;
  int entropy_depth = 12;
  long entropy_samples = 200000;
  int omega_samples = 8;
  int entropy_level = 1;  // dyadic partition level for the entropy analysis
  int paths = 10000;
  int cocycle_pairs = 16;
};

/// Parsed and validated experiment description. The seed is mandatory: there
/// is no silent nondeterminism.
struct ExperimentConfig {
  uint64_t seed = 0;
  std::string output_dir;
  SystemSpec system;
  std::optional<KernelSpec> kernel;
  std::vector<double> epsilon_schedule;
  CandidateSpec candidate;
  std::vector<std::string> analyses;
  ResolutionConfig resolution;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  /// Canonical JSON echo of the configuration (stable key order).
  std::string echo_json() const;
  /// SHA-256 of the canonical echo; embedded in every output CSV.
  std::string config_hash() const;
};

std::vector<std::string> analysis_names();

struct OutputRecord {
  std::string path;  // relative to output_dir
  std::string sha256;
  uint64_t bytes = 0;
};

struct AnalysisStatus {
  std::string name;
  bool ok = false;
  std::string error;
  std::vector<std::string> outputs;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::vector<AnalysisStatus> analyses;
  std::vector<OutputRecord> outputs;
  bool all_ok = false;

  std::string to_json() const;
};

/// Executes every requested analysis, isolating per-analysis failures, and
/// writes manifest.json last. Configuration errors surface before any
/// computation starts.
RunManifest run_experiment(const ExperimentConfig& config);

/// Builders shared by analyses and tests.
BaseMap system_map(const ExperimentConfig& config);
TransitionKernel build_kernel(const ExperimentConfig& config, double eps);

}  // namespace rds
