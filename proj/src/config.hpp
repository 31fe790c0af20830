#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "market.hpp"

namespace matchmarket {

enum class ExperimentKind {
  Fig1DeltaK,
  Fig2Multibuyer,
  Fig2ThresholdScan,
  Fig3Correlated,
  Fig4VendorProposes,
  Fig5Search,
  Fig5NOpt,
  ClaimsTable,
};

struct ExperimentInfo {
  ExperimentKind kind;
  const char* name;
  const char* description;
};

const std::vector<ExperimentInfo>& experiment_catalog();
ExperimentKind parse_experiment(std::string_view name);
const char* experiment_name(ExperimentKind kind);

/// Declarative description of one Monte Carlo sweep. Defaults depend on the
/// experiment; see default_config().
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Fig1DeltaK;
  std::vector<std::size_t> n_variants;
  std::vector<std::size_t> m_buyers;
  std::vector<double> k_values;
  std::vector<double> t_values;
  std::vector<int> s_values;
  UtilityRule rule = UtilityRule::linear();  // matchmaker rule in fig4
  std::vector<double> beta_values;
  double gamma = 4.0;
  std::uint64_t realizations = 1000;
  std::uint64_t master_seed = 20090101;
  std::size_t n_max = 1000;
  double threshold = 0.25;  // fig2 threshold scan
  double cost_exponent = 1.0;
  unsigned workers = 0;  // 0: hardware concurrency; never affects results
  std::string output_path;
};

ExperimentConfig default_config(ExperimentKind kind);

/// Applies one "key = value" setting. Keys: n, m, k, t, s, rule, beta, gamma,
/// realizations, seed, n_max, threshold, cost_exponent, workers, out,
/// experiment. Lists are comma separated. Throws InvalidConfig.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads a flat key-value file ('#' starts a comment, blank lines ignored).
/// An "experiment" key, if present, must come before other keys since it
/// resets the defaults.
ExperimentConfig load_config_file(const std::filesystem::path& path);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Throws InvalidConfig if a sweep list is empty or not strictly increasing,
/// or a parameter is out of range for the chosen experiment.
void validate(const ExperimentConfig& config);

/// Canonical key/value echo of everything that influences results (no
/// output path, no worker count).
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config);

std::string rule_name(const UtilityRule& rule);

}  // namespace matchmarket
