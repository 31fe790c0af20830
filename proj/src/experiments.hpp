#pragma once

#include <functional>
#include <string>

#include "config.hpp"
#include "result_table.hpp"

namespace matchmarket {

inline constexpr const char* kCodeVersion = "matchmarket 1.0.0";

using ProgressFn = std::function<void(const std::string&)>;

/// Runs the configured sweep. Output depends only on the config (including
/// the master seed), never on the worker count. Statistical non-convergence
/// is not an error; every Monte Carlo column has a paired "_se" column.
ResultTable run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// The scalar claims: min-rule trade-off and vendor-proposes inequality at
/// n_variants.front() (default 1000), the large-N uniform approximation's
/// error at N = 17, and mean/median/mode of the power-law maximum.
ResultTable claims_report(const ExperimentConfig& config, const ProgressFn& progress = {});

}  // namespace matchmarket
