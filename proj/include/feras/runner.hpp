#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feras/config.hpp"

namespace feras {

// Exit codes shared with the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitSizeGuard = 4;

// Trains per cfg.variant, writes metrics.csv and summary.json under
// cfg.output_dir. Returns kExitOk or kExitDiverged.
int run_experiment(const ExperimentConfig& cfg);

// One run per (value, variant, seed); raw metrics under output_dir/runs/,
// aggregates with mean and 95% CI in output_dir/sweep.csv. axis is one of
// kappa, q, n_hosts. Seeds are cfg.seed .. cfg.seed + n_seeds - 1.
int run_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values, int n_seeds, double f1_threshold);

// Builds a frozen instance, certifies every host's constraints and the
// shared-vs-plain comparison, writes certify.json. Returns kExitSizeGuard if
// the dense linearization guard trips.
int run_certify(const ExperimentConfig& cfg);

}  // namespace feras
