#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mslab/config.hpp"
#include "mslab/profile.hpp"

namespace mslab {

// Outcome of one experiment run: the exact config it ran with, a metrics
// document, and the names (relative to config.out_dir) of every file written.
struct ExperimentReport {
  ExperimentConfig config;
  nlohmann::json metrics;
  std::vector<std::string> files;
};

ExperimentReport run_simulate(const ExperimentConfig& config);
ExperimentReport run_train_compare(const ExperimentConfig& config);
ExperimentReport run_bias_compare(const ExperimentConfig& config);
ExperimentReport run_ntk_study(const ExperimentConfig& config);

// Validates and dispatches on config.experiment.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Trapezoid integral of |eta_hat|^2 over lo <= |xi| < hi on the profile grid.
double band_energy(const FrequencyProfile& profile, double lo, double hi);

// Basis scaling: explicit config.lambda, or sqrt(2p+1) / (2 freq_max) so the
// Hermite turning point sits at the highest frequency of interest.
double resolve_lambda(const ExperimentConfig& config);

}  // namespace mslab
