#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mslab {

// Flat experiment configuration. Loaded from a key=value file, overridable
// from the command line, and echoed verbatim into every report so a run can
// be reproduced from its own output.
struct ExperimentConfig {
  std::string experiment = "simulate";  // simulate | train_compare | bias_compare | ntk_study

  // scales
  int num_scales_s = 3;
  std::string alpha_rule = "pow2";
  int dim_d = 1;

  // spectral basis and time stepping
  int order_p = 100;
  double lambda = 0.0;  // 0 = auto: sqrt(2p+1) / (2 freq_max)
  double freq_max = 5.0;
  double dt = 1e-3;
  std::vector<double> snapshot_times = {0.1, 0.5, 1.0, 5.0};
  std::string initial = "indicator";  // indicator | network | zero

  // training
  int width_total = 12000;
  int num_samples = 2000;
  double learning_rate = 1e-3;
  int epochs = 10000;
  std::uint64_t seed = 1;
  std::vector<int> snapshot_epochs;  // empty = auto schedule

  // target
  double target_a = 4.2;
  double target_b = 5.8;
  double target_beta = 1.0;

  // ntk study
  std::vector<int> ntk_widths = {120, 1200, 12000};
  bool ntk_train = true;
  std::vector<int> drift_epochs = {1000, 2000, 5000};
  int drift_small_width = 120;
  int ntk_angles = 181;

  // evaluation grids
  double xi_max = 10.0;
  int xi_points = 801;
  int x_points = 401;

  std::string out_dir = "out";
  std::string profile = "paper";
};

// Baseline preset for one of the four experiments.
ExperimentConfig default_config(const std::string& experiment);

// Parses a flat key=value file (# comments, blank lines allowed) on top of
// `base`. Unknown keys and malformed values throw std::invalid_argument.
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base);

// Applies a named profile ("paper" is a no-op, "ci" shrinks presets).
void apply_profile(ExperimentConfig& config, const std::string& profile);

// Checks invariants; throws std::invalid_argument with a message on failure.
void validate(const ExperimentConfig& config);

// Canonical key=value echo; load_config on the result reproduces `config`.
std::string serialize_config(const ExperimentConfig& config);

// Effective snapshot epochs: the configured list, or the auto schedule
// {0, E/100, E/10, E/2, E} (deduplicated, sorted) when none are set.
std::vector<int> effective_snapshot_epochs(const ExperimentConfig& config);

}  // namespace mslab
