#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mslab/scales.hpp"

namespace mslab {

/// Two-layer multi-scale sine network: row jq+k of inner_weights belongs to
/// scale j and enters the activation as theta . (alpha_j x) + b. Outer
/// combination is the fixed alpha_j^d / sqrt(N); only theta and b train.
struct NetworkParams {
  Eigen::MatrixXd inner_weights;  // N x d
  Eigen::VectorXd biases;         // length N
  ScaleSpec spec;
  int width_per_scale_q = 0;
  bool has_bias = true;
  std::uint64_t init_seed = 0;

  int total_width() const { return spec.count() * width_per_scale_q; }
};

/// Training samples: rows of X in [-beta, beta]^d with target values y.
struct SampleSet {
  Eigen::MatrixXd X;  // n x d
  Eigen::VectorXd y;  // n
};

struct TrainConfig {
  double learning_rate_tau = 1e-3;
  int epochs = 0;
  int num_samples = 2;
  double domain_beta = 1.0;
  std::uint64_t seed = 0;
  std::vector<int> snapshot_epochs;  // epoch 0 is always recorded
  bool random_samples = false;       // d=1 defaults to the equispaced grid
};

struct TrainRecord {
  int epoch;
  double loss;
  NetworkParams params;
};

struct TrainResult {
  std::vector<TrainRecord> snapshots;
  std::vector<double> loss_curve;  // loss before update at each epoch, 0..epochs
};

using TargetFn = std::function<double(const Eigen::VectorXd&)>;

/// Seeded standard-normal parameters (Box-Muller over a fixed mt19937_64
/// stream, so initialization is identical across platforms).
NetworkParams init_params(const ScaleSpec& spec, int q, std::uint64_t seed, bool has_bias);

/// (1/sqrt(N)) sum_j alpha_j^d sum_k sin(theta_{jq+k} . alpha_j x + b_{jq+k}).
double forward(const NetworkParams& params, const Eigen::VectorXd& x);

/// Forward pass over all rows of X (the production evaluation path).
Eigen::VectorXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& X);

/// Riemann-weighted mean-square loss (2 beta / n) sum (N(x_i) - y_i)^2 / 2,
/// so discrete gradient descent tracks the gradient flow of the integral loss.
double loss(const NetworkParams& params, const SampleSet& samples, double beta);

/// One full-batch gradient-descent step with the closed-form gradients.
NetworkParams grad_step(const NetworkParams& params, const SampleSet& samples, double tau,
                        double beta);

/// Builds the sample set the trainer would use for this config (d=1 default:
/// midpoint-uniform grid on [-beta, beta]; otherwise seeded uniform draws).
SampleSet make_samples(const TargetFn& target, int dim_d, const TrainConfig& config);

/// Full-batch training loop; deterministic for a given (params, config).
/// Throws std::runtime_error when the loss stops being finite.
TrainResult train(const NetworkParams& init, const TargetFn& target, const TrainConfig& config);

/// Binary snapshot of (theta, b) with a descriptor (spec, q, seed) for exact
/// resume; round-trips bit-for-bit.
void save_params(const std::string& path, const NetworkParams& params);
NetworkParams load_params(const std::string& path);

}  // namespace mslab
