#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mslab/net.hpp"
#include "mslab/scales.hpp"

namespace mslab {

/// One point of a kernel-vs-angle sweep on the unit sphere.
struct KernelSample {
  double angle_beta;  // angle between the unit inputs, in [0, pi]
  double value;
};

/// Empirical NTK of the finite-width network: the inner-parameter gradient
/// inner product sum_j (alpha_j^{2d}(alpha_j^2 x.x' + 1)/N) sum_k cos cos.
double empirical_ntk(const NetworkParams& params, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& x_prime);

/// Infinite-width limit of the biased kernel:
/// sum_j alpha_j^{2d}(alpha_j^2 x.x' + 1)/(2(s+1)) *
///   [e^{-2} e^{-alpha_j^2 |x+x'|^2/2} + e^{-alpha_j^2 |x-x'|^2/2}].
double limit_ntk(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const ScaleSpec& spec);

/// No-bias variants: the +1 bias channel and the e^{-2} factor drop out.
double empirical_ntk_no_bias(const NetworkParams& params, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& x_prime);
double limit_ntk_no_bias(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                         const ScaleSpec& spec);

/// Sweeps x = e1 against x' = cos(beta) e1 + sin(beta) e2 (needs d >= 2).
/// Default grid: 181 uniform angles on [0, pi].
std::vector<double> default_angle_grid();
std::vector<KernelSample> kernel_vs_angle(const NetworkParams& params,
                                          const std::vector<double>& angle_grid);
std::vector<KernelSample> kernel_vs_angle_limit(const ScaleSpec& spec,
                                                const std::vector<double>& angle_grid);

}  // namespace mslab
