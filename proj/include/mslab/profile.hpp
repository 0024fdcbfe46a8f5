#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mslab {

/// A complex-valued function of frequency sampled on a grid, split into real
/// and imaginary parts (the eta_hat = eta_hat_plus + i eta_hat_minus split).
struct FrequencyProfile {
  std::vector<double> xi_grid;
  Eigen::VectorXd real_part;
  Eigen::VectorXd imag_part;
};

}  // namespace mslab
