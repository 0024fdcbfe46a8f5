#include "mslab/ntk.hpp"

#include <cmath>
#include <stdexcept>

#include "mslab/fastmath.hpp"

namespace mslab {

namespace {

double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

void check_pair(const NetworkParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
  validate(p.spec);
  if (p.inner_weights.rows() != p.total_width() || p.inner_weights.cols() != p.spec.dim_d ||
      p.biases.size() != p.total_width())
    throw std::invalid_argument("empirical_ntk: parameter layout mismatch");
  if (x.size() != p.spec.dim_d || xp.size() != p.spec.dim_d)
    throw std::invalid_argument("empirical_ntk: input dimension mismatch");
}

double empirical_sum(const NetworkParams& p, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& xp, bool bias_channel) {
  const int q = p.width_per_scale_q;
  const int d = p.spec.dim_d;
  const int n = p.total_width();
  const Eigen::VectorXd u = p.inner_weights * x;
  const Eigen::VectorXd v = p.inner_weights * xp;
  const double dot = x.dot(xp);
  double total = 0.0;
  for (int j = 0; j < p.spec.count(); ++j) {
    const double alpha = p.spec.alphas[j];
    double inner = 0.0;
    for (int k = 0; k < q; ++k) {
      const int i = j * q + k;
      inner += fastmath::cos(alpha * u[i] + p.biases[i]) *
               fastmath::cos(alpha * v[i] + p.biases[i]);
    }
    const double channel = alpha * alpha * dot + (bias_channel ? 1.0 : 0.0);
    total += ipow(alpha, 2 * d) * channel / n * inner;
  }
  return total;
}

double limit_from_geometry(double dot, double norm2_sum, double norm2_diff,
                           const ScaleSpec& spec, bool bias_channel) {
  validate(spec);
  const int d = spec.dim_d;
  const double em2 = std::exp(-2.0);
  double total = 0.0;
  for (double alpha : spec.alphas) {
    const double a2 = alpha * alpha;
    const double gauss_sum = std::exp(-0.5 * a2 * norm2_sum);
    const double gauss_diff = std::exp(-0.5 * a2 * norm2_diff);
    if (bias_channel) {
      total += ipow(alpha, 2 * d) * (a2 * dot + 1.0) / (2.0 * spec.count()) *
               (em2 * gauss_sum + gauss_diff);
    } else {
      total += ipow(alpha, 2 * (d + 1)) * dot / (2.0 * spec.count()) * (gauss_sum + gauss_diff);
    }
  }
  return total;
}

}  // namespace

double empirical_ntk(const NetworkParams& params, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& x_prime) {
  check_pair(params, x, x_prime);
  return empirical_sum(params, x, x_prime, true);
}

double empirical_ntk_no_bias(const NetworkParams& params, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& x_prime) {
  check_pair(params, x, x_prime);
  return empirical_sum(params, x, x_prime, false);
}

double limit_ntk(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const ScaleSpec& spec) {
  if (x.size() != spec.dim_d || x_prime.size() != spec.dim_d)
    throw std::invalid_argument("limit_ntk: input dimension mismatch");
  return limit_from_geometry(x.dot(x_prime), (x + x_prime).squaredNorm(),
                             (x - x_prime).squaredNorm(), spec, true);
}

double limit_ntk_no_bias(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                         const ScaleSpec& spec) {
  if (x.size() != spec.dim_d || x_prime.size() != spec.dim_d)
    throw std::invalid_argument("limit_ntk_no_bias: input dimension mismatch");
  return limit_from_geometry(x.dot(x_prime), (x + x_prime).squaredNorm(),
                             (x - x_prime).squaredNorm(), spec, false);
}

std::vector<double> default_angle_grid() {
  std::vector<double> grid(181);
  for (int i = 0; i <= 180; ++i) grid[i] = M_PI * i / 180.0;
  return grid;
}

std::vector<KernelSample> kernel_vs_angle(const NetworkParams& params,
                                          const std::vector<double>& angle_grid) {
  validate(params.spec);
  if (params.spec.dim_d < 2)
    throw std::invalid_argument("kernel_vs_angle: needs d >= 2 for a nondegenerate sweep");
  const int q = params.width_per_scale_q;
  const int d = params.spec.dim_d;
  const int n = params.total_width();
  // x = e1 is fixed: cos(alpha u + b) per neuron is angle-independent
  const Eigen::VectorXd u = params.inner_weights.col(0);
  const Eigen::VectorXd v = params.inner_weights.col(1);
  Eigen::VectorXd cx(n);
  for (int j = 0; j < params.spec.count(); ++j) {
    const double alpha = params.spec.alphas[j];
    for (int k = 0; k < q; ++k) {
      const int i = j * q + k;
      cx[i] = fastmath::cos(alpha * u[i] + params.biases[i]);
    }
  }
  std::vector<KernelSample> out;
  out.reserve(angle_grid.size());
  for (double beta : angle_grid) {
    const double cb = std::cos(beta), sb = std::sin(beta);
    double total = 0.0;
    for (int j = 0; j < params.spec.count(); ++j) {
      const double alpha = params.spec.alphas[j];
      double inner = 0.0;
      for (int k = 0; k < q; ++k) {
        const int i = j * q + k;
        inner += cx[i] * fastmath::cos(alpha * (cb * u[i] + sb * v[i]) + params.biases[i]);
      }
      total += ipow(alpha, 2 * d) * (alpha * alpha * cb + 1.0) / n * inner;
    }
    out.push_back({beta, total});
  }
  return out;
}

std::vector<KernelSample> kernel_vs_angle_limit(const ScaleSpec& spec,
                                                const std::vector<double>& angle_grid) {
  if (spec.dim_d < 2)
    throw std::invalid_argument("kernel_vs_angle_limit: needs d >= 2");
  std::vector<KernelSample> out;
  out.reserve(angle_grid.size());
  for (double beta : angle_grid) {
    const double cb = std::cos(beta);
    out.push_back({beta, limit_from_geometry(cb, 2.0 + 2.0 * cb, 2.0 - 2.0 * cb, spec, true)});
  }
  return out;
}

}  // namespace mslab
