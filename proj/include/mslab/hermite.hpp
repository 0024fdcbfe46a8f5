#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mslab {

/// Scaled Hermite-function basis: span of H_hat_k(lambda*xi), k = 0..order_p.
/// The functions H_hat_n are the Gaussian-weighted (normalized) Hermite
/// functions, orthonormal on the real line; the lambda-scaled family obeys
/// <H_hat_n(lambda.), H_hat_m(lambda.)> = delta_nm / lambda.
struct HermiteBasis {
  int order_p = 0;       // highest basis index, >= 0
  double lambda = 1.0;   // frequency-axis scale factor, > 0

  HermiteBasis(int p, double lam);
  int size() const { return order_p + 1; }
};

/// Lower-triangular table of scale-connection coefficients h_{n,k}(lambda):
/// the expansion of a scaled Hermite polynomial in unscaled ones,
///   Ht_n(lambda y) = sum_k h_{n,k}(lambda) Ht_k(y).
/// Entries with odd n-k vanish identically.
class ConnectionTable {
 public:
  ConnectionTable(double lambda, int n_max);

  double lambda() const { return lambda_; }
  int n_max() const { return n_max_; }
  double operator()(int n, int k) const {
    return (k < 0 || k > n) ? 0.0 : data_[idx(n, k)];
  }

 private:
  static std::size_t idx(int n, int k) {
    return static_cast<std::size_t>(n) * (n + 1) / 2 + k;
  }
  double lambda_;
  int n_max_;
  std::vector<double> data_;  // packed lower triangle
};

/// Gaussian-weight quadrature on the real line.
/// `weights` integrate polynomial * exp(-x^2) exactly up to degree
/// 2*count - 1; `weights_nogauss` are the same weights with the Gaussian
/// factor folded in (w * exp(x^2), computed without over/underflow), for
/// integrands that carry their own exp(-x^2/2)-type decay.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd weights_nogauss;
  int count = 0;
};

/// H_hat_0(x) .. H_hat_{n_max}(x) by the stable three-term recurrence on the
/// weighted form (never exp(x^2/2) * polynomial).
Eigen::VectorXd eval_hermite_functions(double x, int n_max);

/// H_hat'_0(x) .. H_hat'_{n_max}(x) via the two-sided neighbor formula.
Eigen::VectorXd eval_hermite_derivatives(double x, int n_max);

/// Full h_{n,k}(lambda) table by the three-branch recurrence (production path).
ConnectionTable connection_table(double lambda, int n_max);

/// Closed-form h_{n,k}(lambda); log-gamma accumulation past n = 30 so the
/// factorials never overflow. Test oracle for the recurrence.
double connection_explicit(int n, int k, double lambda);

/// Symmetric matrix of weighted inner products
///   I_{nk}(tau) = integral H_hat_n(x) H_hat_k(x) exp(-tau x^2) dx,
/// n,k = 0..n_max, via the scale-connection reduction. I(0) is the identity;
/// entries with odd n+k vanish.
Eigen::MatrixXd weighted_inner_products(double tau, int n_max);

/// Gauss-Hermite rule (Golub-Welsch nodes, closed-form weights).
QuadratureRule gauss_hermite_rule(int count);

}  // namespace mslab
