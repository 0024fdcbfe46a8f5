#include "mslab/hermite.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mslab {

namespace {
const double kInvPiQuarter = std::pow(M_PI, -0.25);

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Three-term recurrence on the weighted form with power-of-2 rescaling so a
// deep-underflow start (exp(-x^2/2) below double range) still recovers the
// representable high-n entries instead of collapsing to zero.
void hermite_recurrence(double x, int n_max, Eigen::VectorXd& out) {
  out.resize(n_max + 1);
  const double half_x2 = 0.5 * x * x;
  int e2 = 0;       // current block exponent, values are v * 2^e2
  double v0, v1;    // H_hat_{n-1}, H_hat_n up to the 2^e2 factor
  if (half_x2 < 600.0) {
    v0 = kInvPiQuarter * std::exp(-half_x2);
  } else {
    const double l2 = -half_x2 * M_LOG2E + std::log2(kInvPiQuarter);
    e2 = static_cast<int>(std::floor(l2));
    v0 = std::exp2(l2 - e2);
  }
  out[0] = std::ldexp(v0, e2);
  if (n_max == 0) return;
  v1 = std::sqrt(2.0) * x * v0;
  out[1] = std::ldexp(v1, e2);
  constexpr double kHuge = 0x1p500, kTiny = 0x1p-500;
  for (int n = 1; n < n_max; ++n) {
    double v2 = x * std::sqrt(2.0 / (n + 1)) * v1 -
                std::sqrt(static_cast<double>(n) / (n + 1)) * v0;
    double mag = std::abs(v2) + std::abs(v1);
    if (mag > kHuge) {
      v1 = std::ldexp(v1, -500);
      v2 = std::ldexp(v2, -500);
      e2 += 500;
    } else if (mag < kTiny && mag > 0.0) {
      v1 = std::ldexp(v1, 500);
      v2 = std::ldexp(v2, 500);
      e2 -= 500;
    }
    out[n + 1] = std::ldexp(v2, e2);
    v0 = v1;
    v1 = v2;
  }
}
}  // namespace

HermiteBasis::HermiteBasis(int p, double lam) : order_p(p), lambda(lam) {
  require(p >= 0, "HermiteBasis: order_p must be >= 0");
  require(lam > 0.0 && std::isfinite(lam), "HermiteBasis: lambda must be positive");
}

Eigen::VectorXd eval_hermite_functions(double x, int n_max) {
  require(std::isfinite(x), "eval_hermite_functions: non-finite x");
  require(n_max >= 0, "eval_hermite_functions: n_max must be >= 0");
  Eigen::VectorXd h;
  hermite_recurrence(x, n_max, h);
  return h;
}

Eigen::VectorXd eval_hermite_derivatives(double x, int n_max) {
  require(std::isfinite(x), "eval_hermite_derivatives: non-finite x");
  require(n_max >= 0, "eval_hermite_derivatives: n_max must be >= 0");
  Eigen::VectorXd h = eval_hermite_functions(x, n_max + 1);
  Eigen::VectorXd d(n_max + 1);
  d[0] = -std::sqrt(0.5) * h[1];
  for (int n = 1; n <= n_max; ++n) {
    d[n] = std::sqrt(0.5 * n) * h[n - 1] - std::sqrt(0.5 * (n + 1)) * h[n + 1];
  }
  return d;
}

ConnectionTable::ConnectionTable(double lambda, int n_max)
    : lambda_(lambda), n_max_(n_max) {
  require(lambda > 0.0 && std::isfinite(lambda), "ConnectionTable: lambda must be positive");
  require(n_max >= 0, "ConnectionTable: n_max must be >= 0");
  data_.assign(static_cast<std::size_t>(n_max + 1) * (n_max + 2) / 2, 0.0);
  data_[idx(0, 0)] = 1.0;
  if (n_max == 0) return;
  data_[idx(1, 0)] = 0.0;
  data_[idx(1, 1)] = lambda;
  for (int n = 1; n < n_max; ++n) {
    // row n+1 from rows n and n-1
    const double rn = std::sqrt(static_cast<double>(n) / (n + 1));
    data_[idx(n + 1, 0)] =
        lambda * std::sqrt(1.0 / (n + 1)) * data_[idx(n, 1)] - rn * data_[idx(n - 1, 0)];
    for (int k = 1; k <= n - 1; ++k) {
      data_[idx(n + 1, k)] =
          lambda * std::sqrt(static_cast<double>(k + 1) / (n + 1)) * data_[idx(n, k + 1)] -
          rn * data_[idx(n - 1, k)] +
          lambda * std::sqrt(static_cast<double>(k) / (n + 1)) * data_[idx(n, k - 1)];
    }
    for (int k = n; k <= n + 1; ++k) {
      data_[idx(n + 1, k)] =
          lambda * std::sqrt(static_cast<double>(k) / (n + 1)) * data_[idx(n, k - 1)];
    }
  }
}

ConnectionTable connection_table(double lambda, int n_max) {
  return ConnectionTable(lambda, n_max);
}

double connection_explicit(int n, int k, double lambda) {
  require(k >= 0 && k <= n, "connection_explicit: need 0 <= k <= n");
  require(lambda > 0.0, "connection_explicit: lambda must be positive");
  if ((n - k) % 2 != 0) return 0.0;
  const int s = (n - k) / 2;
  const double g = lambda * lambda - 1.0;
  if (s > 0 && g == 0.0) return 0.0;
  if (n <= 30) {
    double fact_n = 1.0, fact_k = 1.0, fact_s = 1.0;
    for (int i = 2; i <= n; ++i) fact_n *= i;
    for (int i = 2; i <= k; ++i) fact_k *= i;
    for (int i = 2; i <= s; ++i) fact_s *= i;
    return std::sqrt(fact_n / (std::pow(2.0, n - k) * fact_k)) / fact_s *
           std::pow(lambda, k) * std::pow(g, s);
  }
  // log-space: sqrt(n!/(2^{n-k} k!)) / s! * lambda^k * (lambda^2-1)^s
  double lg = 0.5 * (std::lgamma(n + 1.0) - (n - k) * std::log(2.0) - std::lgamma(k + 1.0)) -
              std::lgamma(s + 1.0) + k * std::log(lambda) + s * std::log(std::abs(g));
  double sign = (g < 0.0 && (s % 2 == 1)) ? -1.0 : 1.0;
  return sign * std::exp(lg);
}

Eigen::MatrixXd weighted_inner_products(double tau, int n_max) {
  require(tau >= 0.0 && std::isfinite(tau), "weighted_inner_products: tau must be >= 0");
  require(n_max >= 0, "weighted_inner_products: n_max must be >= 0");
  const double mu = 1.0 / std::sqrt(tau + 1.0);
  ConnectionTable h(mu, n_max);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k <= n; ++k) L(n, k) = h(n, k);
  Eigen::MatrixXd I = mu * (L * L.transpose());
  // exact parity and symmetry
  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k < n; ++k) {
      if ((n + k) % 2 != 0)
        I(n, k) = I(k, n) = 0.0;
      else
        I(k, n) = I(n, k);
    }
  return I;
}

QuadratureRule gauss_hermite_rule(int count) {
  require(count >= 1, "gauss_hermite_rule: count must be >= 1");
  QuadratureRule rule;
  rule.count = count;
  if (count == 1) {
    rule.nodes = Eigen::VectorXd::Zero(1);
    rule.weights = Eigen::VectorXd::Constant(1, std::sqrt(M_PI));
    rule.weights_nogauss = rule.weights;
    return rule;
  }
  // Golub-Welsch: the Jacobi matrix for the Hermite weight has zero diagonal
  // and off-diagonal sqrt(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd sub(count - 1);
  for (int k = 1; k < count; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite_rule: tridiagonal eigensolve failed");
  rule.nodes = es.eigenvalues();
  rule.weights.resize(count);
  rule.weights_nogauss.resize(count);
  for (int i = 0; i < count; ++i) {
    const double x = rule.nodes[i];
    // w_i e^{x^2} = 1 / (count * H_hat_{count-1}(x_i)^2), overflow-free
    Eigen::VectorXd h = eval_hermite_functions(x, count - 1);
    const double hv = h[count - 1];
    rule.weights_nogauss[i] = 1.0 / (count * hv * hv);
    rule.weights[i] = rule.weights_nogauss[i] * std::exp(-x * x);
  }
  return rule;
}

}  // namespace mslab
