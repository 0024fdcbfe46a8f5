#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "mslab/hermite.hpp"

using namespace mslab;

namespace {
double gaussian_part(double x) { return std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x); }
}  // namespace

TEST_CASE("hermite function closed forms up to n=4") {
  auto h0 = eval_hermite_functions(0.0, 2);
  CHECK(h0[0] == doctest::Approx(std::pow(M_PI, -0.25)).epsilon(1e-13));
  CHECK(h0[1] == 0.0);
  CHECK(h0[2] == doctest::Approx(-2.0 / (std::pow(M_PI, 0.25) * std::sqrt(8.0))).epsilon(1e-13));

  for (double x : {0.35, -1.2, 2.7, 6.4}) {
    auto h = eval_hermite_functions(x, 4);
    const double g = gaussian_part(x);
    CHECK(h[0] == doctest::Approx(g).epsilon(1e-13));
    CHECK(h[1] == doctest::Approx(std::sqrt(2.0) * x * g).epsilon(1e-13));
    CHECK(h[2] == doctest::Approx((4 * x * x - 2) / std::sqrt(8.0) * g).epsilon(1e-12));
    CHECK(h[3] == doctest::Approx((8 * x * x * x - 12 * x) / std::sqrt(48.0) * g).epsilon(1e-12));
    CHECK(h[4] ==
          doctest::Approx((16 * std::pow(x, 4) - 48 * x * x + 12) / std::sqrt(384.0) * g)
              .epsilon(1e-12));
  }
  CHECK_THROWS_AS(eval_hermite_functions(std::nan(""), 3), std::invalid_argument);
  CHECK_THROWS_AS(eval_hermite_functions(1.0, -1), std::invalid_argument);
}

TEST_CASE("orthonormality against the quadrature oracle, n,m <= 80") {
  const int n_max = 80;
  QuadratureRule rule = gauss_hermite_rule(200);
  Eigen::MatrixXd H(rule.count, n_max + 1);
  for (int i = 0; i < rule.count; ++i)
    H.row(i) = eval_hermite_functions(rule.nodes[i], n_max).transpose();
  Eigen::MatrixXd G = H.transpose() * rule.weights_nogauss.asDiagonal() * H;
  double worst = (G - Eigen::MatrixXd::Identity(n_max + 1, n_max + 1)).cwiseAbs().maxCoeff();
  CHECK(worst < 1e-10);
}

TEST_CASE("deep-underflow start still recovers high-n values (count 1204 rule)") {
  // Projection rules for p=300 reach |x| ~ 49 where exp(-x^2/2) is not
  // representable; the recovered high-n entries must still be accurate.
  QuadratureRule rule = gauss_hermite_rule(1204);
  CHECK(rule.weights_nogauss.allFinite());
  CHECK(rule.weights_nogauss.minCoeff() > 0.0);
  for (int n : {0, 300, 900, 1203}) {
    double sum = 0.0;
    for (int i = 0; i < rule.count; ++i) {
      Eigen::VectorXd h = eval_hermite_functions(rule.nodes[i], n);
      sum += rule.weights_nogauss[i] * h[n] * h[n];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("derivatives: identities and central differences") {
  for (double x : {-3.1, -0.4, 0.0, 0.9, 2.2}) {
    auto h = eval_hermite_functions(x, 2);
    auto d = eval_hermite_derivatives(x, 1);
    CHECK(d[0] == doctest::Approx(-x * h[0]).epsilon(1e-13));
    CHECK(d[1] == doctest::Approx(std::sqrt(2.0) * gaussian_part(x) * (1 - x * x)).epsilon(1e-12));
  }

  const int n_max = 30;
  const double step = 1e-5;
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = unif(rng);
    auto d = eval_hermite_derivatives(x, n_max);
    auto hp = eval_hermite_functions(x + step, n_max);
    auto hm = eval_hermite_functions(x - step, n_max);
    for (int n = 0; n <= n_max; ++n) {
      CHECK(d[n] == doctest::Approx((hp[n] - hm[n]) / (2 * step)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("connection table: pinned entries and parity") {
  for (double lam : {0.3, 1.0, 1.7}) {
    ConnectionTable t = connection_table(lam, 6);
    CHECK(t(0, 0) == 1.0);
    CHECK(t(1, 0) == 0.0);
    CHECK(t(1, 1) == lam);
    CHECK(t(2, 0) == doctest::Approx((lam * lam - 1) / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(t(5, 2) == 0.0);
    CHECK(t(3, 0) == 0.0);
    CHECK(t(2, 5) == 0.0);  // out of triangle
  }
  ConnectionTable id = connection_table(1.0, 12);
  for (int n = 0; n <= 12; ++n)
    for (int k = 0; k <= n; ++k) CHECK(id(n, k) == (n == k ? 1.0 : 0.0));
}

TEST_CASE("connection table matches the explicit formula, n <= 60") {
  for (double lam : {0.3, 0.9, 1.7}) {
    ConnectionTable t = connection_table(lam, 60);
    for (int n = 0; n <= 60; ++n)
      for (int k = 0; k <= n; ++k) {
        const double ref = connection_explicit(n, k, lam);
        CHECK(std::abs(t(n, k) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
      }
  }
  CHECK_THROWS_AS(connection_explicit(2, 3, 0.5), std::invalid_argument);
}

TEST_CASE("connection tables compose under scale products") {
  ConnectionTable a = connection_table(0.6, 40);
  ConnectionTable b = connection_table(0.5, 40);
  ConnectionTable c = connection_table(0.3, 40);
  for (int n = 0; n <= 40; ++n)
    for (int k = 0; k <= n; ++k) {
      double acc = 0.0;
      for (int j = k; j <= n; ++j) acc += a(n, j) * b(j, k);
      CHECK(std::abs(acc - c(n, k)) < 1e-11);
    }
}

TEST_CASE("weighted inner products: closed forms, parity, identity at tau=0") {
  Eigen::MatrixXd I0 = weighted_inner_products(0.0, 20);
  CHECK((I0 - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff() < 1e-15);

  for (double tau : {0.1, 1.0, 10.0}) {
    Eigen::MatrixXd I = weighted_inner_products(tau, 15);
    CHECK(I(0, 0) == doctest::Approx(1.0 / std::sqrt(1 + tau)).epsilon(1e-14));
    CHECK(I(1, 1) == doctest::Approx(std::pow(1 + tau, -1.5)).epsilon(1e-14));
    for (int n = 0; n <= 15; ++n)
      for (int k = 0; k <= 15; ++k) {
        if ((n + k) % 2 == 1) CHECK(I(n, k) == 0.0);
        CHECK(I(n, k) == I(k, n));
      }
  }
  CHECK_THROWS_AS(weighted_inner_products(-0.5, 4), std::invalid_argument);
}

TEST_CASE("weighted inner products match direct quadrature, n,k <= 30") {
  // Substituting x = u/sqrt(1+tau) makes the integrand a polynomial times
  // exp(-u^2), so the 200-point rule is exact up to degree 399.
  QuadratureRule rule = gauss_hermite_rule(200);
  for (double tau : {0.1, 1.0, 10.0}) {
    const double c = 1.0 / std::sqrt(1.0 + tau);
    Eigen::MatrixXd H(rule.count, 31);
    Eigen::VectorXd w(rule.count);
    for (int i = 0; i < rule.count; ++i) {
      const double u = rule.nodes[i];
      H.row(i) = eval_hermite_functions(c * u, 30).transpose();
      w[i] = c * rule.weights_nogauss[i] * std::exp(-tau * c * c * u * u);
    }
    Eigen::MatrixXd ref = H.transpose() * w.asDiagonal() * H;
    Eigen::MatrixXd I = weighted_inner_products(tau, 30);
    CHECK((I - ref).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("gauss-hermite rule: one-point rule, moments, symmetry") {
  QuadratureRule r1 = gauss_hermite_rule(1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-15));

  QuadratureRule r = gauss_hermite_rule(10);
  double dfact = 1.0;  // (2m-1)!!
  for (int m = 0; m <= 9; ++m) {
    if (m > 0) dfact *= 2 * m - 1;
    const double ref = std::sqrt(M_PI) * dfact / std::pow(2.0, m);
    double even = 0.0, odd = 0.0;
    for (int i = 0; i < r.count; ++i) {
      even += r.weights[i] * std::pow(r.nodes[i], 2 * m);
      odd += r.weights[i] * std::pow(r.nodes[i], 2 * m + 1);
    }
    CHECK(even == doctest::Approx(ref).epsilon(1e-13));
    CHECK(std::abs(odd) < 1e-13 * std::max(1.0, ref));
  }
  for (int i = 0; i + 1 < r.count; ++i) CHECK(r.nodes[i] < r.nodes[i + 1]);
  for (int i = 0; i < r.count; ++i)
    CHECK(std::abs(r.nodes[i] + r.nodes[r.count - 1 - i]) < 1e-12 * (1 + std::abs(r.nodes[i])));

  // pinned orthonormality spot check via the no-Gaussian weights
  QuadratureRule big = gauss_hermite_rule(200);
  double s33 = 0.0;
  for (int i = 0; i < big.count; ++i) {
    Eigen::VectorXd h = eval_hermite_functions(big.nodes[i], 3);
    s33 += big.weights_nogauss[i] * h[3] * h[3];
  }
  CHECK(s33 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_hermite_rule(0), std::invalid_argument);
}
