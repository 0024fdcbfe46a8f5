#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "mslab/net.hpp"
#include "mslab/ntk.hpp"

using mslab::NetworkParams;
using mslab::ScaleSpec;

namespace {

// Independent oracle: the tangent kernel is the inner product of parameter
// gradients of the network output, here taken by central differences.
double fd_kernel(const NetworkParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
  const double h = 1e-6;
  double acc = 0.0;
  auto fd_pair = [&](NetworkParams& lo, NetworkParams& hi) {
    const double gx = (mslab::forward(hi, x) - mslab::forward(lo, x)) / (2.0 * h);
    const double gxp = (mslab::forward(hi, xp) - mslab::forward(lo, xp)) / (2.0 * h);
    acc += gx * gxp;
  };
  for (int i = 0; i < p.total_width(); ++i) {
    for (int c = 0; c < p.spec.dim_d; ++c) {
      NetworkParams lo = p, hi = p;
      lo.inner_weights(i, c) -= h;
      hi.inner_weights(i, c) += h;
      fd_pair(lo, hi);
    }
    if (p.has_bias) {
      NetworkParams lo = p, hi = p;
      lo.biases[i] -= h;
      hi.biases[i] += h;
      fd_pair(lo, hi);
    }
  }
  return acc;
}

Eigen::VectorXd angle_point(double beta) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
  v[0] = std::cos(beta);
  v[1] = std::sin(beta);
  return v;
}

}  // namespace

TEST_CASE("empirical kernel equals the parameter-gradient inner product") {
  const ScaleSpec spec = ScaleSpec::dyadic(1, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd x(2), xp(2);
  for (int c = 0; c < 2; ++c) {
    x[c] = unif(rng);
    xp[c] = unif(rng);
  }

  NetworkParams p = mslab::init_params(spec, 3, 51, true);
  CHECK(mslab::empirical_ntk(p, x, xp) == doctest::Approx(fd_kernel(p, x, xp)).epsilon(1e-6));

  NetworkParams nb = mslab::init_params(spec, 3, 52, false);
  CHECK(mslab::empirical_ntk_no_bias(nb, x, xp) == doctest::Approx(fd_kernel(nb, x, xp)).epsilon(1e-6));
}

TEST_CASE("kernels are symmetric in their arguments") {
  const ScaleSpec spec = ScaleSpec::dyadic(3, 3);
  NetworkParams p = mslab::init_params(spec, 25, 7, true);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(3), xp(3);
  for (int c = 0; c < 3; ++c) {
    x[c] = normal(rng);
    xp[c] = normal(rng);
  }
  CHECK(mslab::empirical_ntk(p, x, xp) == mslab::empirical_ntk(p, xp, x));
  CHECK(mslab::limit_ntk(x, xp, spec) == mslab::limit_ntk(xp, x, spec));
}

TEST_CASE("a single zeroed neuron reproduces the rank-one kernel") {
  const ScaleSpec spec{0, {1.0}, 1};
  NetworkParams p = mslab::init_params(spec, 1, 0, true);
  p.inner_weights.setZero();
  p.biases.setZero();
  Eigen::VectorXd x(1), xp(1);
  x[0] = 0.8;
  xp[0] = -1.3;
  CHECK(mslab::empirical_ntk(p, x, xp) == doctest::Approx(x[0] * xp[0] + 1.0).epsilon(1e-15));
}

TEST_CASE("limit kernel closed-form values") {
  const ScaleSpec one{0, {1.0}, 1};
  Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
  const double at_origin = mslab::limit_ntk(z, z, one);
  CHECK(at_origin == doctest::Approx((1.0 + std::exp(-2.0)) / 2.0).epsilon(1e-15));
  CHECK(at_origin == doctest::Approx(0.56767).epsilon(1e-4));

  const ScaleSpec one3{0, {1.0}, 3};
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  CHECK(mslab::limit_ntk(e1, e1, one3) == doctest::Approx(1.0 + std::exp(-4.0)).epsilon(1e-15));
}

TEST_CASE("bias-free limit kernel vanishing and antisymmetry") {
  const ScaleSpec spec = ScaleSpec::dyadic(2, 3);
  Eigen::VectorXd x(3), y(3);
  x << 0.9, -0.1, 0.4;
  y << 0.1, 0.5, -0.1;  // orthogonal to x
  REQUIRE(std::abs(x.dot(y)) < 1e-15);
  CHECK(mslab::limit_ntk_no_bias(x, y, spec) == 0.0);
  CHECK(mslab::limit_ntk_no_bias(x, Eigen::VectorXd(-x), spec) ==
        doctest::Approx(-mslab::limit_ntk_no_bias(x, x, spec)).epsilon(1e-15));
}

TEST_CASE("monte-carlo convergence of the empirical kernel to the limit") {
  const ScaleSpec spec = ScaleSpec::dyadic(3, 3);
  const std::vector<mslab::KernelSample> limit = mslab::kernel_vs_angle_limit(spec, mslab::default_angle_grid());
  double limit_sup = 0.0;
  for (const auto& s : limit) limit_sup = std::max(limit_sup, std::abs(s.value));
  REQUIRE(limit_sup > 0.0);

  auto sup_err = [&](int q, std::uint64_t seed) {
    NetworkParams p = mslab::init_params(spec, q, seed, true);
    const std::vector<mslab::KernelSample> emp = mslab::kernel_vs_angle(p, mslab::default_angle_grid());
    double worst = 0.0;
    for (std::size_t i = 0; i < emp.size(); ++i) worst = std::max(worst, std::abs(emp[i].value - limit[i].value));
    return worst / limit_sup;
  };
  auto median3 = [&](int q) {
    std::vector<double> e = {sup_err(q, 100), sup_err(q, 101), sup_err(q, 102)};
    std::sort(e.begin(), e.end());
    return e[1];
  };

  const double err_small = median3(30);    // width 120
  const double err_large = median3(300);   // width 1200
  CAPTURE(err_small);
  CAPTURE(err_large);
  CHECK(err_large < err_small);
  CHECK(err_large < 0.2);
}

TEST_CASE("limit kernel Gram matrices are positive semidefinite") {
  const ScaleSpec spec = ScaleSpec::dyadic(3, 3);
  std::mt19937_64 rng(40);
  std::normal_distribution<double> normal;
  const int npts = 20;
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < npts; ++i) {
    Eigen::VectorXd v(3);
    for (int c = 0; c < 3; ++c) v[c] = normal(rng);
    pts.push_back(v);
  }
  Eigen::MatrixXd gram(npts, npts);
  for (int i = 0; i < npts; ++i)
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = mslab::limit_ntk(pts[i], pts[j], spec);
      gram(j, i) = gram(i, j);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double scale = gram.diagonal().maxCoeff();
  CHECK(es.eigenvalues().minCoeff() >= -1e-9 * scale);
}

TEST_CASE("angle sweeps are consistent and resolve the kernel shape") {
  const ScaleSpec spec = ScaleSpec::dyadic(3, 3);
  NetworkParams p = mslab::init_params(spec, 50, 23, true);

  const std::vector<double> grid = mslab::default_angle_grid();
  REQUIRE(grid.size() == 181);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(M_PI).epsilon(1e-15));

  const std::vector<mslab::KernelSample> emp = mslab::kernel_vs_angle(p, grid);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  CHECK(emp.front().value == doctest::Approx(mslab::empirical_ntk(p, e1, e1)).epsilon(1e-12));
  CHECK(emp.back().value == doctest::Approx(mslab::empirical_ntk(p, e1, angle_point(M_PI))).epsilon(1e-12));

  // The limit curve matches pointwise limit evaluations and is even in beta.
  const std::vector<mslab::KernelSample> lim = mslab::kernel_vs_angle_limit(spec, grid);
  for (std::size_t i = 0; i < grid.size(); i += 30) {
    CHECK(lim[i].value == doctest::Approx(mslab::limit_ntk(e1, angle_point(grid[i]), spec)).epsilon(1e-13));
    CHECK(mslab::limit_ntk(e1, angle_point(-grid[i]), spec) ==
          doctest::Approx(lim[i].value).epsilon(1e-13));
  }

  // On a 10x refined grid adjacent samples stay close relative to the peak.
  std::vector<double> fine;
  for (int i = 0; i <= 1800; ++i) fine.push_back(M_PI * i / 1800.0);
  const std::vector<mslab::KernelSample> lf = mslab::kernel_vs_angle_limit(spec, fine);
  double peak = 0.0;
  for (const auto& s : lf) peak = std::max(peak, std::abs(s.value));
  double max_jump = 0.0;
  for (std::size_t i = 1; i < lf.size(); ++i) max_jump = std::max(max_jump, std::abs(lf[i].value - lf[i - 1].value));
  CHECK(max_jump < 0.1 * peak);
}

TEST_CASE("angle sweep rejects one-dimensional inputs") {
  const ScaleSpec spec = ScaleSpec::dyadic(1, 1);
  NetworkParams p = mslab::init_params(spec, 4, 1, true);
  CHECK_THROWS_AS((void)mslab::kernel_vs_angle(p, mslab::default_angle_grid()), std::invalid_argument);
}
