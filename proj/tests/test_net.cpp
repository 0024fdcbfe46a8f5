#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <doctest.h>

#include "mslab/net.hpp"

using mslab::NetworkParams;
using mslab::SampleSet;
using mslab::ScaleSpec;
using mslab::TrainConfig;

namespace {

// Straight-line reimplementation of the network sum with libm trig and the
// opposite neuron order. Shares no code with the library paths.
double naive_forward(const NetworkParams& p, const Eigen::VectorXd& x) {
  const int n = p.total_width();
  const int q = p.width_per_scale_q;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  double total = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    const double alpha = p.spec.alphas[i / q];
    double phase = p.has_bias ? p.biases[i] : 0.0;
    for (int c = 0; c < p.spec.dim_d; ++c) phase += alpha * p.inner_weights(i, c) * x[c];
    total += std::pow(alpha, p.spec.dim_d) * std::sin(phase);
  }
  return inv_sqrt_n * total;
}

double naive_loss(const NetworkParams& p, const SampleSet& s, double beta) {
  const int n = static_cast<int>(s.y.size());
  double acc = 0.0;
  for (int m = 0; m < n; ++m) {
    const double e = naive_forward(p, s.X.row(m).transpose()) - s.y[m];
    acc += e * e;
  }
  return 0.5 * (2.0 * beta / n) * acc;
}

// One full-batch descent step, neuron by neuron, sample by sample.
void naive_step(NetworkParams& p, const SampleSet& s, double tau, double beta) {
  const int n = static_cast<int>(s.y.size());
  const int width = p.total_width();
  const int q = p.width_per_scale_q;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(width));
  const double rw = 2.0 * beta / n;

  std::vector<double> err(n);
  for (int m = 0; m < n; ++m) err[m] = naive_forward(p, s.X.row(m).transpose()) - s.y[m];

  Eigen::MatrixXd gw = Eigen::MatrixXd::Zero(width, p.spec.dim_d);
  Eigen::VectorXd gb = Eigen::VectorXd::Zero(width);
  for (int i = 0; i < width; ++i) {
    const double alpha = p.spec.alphas[i / q];
    const double w = std::pow(alpha, p.spec.dim_d) * inv_sqrt_n;
    for (int m = 0; m < n; ++m) {
      double phase = p.has_bias ? p.biases[i] : 0.0;
      for (int c = 0; c < p.spec.dim_d; ++c) phase += alpha * p.inner_weights(i, c) * s.X(m, c);
      const double ec = err[m] * std::cos(phase);
      for (int c = 0; c < p.spec.dim_d; ++c) gw(i, c) += rw * w * alpha * ec * s.X(m, c);
      gb[i] += rw * w * ec;
    }
  }
  p.inner_weights -= tau * gw;
  if (p.has_bias) p.biases -= tau * gb;
}

SampleSet grid_samples(const std::function<double(double)>& f, int n, double beta) {
  SampleSet s;
  s.X.resize(n, 1);
  s.y.resize(n);
  const double dx = 2.0 * beta / n;
  for (int m = 0; m < n; ++m) {
    s.X(m, 0) = -beta + (m + 0.5) * dx;
    s.y[m] = f(s.X(m, 0));
  }
  return s;
}

}  // namespace

TEST_CASE("initialization is seeded, reproducible, and standard normal") {
  const ScaleSpec spec = ScaleSpec::dyadic(3, 1);
  NetworkParams a = mslab::init_params(spec, 3000, 42, true);
  NetworkParams b = mslab::init_params(spec, 3000, 42, true);
  NetworkParams c = mslab::init_params(spec, 3000, 43, true);
  CHECK(a.inner_weights == b.inner_weights);
  CHECK(a.biases == b.biases);
  CHECK(a.inner_weights != c.inner_weights);
  CHECK(a.total_width() == 12000);

  // CLT check: sample mean of 12000 unit normals lies within 4 sigma.
  const double bound = 4.0 / std::sqrt(12000.0);
  CHECK(std::abs(a.inner_weights.col(0).mean()) < bound);
  CHECK(std::abs(a.biases.mean()) < bound);
  CHECK(std::abs(a.inner_weights.col(0).squaredNorm() / 12000.0 - 1.0) < 4.0 * std::sqrt(2.0 / 12000.0));

  NetworkParams nb = mslab::init_params(spec, 10, 42, false);
  CHECK(nb.biases.isZero(0.0));
}

TEST_CASE("forward pass matches a naive reimplementation") {
  const ScaleSpec spec = ScaleSpec::dyadic(2, 3);
  NetworkParams p = mslab::init_params(spec, 7, 1234, true);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(3);
    for (int c = 0; c < 3; ++c) x[c] = unif(rng);
    const double ref = naive_forward(p, x);
    CHECK(mslab::forward(p, x) == doctest::Approx(ref).epsilon(1e-12));
  }

  Eigen::MatrixXd X(4, 3);
  for (int m = 0; m < 4; ++m)
    for (int c = 0; c < 3; ++c) X(m, c) = unif(rng);
  const Eigen::VectorXd batch = mslab::forward_batch(p, X);
  for (int m = 0; m < 4; ++m)
    CHECK(batch[m] == doctest::Approx(naive_forward(p, X.row(m).transpose())).epsilon(1e-12));
}

TEST_CASE("a single neuron with handset parameters evaluates exactly") {
  const ScaleSpec spec{0, {1.0}, 1};
  NetworkParams p = mslab::init_params(spec, 1, 0, true);
  p.inner_weights(0, 0) = 0.0;
  p.biases[0] = M_PI / 2.0;
  Eigen::VectorXd x(1);
  for (double xv : {-2.0, 0.0, 3.7}) {
    x[0] = xv;
    CHECK(mslab::forward(p, x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("bias-free networks are exactly odd") {
  const ScaleSpec spec = ScaleSpec::dyadic(2, 2);
  NetworkParams p = mslab::init_params(spec, 9, 77, false);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(2);
    x[0] = unif(rng);
    x[1] = unif(rng);
    const double fw = mslab::forward(p, x);
    const double bw = mslab::forward(p, Eigen::VectorXd(-x));
    CHECK(bw == -fw);
  }
}

TEST_CASE("gradient step matches central finite differences") {
  struct Case {
    int s, q, d;
  };
  for (const Case cs : {Case{0, 5, 1}, Case{2, 4, 2}, Case{3, 3, 3}}) {
    CAPTURE(cs.s);
    const ScaleSpec spec = ScaleSpec::dyadic(cs.s, cs.d);
    NetworkParams p = mslab::init_params(spec, cs.q, 300 + cs.s, true);

    SampleSet samples;
    std::mt19937_64 rng(17 + cs.s);
    std::normal_distribution<double> normal(0.0, 0.7);
    const int n = 30;
    samples.X.resize(n, cs.d);
    samples.y.resize(n);
    for (int m = 0; m < n; ++m) {
      for (int c = 0; c < cs.d; ++c) samples.X(m, c) = normal(rng);
      samples.y[m] = normal(rng);
    }
    const double beta = 1.0;

    // Recover the gradient from one unit-rate step.
    const NetworkParams next = mslab::grad_step(p, samples, 1.0, beta);
    const Eigen::MatrixXd gw = p.inner_weights - next.inner_weights;
    const Eigen::VectorXd gb = p.biases - next.biases;
    const double gsup = std::max(gw.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());

    const double h = 1e-5;
    std::uniform_int_distribution<int> pick_row(0, p.total_width() - 1);
    std::uniform_int_distribution<int> pick_col(0, cs.d - 1);
    for (int trial = 0; trial < 20; ++trial) {
      const int i = pick_row(rng);
      const bool bias_coord = (trial % 4 == 3);
      const int c = bias_coord ? 0 : pick_col(rng);
      NetworkParams lo = p, hi = p;
      if (bias_coord) {
        lo.biases[i] -= h;
        hi.biases[i] += h;
      } else {
        lo.inner_weights(i, c) -= h;
        hi.inner_weights(i, c) += h;
      }
      const double fd = (mslab::loss(hi, samples, beta) - mslab::loss(lo, samples, beta)) / (2.0 * h);
      const double an = bias_coord ? gb[i] : gw(i, c);
      // Relative error floored at 1e-3 of the gradient sup-norm: central
      // differences carry O(h^2 alpha^3) truncation independent of |g_i|,
      // which swamps coordinates that are individually near-cancelled.
      CHECK(std::abs(an - fd) <= 1e-6 * std::max(std::abs(fd), 1e-3 * gsup));
    }
  }
}

TEST_CASE("zero training error leaves parameters bitwise unchanged") {
  const ScaleSpec spec = ScaleSpec::dyadic(1, 1);
  NetworkParams p = mslab::init_params(spec, 6, 4, true);
  SampleSet s;
  s.X.resize(11, 1);
  for (int m = 0; m < 11; ++m) s.X(m, 0) = -1.0 + 0.2 * m;
  s.y = mslab::forward_batch(p, s.X);

  const NetworkParams stepped = mslab::grad_step(p, s, 1e-3, 1.0);
  CHECK(stepped.inner_weights == p.inner_weights);
  CHECK(stepped.biases == p.biases);
}

TEST_CASE("a small step at tau = 1e-5 decreases the loss") {
  const ScaleSpec spec = ScaleSpec::dyadic(3, 1);
  NetworkParams p = mslab::init_params(spec, 40, 11, true);
  SampleSet s = grid_samples([](double x) { return std::sin(4.2 * M_PI * x) + std::cos(5.8 * M_PI * x); }, 200, 1.0);
  const double before = mslab::loss(p, s, 1.0);
  p = mslab::grad_step(p, s, 1e-5, 1.0);
  CHECK(mslab::loss(p, s, 1.0) < before);
}

TEST_CASE("library trainer agrees with an independent naive trainer") {
  const auto target = [](double x) { return std::sin(4.2 * M_PI * x) + std::cos(5.8 * M_PI * x); };
  const ScaleSpec spec = ScaleSpec::dyadic(3, 1);
  const int q = 100, n = 200, epochs = 100;
  const double tau = 1e-3, beta = 1.0;

  TrainConfig cfg;
  cfg.learning_rate_tau = tau;
  cfg.epochs = epochs;
  cfg.num_samples = n;
  cfg.domain_beta = beta;
  cfg.seed = 2024;
  cfg.snapshot_epochs = {epochs};
  NetworkParams init = mslab::init_params(spec, q, cfg.seed, true);
  mslab::TrainResult fast = mslab::train(init, [&](const Eigen::VectorXd& x) { return target(x[0]); }, cfg);

  NetworkParams ref = init;
  SampleSet s = grid_samples(target, n, beta);
  std::vector<double> ref_curve;
  ref_curve.push_back(naive_loss(ref, s, beta));
  for (int e = 0; e < epochs; ++e) {
    naive_step(ref, s, tau, beta);
    ref_curve.push_back(naive_loss(ref, s, beta));
  }

  REQUIRE(fast.loss_curve.size() == ref_curve.size());
  for (std::size_t e = 0; e < ref_curve.size(); ++e) {
    CAPTURE(e);
    CHECK(std::abs(fast.loss_curve[e] - ref_curve[e]) <= 0.02 * ref_curve[e]);
  }
  const NetworkParams& last = fast.snapshots.back().params;
  CHECK((last.inner_weights - ref.inner_weights).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((last.biases - ref.biases).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fast.loss_curve.back() < fast.loss_curve.front());
}

TEST_CASE("training is deterministic and snapshots land where requested") {
  const ScaleSpec spec = ScaleSpec::dyadic(2, 1);
  TrainConfig cfg;
  cfg.epochs = 7;
  cfg.num_samples = 64;
  cfg.seed = 5;
  cfg.snapshot_epochs = {3, 7};
  const auto target = [](const Eigen::VectorXd& x) { return std::sin(M_PI * x[0]); };

  NetworkParams init = mslab::init_params(spec, 10, cfg.seed, true);
  mslab::TrainResult r1 = mslab::train(init, target, cfg);
  mslab::TrainResult r2 = mslab::train(init, target, cfg);

  REQUIRE(r1.snapshots.size() == 3);  // epoch 0 is always recorded
  CHECK(r1.snapshots[0].epoch == 0);
  CHECK(r1.snapshots[1].epoch == 3);
  CHECK(r1.snapshots[2].epoch == 7);
  CHECK(r1.loss_curve.size() == 8);
  for (std::size_t k = 0; k < r1.snapshots.size(); ++k) {
    CHECK(r1.snapshots[k].params.inner_weights == r2.snapshots[k].params.inner_weights);
    CHECK(r1.snapshots[k].params.biases == r2.snapshots[k].params.biases);
    CHECK(r1.snapshots[k].loss == r2.snapshots[k].loss);
  }

  cfg.epochs = 0;
  cfg.snapshot_epochs = {};
  mslab::TrainResult r0 = mslab::train(init, target, cfg);
  CHECK(r0.snapshots.size() == 1);
  CHECK(r0.loss_curve.size() == 1);
  CHECK(r0.snapshots[0].params.inner_weights == init.inner_weights);
}

TEST_CASE("bias-free training preserves oddness at every snapshot") {
  const ScaleSpec spec = ScaleSpec::dyadic(2, 1);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.num_samples = 128;
  cfg.seed = 21;
  cfg.snapshot_epochs = {10, 50};
  NetworkParams init = mslab::init_params(spec, 20, cfg.seed, false);
  mslab::TrainResult r =
      mslab::train(init, [](const Eigen::VectorXd& x) { return std::sin(3.0 * M_PI * x[0]); }, cfg);
  Eigen::VectorXd x(1);
  for (const mslab::TrainRecord& rec : r.snapshots) {
    CHECK(rec.params.biases.isZero(0.0));
    for (double xv : {0.31, 0.77}) {
      x[0] = xv;
      const double fw = mslab::forward(rec.params, x);
      x[0] = -xv;
      CHECK(mslab::forward(rec.params, x) == -fw);
    }
  }
}

TEST_CASE("multiscale training makes progress on the two-tone target") {
  const ScaleSpec spec = ScaleSpec::dyadic(3, 1);
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.num_samples = 400;
  cfg.seed = 9;
  NetworkParams init = mslab::init_params(spec, 100, cfg.seed, true);
  mslab::TrainResult r = mslab::train(
      init, [](const Eigen::VectorXd& x) { return std::sin(4.2 * M_PI * x[0]) + std::cos(5.8 * M_PI * x[0]); }, cfg);
  CHECK(r.loss_curve.back() < 0.9 * r.loss_curve.front());
}

TEST_CASE("snapshot files round-trip bitwise") {
  const ScaleSpec spec = ScaleSpec::dyadic(2, 3);
  NetworkParams p = mslab::init_params(spec, 15, 31337, true);
  const std::string path = "net_roundtrip.bin";
  mslab::save_params(path, p);
  NetworkParams q = mslab::load_params(path);
  std::remove(path.c_str());

  CHECK(q.spec.num_scales_s == p.spec.num_scales_s);
  CHECK(q.spec.alphas == p.spec.alphas);
  CHECK(q.spec.dim_d == p.spec.dim_d);
  CHECK(q.width_per_scale_q == p.width_per_scale_q);
  CHECK(q.has_bias == p.has_bias);
  CHECK(q.init_seed == p.init_seed);
  CHECK(q.inner_weights == p.inner_weights);
  CHECK(q.biases == p.biases);
  CHECK_THROWS(mslab::load_params("definitely_missing_file.bin"));
}
