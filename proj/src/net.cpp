#include "mslab/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "mslab/fastmath.hpp"

namespace mslab {

namespace {

double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

// Box-Muller over a fixed mt19937_64 stream; avoids the implementation-defined
// std::normal_distribution so seeds reproduce bit-for-bit everywhere.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

void check_params(const NetworkParams& p) {
  validate(p.spec);
  if (p.width_per_scale_q < 1)
    throw std::invalid_argument("NetworkParams: width_per_scale_q must be >= 1");
  if (p.inner_weights.rows() != p.total_width() || p.inner_weights.cols() != p.spec.dim_d ||
      p.biases.size() != p.total_width())
    throw std::invalid_argument("NetworkParams: weight/bias layout does not match spec");
}

// ---- generic-dimension passes (blocked GEMM + sincos) ----

constexpr int kBlock = 32;

Eigen::VectorXd predict_general(const NetworkParams& p, const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int d = p.spec.dim_d;
  const int q = p.width_per_scale_q;
  if (X.cols() != d) throw std::invalid_argument("forward: sample dimension mismatch");
  Eigen::VectorXd pred = Eigen::VectorXd::Zero(n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(p.total_width()));
  Eigen::MatrixXd P(n, kBlock);
  for (int j = 0; j < p.spec.count(); ++j) {
    const double alpha = p.spec.alphas[j];
    const double w = ipow(alpha, d) * inv_sqrt_n;
    for (int start = j * q; start < (j + 1) * q; start += kBlock) {
      const int cnt = std::min(kBlock, (j + 1) * q - start);
      P.leftCols(cnt).noalias() =
          alpha * (X * p.inner_weights.middleRows(start, cnt).transpose());
      for (int i = 0; i < cnt; ++i) {
        const double bi = p.biases[start + i];
        const double* col = P.col(i).data();
        for (int m = 0; m < n; ++m) {
          double s, c;
          fastmath::sincos(col[m] + bi, s, c);
          pred[m] += w * s;
        }
      }
    }
  }
  return pred;
}

void apply_grad_general(NetworkParams& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                        double riemann_w, double tau) {
  const int n = static_cast<int>(X.rows());
  const int d = p.spec.dim_d;
  const int q = p.width_per_scale_q;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(p.total_width()));
  Eigen::MatrixXd P(n, kBlock), C(n, kBlock);
  Eigen::MatrixXd Tb(d, kBlock);
  for (int j = 0; j < p.spec.count(); ++j) {
    const double alpha = p.spec.alphas[j];
    const double w = ipow(alpha, d) * inv_sqrt_n;
    for (int start = j * q; start < (j + 1) * q; start += kBlock) {
      const int cnt = std::min(kBlock, (j + 1) * q - start);
      P.leftCols(cnt).noalias() =
          alpha * (X * p.inner_weights.middleRows(start, cnt).transpose());
      for (int i = 0; i < cnt; ++i) {
        const double bi = p.biases[start + i];
        const double* col = P.col(i).data();
        double* out = C.col(i).data();
        for (int m = 0; m < n; ++m) {
          double s, c;
          fastmath::sincos(col[m] + bi, s, c);
          out[m] = e[m] * c;
        }
      }
      Tb.leftCols(cnt).noalias() = X.transpose() * C.leftCols(cnt);
      p.inner_weights.middleRows(start, cnt).noalias() -=
          (tau * riemann_w * w * alpha) * Tb.leftCols(cnt).transpose();
      if (p.has_bias)
        for (int i = 0; i < cnt; ++i)
          p.biases[start + i] -= tau * riemann_w * w * C.col(i).sum();
    }
  }
}

// ---- d=1 equispaced-grid fast path ----
// Phases are linear in the grid index, so sin/cos advance by a fixed rotation
// per sample; kLanes neurons run interleaved to hide the serial dependency.

constexpr int kLanes = 8;

struct GridWave {
  double a, b, w;  // phase a*x + b, output weight w
};

std::vector<GridWave> build_waves(const NetworkParams& p) {
  const int q = p.width_per_scale_q;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(p.total_width()));
  std::vector<GridWave> waves(p.total_width());
  for (int j = 0; j < p.spec.count(); ++j) {
    const double alpha = p.spec.alphas[j];
    for (int k = 0; k < q; ++k) {
      const int i = j * q + k;
      waves[i] = {alpha * p.inner_weights(i, 0), p.biases[i], alpha * inv_sqrt_n};
    }
  }
  return waves;
}

void predict_grid(const std::vector<GridWave>& waves, double x0, double dx,
                  Eigen::VectorXd& pred, std::vector<double>& lane_buf) {
  const int n = static_cast<int>(pred.size());
  lane_buf.assign(static_cast<std::size_t>(n) * kLanes, 0.0);
  for (std::size_t base = 0; base < waves.size(); base += kLanes) {
    const int cnt = static_cast<int>(std::min<std::size_t>(kLanes, waves.size() - base));
    double s[kLanes], c[kLanes], sd[kLanes], cd[kLanes], w[kLanes];
    for (int l = 0; l < kLanes; ++l) {
      if (l < cnt) {
        const GridWave& gw = waves[base + l];
        fastmath::sincos(gw.a * x0 + gw.b, s[l], c[l]);
        fastmath::sincos(gw.a * dx, sd[l], cd[l]);
        w[l] = gw.w;
      } else {
        s[l] = 0.0;
        c[l] = 1.0;
        sd[l] = 0.0;
        cd[l] = 1.0;
        w[l] = 0.0;
      }
    }
    double* L = lane_buf.data();
    for (int m = 0; m < n; ++m, L += kLanes) {
      for (int l = 0; l < kLanes; ++l) {
        L[l] += w[l] * s[l];
        const double ns = s[l] * cd[l] + c[l] * sd[l];
        c[l] = c[l] * cd[l] - s[l] * sd[l];
        s[l] = ns;
      }
    }
  }
  const double* L = lane_buf.data();
  for (int m = 0; m < n; ++m, L += kLanes)
    pred[m] = ((L[0] + L[1]) + (L[2] + L[3])) + ((L[4] + L[5]) + (L[6] + L[7]));
}

void grad_grid(const std::vector<GridWave>& waves, double x0, double dx,
               const Eigen::VectorXd& e, const Eigen::VectorXd& ex, Eigen::VectorXd& S,
               Eigen::VectorXd& T) {
  const int n = static_cast<int>(e.size());
  for (std::size_t base = 0; base < waves.size(); base += kLanes) {
    const int cnt = static_cast<int>(std::min<std::size_t>(kLanes, waves.size() - base));
    double s[kLanes], c[kLanes], sd[kLanes], cd[kLanes];
    double acc_s[kLanes] = {0}, acc_t[kLanes] = {0};
    for (int l = 0; l < kLanes; ++l) {
      if (l < cnt) {
        const GridWave& gw = waves[base + l];
        fastmath::sincos(gw.a * x0 + gw.b, s[l], c[l]);
        fastmath::sincos(gw.a * dx, sd[l], cd[l]);
      } else {
        s[l] = 0.0;
        c[l] = 1.0;
        sd[l] = 0.0;
        cd[l] = 1.0;
      }
    }
    for (int m = 0; m < n; ++m) {
      const double em = e[m], exm = ex[m];
      for (int l = 0; l < kLanes; ++l) {
        acc_s[l] += em * c[l];
        acc_t[l] += exm * c[l];
        const double ns = s[l] * cd[l] + c[l] * sd[l];
        c[l] = c[l] * cd[l] - s[l] * sd[l];
        s[l] = ns;
      }
    }
    for (int l = 0; l < cnt; ++l) {
      S[base + l] = acc_s[l];
      T[base + l] = acc_t[l];
    }
  }
}

void apply_grad_grid(NetworkParams& p, const std::vector<GridWave>& waves, double x0, double dx,
                     const Eigen::VectorXd& e, const Eigen::VectorXd& ex, double riemann_w,
                     double tau, Eigen::VectorXd& S, Eigen::VectorXd& T) {
  grad_grid(waves, x0, dx, e, ex, S, T);
  const int q = p.width_per_scale_q;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(p.total_width()));
  for (int j = 0; j < p.spec.count(); ++j) {
    const double alpha = p.spec.alphas[j];
    const double w = alpha * inv_sqrt_n;  // alpha^d with d=1
    for (int k = 0; k < q; ++k) {
      const int i = j * q + k;
      p.inner_weights(i, 0) -= tau * riemann_w * w * alpha * T[i];
      if (p.has_bias) p.biases[i] -= tau * riemann_w * w * S[i];
    }
  }
}

}  // namespace

NetworkParams init_params(const ScaleSpec& spec, int q, std::uint64_t seed, bool has_bias) {
  validate(spec);
  if (q < 1) throw std::invalid_argument("init_params: q must be >= 1");
  NetworkParams p;
  p.spec = spec;
  p.width_per_scale_q = q;
  p.has_bias = has_bias;
  p.init_seed = seed;
  const int n = spec.count() * q;
  p.inner_weights.resize(n, spec.dim_d);
  p.biases.resize(n);
  NormalSampler normal(seed);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < spec.dim_d; ++j) p.inner_weights(i, j) = normal.next();
  if (has_bias)
    for (int i = 0; i < n; ++i) p.biases[i] = normal.next();
  else
    p.biases.setZero();
  return p;
}

double forward(const NetworkParams& params, const Eigen::VectorXd& x) {
  check_params(params);
  if (x.size() != params.spec.dim_d)
    throw std::invalid_argument("forward: input dimension mismatch");
  const int q = params.width_per_scale_q;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(params.total_width()));
  double total = 0.0;
  for (int j = 0; j < params.spec.count(); ++j) {
    const double alpha = params.spec.alphas[j];
    double block = 0.0;
    for (int k = 0; k < q; ++k) {
      const int i = j * q + k;
      block += fastmath::sin(alpha * params.inner_weights.row(i).dot(x) + params.biases[i]);
    }
    total += ipow(alpha, params.spec.dim_d) * block;
  }
  return inv_sqrt_n * total;
}

Eigen::VectorXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& X) {
  check_params(params);
  return predict_general(params, X);
}

double loss(const NetworkParams& params, const SampleSet& samples, double beta) {
  check_params(params);
  if (samples.X.rows() != samples.y.size() || samples.X.rows() == 0)
    throw std::invalid_argument("loss: malformed sample set");
  const Eigen::VectorXd e = predict_general(params, samples.X) - samples.y;
  return 0.5 * (2.0 * beta / static_cast<double>(samples.y.size())) * e.squaredNorm();
}

NetworkParams grad_step(const NetworkParams& params, const SampleSet& samples, double tau,
                        double beta) {
  check_params(params);
  if (!(tau > 0.0)) throw std::invalid_argument("grad_step: tau must be positive");
  const Eigen::VectorXd e = predict_general(params, samples.X) - samples.y;
  NetworkParams next = params;
  apply_grad_general(next, samples.X, e, 2.0 * beta / static_cast<double>(samples.y.size()),
                     tau);
  return next;
}

SampleSet make_samples(const TargetFn& target, int dim_d, const TrainConfig& config) {
  if (config.num_samples < 2) throw std::invalid_argument("make_samples: need >= 2 samples");
  if (!(config.domain_beta > 0.0))
    throw std::invalid_argument("make_samples: domain_beta must be positive");
  const int n = config.num_samples;
  SampleSet s;
  s.X.resize(n, dim_d);
  s.y.resize(n);
  if (dim_d == 1 && !config.random_samples) {
    const double dx = 2.0 * config.domain_beta / n;
    for (int m = 0; m < n; ++m) s.X(m, 0) = -config.domain_beta + (m + 0.5) * dx;
  } else {
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int m = 0; m < n; ++m)
      for (int j = 0; j < dim_d; ++j) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        s.X(m, j) = (2.0 * u - 1.0) * config.domain_beta;
      }
  }
  for (int m = 0; m < n; ++m) s.y[m] = target(s.X.row(m).transpose());
  return s;
}

TrainResult train(const NetworkParams& init, const TargetFn& target, const TrainConfig& config) {
  check_params(init);
  if (config.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (!(config.learning_rate_tau > 0.0))
    throw std::invalid_argument("train: learning rate must be positive");
  const SampleSet samples = make_samples(target, init.spec.dim_d, config);
  const int n = static_cast<int>(samples.y.size());
  const double riemann_w = 2.0 * config.domain_beta / n;

  std::vector<int> snaps = config.snapshot_epochs;
  snaps.push_back(0);
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

  const bool fast_grid = (init.spec.dim_d == 1) && !config.random_samples;
  const double dx = 2.0 * config.domain_beta / n;
  const double x0 = -config.domain_beta + 0.5 * dx;

  NetworkParams cur = init;
  TrainResult out;
  out.loss_curve.reserve(config.epochs + 1);
  Eigen::VectorXd pred(n), e(n), ex(n);
  Eigen::VectorXd S(cur.total_width()), T(cur.total_width());
  std::vector<double> lane_buf;
  for (int epoch = 0;; ++epoch) {
    std::vector<GridWave> waves;
    if (fast_grid) {
      waves = build_waves(cur);
      predict_grid(waves, x0, dx, pred, lane_buf);
    } else {
      pred = predict_general(cur, samples.X);
    }
    e = pred - samples.y;
    const double l = 0.5 * riemann_w * e.squaredNorm();
    if (!std::isfinite(l))
      throw std::runtime_error("train: loss diverged at epoch " + std::to_string(epoch));
    out.loss_curve.push_back(l);
    if (std::binary_search(snaps.begin(), snaps.end(), epoch))
      out.snapshots.push_back({epoch, l, cur});
    if (epoch == config.epochs) break;
    if (fast_grid) {
      ex = e.cwiseProduct(samples.X.col(0));
      apply_grad_grid(cur, waves, x0, dx, e, ex, riemann_w, config.learning_rate_tau, S, T);
    } else {
      apply_grad_general(cur, samples.X, e, riemann_w, config.learning_rate_tau);
    }
  }
  return out;
}

void save_params(const std::string& path, const NetworkParams& params) {
  check_params(params);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_params: cannot open " + path);
  const char magic[8] = {'M', 'S', 'N', 'E', 'T', 'P', '1', '\0'};
  f.write(magic, 8);
  auto put_i32 = [&](std::int32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&](double v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  put_i32(params.spec.num_scales_s);
  put_i32(params.width_per_scale_q);
  put_i32(params.spec.dim_d);
  put_i32(params.has_bias ? 1 : 0);
  put_u64(params.init_seed);
  for (double a : params.spec.alphas) put_f64(a);
  for (int i = 0; i < params.inner_weights.rows(); ++i)
    for (int j = 0; j < params.inner_weights.cols(); ++j) put_f64(params.inner_weights(i, j));
  for (int i = 0; i < params.biases.size(); ++i) put_f64(params.biases[i]);
  if (!f) throw std::runtime_error("save_params: write failed for " + path);
}

NetworkParams load_params(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_params: cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, "MSNETP1\0", 8) != 0)
    throw std::runtime_error("load_params: bad magic in " + path);
  auto get_i32 = [&] {
    std::int32_t v;
    f.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto get_u64 = [&] {
    std::uint64_t v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto get_f64 = [&] {
    double v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  NetworkParams p;
  p.spec.num_scales_s = get_i32();
  p.width_per_scale_q = get_i32();
  p.spec.dim_d = get_i32();
  p.has_bias = get_i32() != 0;
  p.init_seed = get_u64();
  if (!f || p.spec.num_scales_s < 0 || p.width_per_scale_q < 1 || p.spec.dim_d < 1)
    throw std::runtime_error("load_params: corrupt header in " + path);
  p.spec.alphas.resize(p.spec.num_scales_s + 1);
  for (double& a : p.spec.alphas) a = get_f64();
  const int n = p.total_width();
  p.inner_weights.resize(n, p.spec.dim_d);
  p.biases.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p.spec.dim_d; ++j) p.inner_weights(i, j) = get_f64();
  for (int i = 0; i < n; ++i) p.biases[i] = get_f64();
  if (!f) throw std::runtime_error("load_params: truncated file " + path);
  check_params(p);
  return p;
}

}  // namespace mslab
