#include "mslab/xform.hpp"

#include <cmath>
#include <stdexcept>

#include "mslab/hermite.hpp"

namespace mslab {

namespace {

double sinc(double z) {
  if (std::abs(z) < 1e-8) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

// sin(u beta pi) / (u pi) with the removable singularity at u = 0.
double tone_term(double u, double beta) {
  if (std::abs(u) < 1e-10) {
    const double z = u * beta * M_PI;
    return beta * (1.0 - z * z / 6.0);
  }
  return std::sin(u * beta * M_PI) / (u * M_PI);
}

struct NeuronWave {
  double omega;   // alpha_j * theta_i
  double r1, r2;  // real numerator: cos(u beta) r1 - sin(u beta) u r2
  double i1, i2;  // imag numerator: sin(u beta) i1 - cos(u beta) u i2
  double bias;
  double weight;  // alpha_j / sqrt(N)
};

std::vector<NeuronWave> build_neuron_waves(const NetworkParams& p, double beta) {
  const int n = p.total_width();
  const int q = p.width_per_scale_q;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<NeuronWave> waves(n);
  for (int i = 0; i < n; ++i) {
    const double alpha = p.spec.alphas[i / q];
    NeuronWave& w = waves[i];
    w.omega = alpha * p.inner_weights(i, 0);
    w.bias = p.has_bias ? p.biases[i] : 0.0;
    // Product-to-sum split of the S+C numerator; the whole real part carries
    // a sin(bias) factor, so bias-free neurons stay exactly real-free.
    const double s_om = std::sin(w.omega * beta), c_om = std::cos(w.omega * beta);
    const double s_b = std::sin(w.bias), c_b = std::cos(w.bias);
    w.r1 = 2.0 * s_b * w.omega * s_om;
    w.r2 = 2.0 * s_b * c_om;
    w.i1 = 2.0 * c_b * w.omega * c_om;
    w.i2 = 2.0 * c_b * s_om;
    w.weight = alpha * inv_sqrt_n;
  }
  return waves;
}

// S_{j,k} + C_{j,k} for one neuron at u = 2 pi xi. The generic branch is the
// printed rational form (numerator expanded by product-to-sum); near resonance
// (alpha theta close to +-u) the same quantity goes through the exact sinc
// expression -i beta [e^{i b} sinc((omega-u) beta) - e^{-i b} sinc((omega+u) beta)].
std::complex<double> neuron_hat(const NeuronWave& w, double u, double beta, double cos_ub,
                                double sin_ub) {
  const double den = w.omega * w.omega - u * u;
  const double scale = w.omega * w.omega + u * u;
  if (std::abs(den) < 1e-8 * scale || scale == 0.0) {
    const std::complex<double> eb(std::cos(w.bias), std::sin(w.bias));
    const std::complex<double> val =
        eb * sinc((w.omega - u) * beta) - std::conj(eb) * sinc((w.omega + u) * beta);
    return std::complex<double>(0.0, -beta) * val;
  }
  return std::complex<double>(cos_ub * w.r1 - sin_ub * u * w.r2,
                              sin_ub * w.i1 - cos_ub * u * w.i2) /
         den;
}

}  // namespace

std::complex<double> target_hat(double xi, const TargetSpec& spec) {
  if (!(spec.beta > 0.0)) throw std::invalid_argument("target_hat: beta must be positive");
  const double re = tone_term(spec.b + 2.0 * xi, spec.beta) + tone_term(spec.b - 2.0 * xi, spec.beta);
  const double im = tone_term(spec.a + 2.0 * xi, spec.beta) - tone_term(spec.a - 2.0 * xi, spec.beta);
  return {re, im};
}

std::complex<double> network_hat(double xi, const NetworkParams& params, double beta) {
  if (params.spec.dim_d != 1) throw std::invalid_argument("network_hat: requires d = 1");
  if (!(beta > 0.0)) throw std::invalid_argument("network_hat: beta must be positive");
  const std::vector<NeuronWave> waves = build_neuron_waves(params, beta);
  const double u = 2.0 * M_PI * xi;
  const double cos_ub = std::cos(u * beta), sin_ub = std::sin(u * beta);
  std::complex<double> total(0.0, 0.0);
  for (const NeuronWave& w : waves) total += w.weight * neuron_hat(w, u, beta, cos_ub, sin_ub);
  return total;
}

FrequencyProfile error_hat(const std::vector<double>& xi_grid, const NetworkParams& params,
                           const TargetSpec& target) {
  if (params.spec.dim_d != 1) throw std::invalid_argument("error_hat: requires d = 1");
  if (!(target.beta > 0.0)) throw std::invalid_argument("error_hat: beta must be positive");
  const std::vector<NeuronWave> waves = build_neuron_waves(params, target.beta);
  FrequencyProfile profile;
  profile.xi_grid = xi_grid;
  profile.real_part.resize(static_cast<Eigen::Index>(xi_grid.size()));
  profile.imag_part.resize(static_cast<Eigen::Index>(xi_grid.size()));
  for (std::size_t g = 0; g < xi_grid.size(); ++g) {
    const double u = 2.0 * M_PI * xi_grid[g];
    const double cos_ub = std::cos(u * target.beta), sin_ub = std::sin(u * target.beta);
    std::complex<double> net(0.0, 0.0);
    for (const NeuronWave& w : waves)
      net += w.weight * neuron_hat(w, u, target.beta, cos_ub, sin_ub);
    const std::complex<double> err = net - target_hat(xi_grid[g], target);
    profile.real_part[static_cast<Eigen::Index>(g)] = err.real();
    profile.imag_part[static_cast<Eigen::Index>(g)] = err.imag();
  }
  return profile;
}

std::vector<std::complex<double>> hermite_to_physical(const SpectralState& state,
                                                      const HermiteBasis& basis,
                                                      const std::vector<double>& x_grid) {
  const int p = basis.order_p;
  if (state.U_plus.size() != p + 1 || state.U_minus.size() != p + 1)
    throw std::invalid_argument("hermite_to_physical: state size does not match basis");
  static const std::complex<double> kIPow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  const double pref = std::sqrt(2.0 * M_PI) / basis.lambda;
  std::vector<std::complex<double>> out(x_grid.size());
  for (std::size_t m = 0; m < x_grid.size(); ++m) {
    const Eigen::VectorXd h = eval_hermite_functions(2.0 * M_PI * x_grid[m] / basis.lambda, p);
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k <= p; ++k)
      acc += std::complex<double>(state.U_plus[k], state.U_minus[k]) * kIPow[k & 3] * h[k];
    out[m] = pref * acc;
  }
  return out;
}

namespace {

using Fn = std::function<std::complex<double>(double)>;

std::complex<double> phased(const Fn& g, double u, double x) {
  return g(x) * std::complex<double>(std::cos(u * x), -std::sin(u * x));
}

std::complex<double> simpson(double a, double b, const std::complex<double>& fa,
                             const std::complex<double>& fm, const std::complex<double>& fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

std::complex<double> adapt(const Fn& g, double u, double a, double b,
                           const std::complex<double>& fa, const std::complex<double>& fm,
                           const std::complex<double>& fb, const std::complex<double>& whole,
                           double tol, int depth) {
  if (depth <= 0)
    throw std::runtime_error("fourier_quadrature_oracle: refinement limit reached");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const std::complex<double> flm = phased(g, u, lm), frm = phased(g, u, rm);
  const std::complex<double> left = simpson(a, m, fa, flm, fm);
  const std::complex<double> right = simpson(m, b, fm, frm, fb);
  const std::complex<double> s2 = left + right;
  if (std::abs(s2 - whole) <= 15.0 * tol) return s2 + (s2 - whole) / 15.0;
  return adapt(g, u, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(g, u, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

std::complex<double> fourier_quadrature_oracle(const Fn& g, double lo, double hi, double xi,
                                               double tol) {
  if (!(hi > lo)) throw std::invalid_argument("fourier_quadrature_oracle: empty interval");
  if (!(tol > 0.0)) throw std::invalid_argument("fourier_quadrature_oracle: tol must be positive");
  const double u = 2.0 * M_PI * xi;
  // Odd panel count with width tied to the oscillation rate so a panel never
  // straddles a full period at the first refinement level.
  const int panels = std::max(13, static_cast<int>(std::ceil((hi - lo) * (1.0 + std::abs(xi)))));
  const double w = (hi - lo) / panels;
  std::complex<double> total(0.0, 0.0);
  for (int k = 0; k < panels; ++k) {
    const double a = lo + k * w, b = (k + 1 == panels) ? hi : a + w;
    const double m = 0.5 * (a + b);
    const std::complex<double> fa = phased(g, u, a), fm = phased(g, u, m), fb = phased(g, u, b);
    total += adapt(g, u, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol / panels, 48);
  }
  return total;
}

}  // namespace mslab
