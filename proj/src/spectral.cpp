#include "mslab/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace mslab {

namespace {
// Builds K from C using H_hat'_n = sqrt(n/2) H_hat_{n-1} - sqrt((n+1)/2) H_hat_{n+1};
// C must extend one index past K (order p+1 for K of order p). Fills the lower
// triangle and mirrors so K is exactly symmetric.
Eigen::MatrixXd stiffness_from_c(const Eigen::MatrixXd& C) {
  const int p = static_cast<int>(C.rows()) - 2;
  Eigen::MatrixXd K(p + 1, p + 1);
  for (int n = 0; n <= p; ++n) {
    const double an = std::sqrt(0.5 * n), bn = std::sqrt(0.5 * (n + 1));
    for (int k = 0; k <= n; ++k) {
      const double ak = std::sqrt(0.5 * k), bk = std::sqrt(0.5 * (k + 1));
      double v = bn * bk * C(n + 1, k + 1);
      if (n > 0 && k > 0) v += an * ak * C(n - 1, k - 1);
      if (n > 0) v -= an * bk * C(n - 1, k + 1);
      if (k > 0) v -= bn * ak * C(n + 1, k - 1);
      K(n, k) = v;
      K(k, n) = v;
    }
  }
  return K;
}
}  // namespace

ScaleSpec ScaleSpec::dyadic(int s, int d) {
  ScaleSpec spec;
  spec.num_scales_s = s;
  spec.dim_d = d;
  spec.alphas.resize(s + 1);
  double a = 1.0;
  for (int j = 0; j <= s; ++j, a *= 2.0) spec.alphas[j] = a;
  validate(spec);
  return spec;
}

void validate(const ScaleSpec& spec) {
  if (spec.num_scales_s < 0) throw std::invalid_argument("ScaleSpec: s must be >= 0");
  if (static_cast<int>(spec.alphas.size()) != spec.num_scales_s + 1)
    throw std::invalid_argument("ScaleSpec: alphas must have length s+1");
  for (double a : spec.alphas)
    if (!(a >= 1.0) || !std::isfinite(a))
      throw std::invalid_argument("ScaleSpec: every alpha must be >= 1");
  if (spec.dim_d < 1) throw std::invalid_argument("ScaleSpec: dim_d must be >= 1");
}

double gaussian_hat(double xi_norm, double alpha, int d) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian_hat: alpha must be positive");
  if (!std::isfinite(xi_norm)) throw std::invalid_argument("gaussian_hat: non-finite xi");
  return std::pow(2.0 * M_PI, 0.5 * d) * std::pow(alpha, -d) *
         std::exp(-2.0 * M_PI * M_PI * xi_norm * xi_norm / (alpha * alpha));
}

double coeff_A(double xi, int sign_pm, const ScaleSpec& spec) {
  validate(spec);
  const int d = spec.dim_d;
  double sum = 0.0;
  for (double a : spec.alphas) sum += std::pow(a, 2 * (d + 1)) * gaussian_hat(xi, a, d);
  return (1.0 + sign_pm * std::exp(-2.0)) / (8.0 * M_PI * M_PI * spec.count()) * sum;
}

double coeff_B(double xi, int sign_pm, const ScaleSpec& spec) {
  validate(spec);
  const int d = spec.dim_d;
  double sum = 0.0;
  for (double a : spec.alphas) sum += std::pow(a, 2 * d) * gaussian_hat(xi, a, d);
  return (1.0 + sign_pm * std::exp(-2.0)) / (2.0 * spec.count()) * sum;
}

SpectralOperator assemble_operator(const HermiteBasis& basis, const ScaleSpec& spec) {
  validate(spec);
  if (spec.dim_d != 1)
    throw std::invalid_argument("assemble_operator: the spectral solver is d=1 only");
  const int p = basis.order_p;
  const double lam = basis.lambda;
  const int s1 = spec.count();

  // C and M reduce to per-scale weighted inner products at tau_j = 2 pi^2 / (alpha_j lambda)^2;
  // C extends to order p+1 because K consumes one extra index.
  Eigen::MatrixXd sum_c = Eigen::MatrixXd::Zero(p + 2, p + 2);
  Eigen::MatrixXd sum_m = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (double a : spec.alphas) {
    const double tau = 2.0 * M_PI * M_PI / (a * a * lam * lam);
    Eigen::MatrixXd I = weighted_inner_products(tau, p + 1);
    sum_c += (a * a * a) * I;
    sum_m += a * I.topLeftCorner(p + 1, p + 1);
  }
  const double c_pref = lam / (2.0 * std::pow(2.0 * M_PI, 1.5) * s1);
  const double m_pref = std::sqrt(0.5 * M_PI) / (s1 * lam);
  const Eigen::MatrixXd c_base = -c_pref * sum_c;   // C^+- = (1 +- e^{-2}) * c_base
  const Eigen::MatrixXd k_base = stiffness_from_c(c_base);
  const Eigen::MatrixXd m_base = -m_pref * sum_m;

  const double em2 = std::exp(-2.0);
  SpectralOperator op{basis, spec, Eigen::VectorXd::Constant(p + 1, 1.0 / lam),
                      (1.0 + em2) * k_base, (1.0 - em2) * k_base,
                      (1.0 + em2) * m_base, (1.0 - em2) * m_base};
  return op;
}

SpectralState project_initial(const HermiteBasis& basis,
                              const std::function<std::complex<double>(double)>& f_hat,
                              bool* tail_warning) {
  const int p = basis.order_p;
  QuadratureRule rule = gauss_hermite_rule(4 * (p + 1));
  SpectralState st;
  st.U_plus = Eigen::VectorXd::Zero(p + 1);
  st.U_minus = Eigen::VectorXd::Zero(p + 1);
  st.time_t = 0.0;
  // U_k = lambda <f_hat, H_hat_k(lambda .)> = integral f_hat(x/lambda) H_hat_k(x) dx
  for (int i = 0; i < rule.count; ++i) {
    const double x = rule.nodes[i];
    const std::complex<double> fv = f_hat(x / basis.lambda);
    const Eigen::VectorXd h = eval_hermite_functions(x, p);
    st.U_plus.noalias() += (rule.weights_nogauss[i] * fv.real()) * h;
    st.U_minus.noalias() += (rule.weights_nogauss[i] * fv.imag()) * h;
  }
  if (tail_warning != nullptr) {
    const int tail = std::max(2, (p + 1) / 8);
    const double total = st.U_plus.squaredNorm() + st.U_minus.squaredNorm();
    const double tail_norm =
        st.U_plus.tail(tail).squaredNorm() + st.U_minus.tail(tail).squaredNorm();
    *tail_warning = total > 0.0 && tail_norm > 0.01 * total;
  }
  return st;
}

BackwardEulerStepper::BackwardEulerStepper(const SpectralOperator& op, double dt)
    : dt_(dt), D_(op.D) {
  if (!(dt > 0.0)) throw std::invalid_argument("BackwardEulerStepper: dt must be positive");
  Eigen::MatrixXd sys_plus = -dt * (op.K_minus + op.M_plus);
  sys_plus.diagonal() += op.D;
  Eigen::MatrixXd sys_minus = -dt * (op.K_plus + op.M_minus);
  sys_minus.diagonal() += op.D;
  plus_solver_.compute(sys_plus);
  minus_solver_.compute(sys_minus);
  if (plus_solver_.info() != Eigen::Success || minus_solver_.info() != Eigen::Success)
    throw std::runtime_error("BackwardEulerStepper: system matrix is not SPD");
}

SpectralState BackwardEulerStepper::step(const SpectralState& state) const {
  if (state.U_plus.size() != D_.size() || state.U_minus.size() != D_.size())
    throw std::invalid_argument("BackwardEulerStepper: state length does not match operator");
  SpectralState next;
  next.U_plus = plus_solver_.solve(D_.cwiseProduct(state.U_plus));
  next.U_minus = minus_solver_.solve(D_.cwiseProduct(state.U_minus));
  next.time_t = state.time_t + dt_;
  return next;
}

SpectralState step_backward_euler(const SpectralOperator& op, const SpectralState& state,
                                  double dt) {
  return BackwardEulerStepper(op, dt).step(state);
}

FrequencyProfile evaluate_spectral(const SpectralState& state, const HermiteBasis& basis,
                                   const std::vector<double>& xi_grid) {
  const int n = static_cast<int>(xi_grid.size());
  FrequencyProfile prof;
  prof.xi_grid = xi_grid;
  prof.real_part.resize(n);
  prof.imag_part.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd h = eval_hermite_functions(basis.lambda * xi_grid[i], basis.order_p);
    prof.real_part[i] = h.dot(state.U_plus);
    prof.imag_part[i] = h.dot(state.U_minus);
  }
  return prof;
}

double energy(const SpectralState& state, const HermiteBasis& basis) {
  return (state.U_plus.squaredNorm() + state.U_minus.squaredNorm()) / basis.lambda;
}

}  // namespace mslab
