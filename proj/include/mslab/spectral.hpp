#pragma once

#include <complex>
#include <functional>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "mslab/hermite.hpp"
#include "mslab/profile.hpp"
#include "mslab/scales.hpp"

namespace mslab {

/// Galerkin matrices of the frequency-domain error-diffusion model in the
/// scaled Hermite basis. K and M carry the leading minus signs of their
/// definitions, so all four are negative semidefinite and the backward-Euler
/// system D - dt(K+M) is symmetric positive definite.
struct SpectralOperator {
  HermiteBasis basis;
  ScaleSpec spec;
  Eigen::VectorXd D;  // diagonal of D, every entry 1/lambda
  Eigen::MatrixXd K_plus, K_minus;
  Eigen::MatrixXd M_plus, M_minus;
};

/// Spectral coefficients of the error transform at one time: U_plus carries
/// the real part of eta_hat, U_minus the imaginary part.
struct SpectralState {
  Eigen::VectorXd U_plus;
  Eigen::VectorXd U_minus;
  double time_t = 0.0;
};

/// Fourier transform of the scaled Gaussian: (2 pi)^{d/2} alpha^{-d}
/// exp(-2 pi^2 |xi|^2 / alpha^2). Takes |xi| (only the norm enters).
double gaussian_hat(double xi_norm, double alpha, int d);

/// Diffusion coefficients of the model; sign_pm is +1 or -1 and selects the
/// (1 +- e^{-2}) factor.
double coeff_A(double xi, int sign_pm, const ScaleSpec& spec);
double coeff_B(double xi, int sign_pm, const ScaleSpec& spec);

/// Assembles D, K^+-, M^+- for the d=1 solver via the connection-coefficient
/// reduction of the weighted inner products.
SpectralOperator assemble_operator(const HermiteBasis& basis, const ScaleSpec& spec);

/// L^2 projection of f_hat onto the basis via the 4(p+1)-node Gaussian-weight
/// transform; time is set to 0. When tail_warning is non-null it is set to
/// true if the trailing eighth of the coefficients holds more than 10% of the
/// total norm (under-resolved data).
SpectralState project_initial(const HermiteBasis& basis,
                              const std::function<std::complex<double>(double)>& f_hat,
                              bool* tail_warning = nullptr);

/// Backward-Euler stepping with the system matrices factorized once.
/// The real part pairs with A^- and B^+ (so K^- and M^+); the imaginary part
/// with K^+ and M^-.
class BackwardEulerStepper {
 public:
  BackwardEulerStepper(const SpectralOperator& op, double dt);
  SpectralState step(const SpectralState& state) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  Eigen::VectorXd D_;
  Eigen::LLT<Eigen::MatrixXd> plus_solver_;   // D - dt (K^- + M^+)
  Eigen::LLT<Eigen::MatrixXd> minus_solver_;  // D - dt (K^+ + M^-)
};

/// One-off step; production loops construct a BackwardEulerStepper instead.
SpectralState step_backward_euler(const SpectralOperator& op, const SpectralState& state,
                                  double dt);

/// Pointwise synthesis sum_k U_k H_hat_k(lambda xi) on the grid.
FrequencyProfile evaluate_spectral(const SpectralState& state, const HermiteBasis& basis,
                                   const std::vector<double>& xi_grid);

/// Discrete energy (1/lambda)(|U^+|^2 + |U^-|^2) = integral of |eta_hat|^2.
double energy(const SpectralState& state, const HermiteBasis& basis);

}  // namespace mslab
