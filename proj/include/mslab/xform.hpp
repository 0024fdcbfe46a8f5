#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "mslab/net.hpp"
#include "mslab/profile.hpp"
#include "mslab/spectral.hpp"

namespace mslab {

// Two-tone fitting target f(x) = sin(a pi x) + cos(b pi x) on [-beta, beta],
// extended by zero outside the interval.
struct TargetSpec {
  double a = 4.2;
  double b = 5.8;
  double beta = 1.0;
};

// Fourier transform (convention: integral of f e^{-2 pi i xi x} dx) of the
// zero-extended target.
std::complex<double> target_hat(double xi, const TargetSpec& spec);

// Fourier transform of the zero-extended network on [-beta, beta]. Only d = 1.
std::complex<double> network_hat(double xi, const NetworkParams& params, double beta);

// eta_hat = N_hat - f_hat sampled on a grid, split into real and imaginary
// parts. Shares one per-neuron precompute across the whole grid.
FrequencyProfile error_hat(const std::vector<double>& xi_grid, const NetworkParams& params,
                           const TargetSpec& target);

// Inverse transform of a Hermite synthesis eta_hat(xi) = sum_k (U+_k + i U-_k)
// Hhat_k(lambda xi): eta(x) = (sqrt(2 pi)/lambda) sum_k coeff_k i^k
// Hhat_k(2 pi x / lambda).
std::vector<std::complex<double>> hermite_to_physical(const SpectralState& state,
                                                      const HermiteBasis& basis,
                                                      const std::vector<double>& x_grid);

// Adaptive panel quadrature of integral_lo^hi g(x) e^{-2 pi i xi x} dx to an
// absolute target of `tol`. Throws std::runtime_error if the refinement limit
// is reached before the target.
std::complex<double> fourier_quadrature_oracle(const std::function<std::complex<double>(double)>& g,
                                               double lo, double hi, double xi,
                                               double tol = 1e-10);

}  // namespace mslab
