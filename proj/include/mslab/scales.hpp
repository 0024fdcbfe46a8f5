#pragma once

#include <vector>

namespace mslab {

/// Scale family of the multi-scale architecture: s+1 input scalings
/// alpha_0..alpha_s applied to parallel subnetworks of an input of
/// dimension dim_d.
struct ScaleSpec {
  int num_scales_s = 0;         // paper's s; the family has s+1 scales
  std::vector<double> alphas;   // length s+1, all >= 1
  int dim_d = 1;

  int count() const { return num_scales_s + 1; }

  /// alpha_j = 2^j, the default dyadic family.
  static ScaleSpec dyadic(int s, int d = 1);
};

/// Throws std::invalid_argument when the alpha list does not match s, any
/// alpha is < 1, or dim_d < 1.
void validate(const ScaleSpec& spec);

}  // namespace mslab
