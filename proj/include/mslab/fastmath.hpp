#pragma once

#include <cmath>
#include <cstdint>

namespace mslab::fastmath {

// Branchless sin/cos pair: Cody-Waite reduction by pi/2 (two-part constant)
// and the fdlibm kernel polynomials, accurate to a few ulp for |x| up to
// ~1e5, which covers every phase this project produces. The reduction runs on
// |x| with the sign reapplied at the end, so sin is exactly odd and cos
// exactly even, structural symmetries the network tests rely on.
inline void sincos(double x, double& s_out, double& c_out) {
  const double ax = std::fabs(x);
  const double n = std::nearbyint(ax * 0.636619772367581343);  // 2/pi
  const double r = (ax - n * 1.57079632673412561417e+00) - n * 6.07710050650619224932e-11;
  const auto q = static_cast<std::int64_t>(n) & 3;

  const double z = r * r;
  const double ks =
      r + (z * r) * (-1.66666666666666324348e-01 +
                     z * (8.33333333332248946124e-03 +
                          z * (-1.98412698298579493134e-04 +
                               z * (2.75573137070700676789e-06 +
                                    z * (-2.50507602534068634195e-08 +
                                         z * 1.58969099521155010221e-10)))));
  const double hz = 0.5 * z;
  const double w = 1.0 - hz;
  const double kc =
      w + (((1.0 - w) - hz) +
           z * z * (4.16666666666666019037e-02 +
                    z * (-1.38888888888741095749e-03 +
                         z * (2.48015872894767294178e-05 +
                              z * (-2.75573143513906633035e-07 +
                                   z * (2.08757232129817482790e-09 +
                                        z * -1.13596475577881948265e-11))))));

  // quadrant map: sin -> {ks, kc, -ks, -kc}[q], cos -> {kc, -ks, -kc, ks}[q]
  const bool swap = (q & 1) != 0;
  double s = swap ? kc : ks;
  double c = swap ? ks : kc;
  if ((q & 2) != 0) s = -s;
  if (((q + 1) & 2) != 0) c = -c;
  s_out = std::signbit(x) ? -s : s;
  c_out = c;
}

inline double sin(double x) {
  double s, c;
  sincos(x, s, c);
  return s;
}

inline double cos(double x) {
  double s, c;
  sincos(x, s, c);
  return c;
}

}  // namespace mslab::fastmath
