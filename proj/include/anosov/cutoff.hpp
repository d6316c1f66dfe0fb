// Smooth cutoff profiles: the Littlewood-Paley mother cutoff psi, dyadic band
// functions phi_j, and window/bump builders used for chart partitions and
// test fields. All profiles are closed-form piecewise polynomials (or the
// classical exp bump), so every symbol value is reproducible bit for bit.
#pragma once

#include <cmath>
#include <stdexcept>

#include "anosov/core.hpp"

namespace anosov {

// Integral of the normalized kernel (315/256)(1-t^2)^4 from -1 to u.
inline double poly_kernel_cdf(double u) {
  if (u <= -1) return 0;
  if (u >= 1) return 1;
  double u2 = u * u;
  double p = u * (1 + u2 * (-4.0 / 3 + u2 * (6.0 / 5 + u2 * (-4.0 / 7 + u2 / 9))));
  return 0.5 + (315.0 / 256.0) * p;
}

// C^4 mollified step: 1 for r <= lo, 0 for r >= hi.
struct SmoothStep {
  double lo = 1.5, hi = 2.0;
  double operator()(double r) const {
    if (r <= lo) return 1;
    if (r >= hi) return 0;
    double u = (2 * r - (lo + hi)) / (hi - lo);
    return 1.0 - poly_kernel_cdf(u);
  }
};

// C-infinity step (exp kernel), used where spectral decay of test data
// matters more than polynomial reproducibility.
inline double smooth_step_cinf(double u) {
  // 0 at u<=0, 1 at u>=1
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  double f0 = std::exp(-1.0 / u), f1 = std::exp(-1.0 / (1.0 - u));
  return f0 / (f0 + f1);
}

inline double smooth_step_cinf_deriv(double u) {
  if (u <= 0 || u >= 1) return 0;
  double f0 = std::exp(-1.0 / u), f1 = std::exp(-1.0 / (1.0 - u));
  double d0 = f0 / (u * u), d1 = -f1 / ((1.0 - u) * (1.0 - u));
  double s = f0 + f1;
  return (d0 * f1 - f0 * d1) / (s * s);
}

// Analytic bump on [0,1]: sin(pi s)^m. Closed-form derivative; all
// derivatives bounded, so high-order quadratures see their full order.
struct SinePowerBump {
  int m = 8;
  double operator()(double s) const {
    if (s <= 0 || s >= 1) return 0;
    return std::pow(std::sin(kPi * s), m);
  }
  double deriv(double s) const {
    if (s <= 0 || s >= 1) return 0;
    return m * kPi * std::pow(std::sin(kPi * s), m - 1) * std::cos(kPi * s);
  }
};

// The Littlewood-Paley mother cutoff. psi == 1 on [-plateau_end, plateau_end]
// (plateau_end >= 1 so the classical normalization psi == 1 on [-1,1] holds),
// psi == 0 outside [-support_end, support_end].
struct CutoffSpec {
  double plateau_end = 1.5;
  double support_end = 2.0;

  void validate() const {
    if (!(plateau_end >= 1.0) || !(support_end > plateau_end))
      throw ConfigError("CutoffSpec: need 1 <= plateau_end < support_end");
  }
  double psi(double r) const {
    return SmoothStep{plateau_end, support_end}(std::abs(r));
  }
  // Dyadic bands: phi_0 = psi(|xi|), phi_j = psi(2^-j |xi|) - psi(2^-j+1 |xi|).
  double phi(int j, double xi_norm) const {
    if (j == 0) return psi(xi_norm);
    double s = std::ldexp(xi_norm, -j);  // 2^-j |xi|
    return psi(s) - psi(2 * s);
  }
};

// Smooth window equal to 1 on [lo1, hi1], supported in (lo0, hi0).
struct SmoothWindow {
  double lo0, lo1, hi1, hi0;
  bool cinf = false;
  double operator()(double s) const {
    if (s <= lo0 || s >= hi0) return 0;
    double up = 1, down = 1;
    if (s < lo1) {
      double u = (s - lo0) / (lo1 - lo0);
      up = cinf ? smooth_step_cinf(u) : poly_kernel_cdf(2 * u - 1);
    }
    if (s > hi1) {
      double u = (s - hi1) / (hi0 - hi1);
      down = cinf ? smooth_step_cinf(1 - u) : poly_kernel_cdf(1 - 2 * u);
    }
    return up * down;
  }
  // derivative (closed form through the kernels)
  double deriv(double s) const {
    if (s <= lo0 || s >= hi0) return 0;
    auto kval = [&](double u) {
      double t = 1 - u * u;
      return (u <= -1 || u >= 1) ? 0.0 : (315.0 / 256.0) * t * t * t * t;
    };
    if (s < lo1 && s > lo0) {
      double w = lo1 - lo0, u = (s - lo0) / w;
      return cinf ? smooth_step_cinf_deriv(u) / w : kval(2 * u - 1) * 2 / w;
    }
    if (s > hi1 && s < hi0) {
      double w = hi0 - hi1, u = (s - hi1) / w;
      return cinf ? -smooth_step_cinf_deriv(1 - u) / w
                  : -kval(1 - 2 * u) * 2 / w;
    }
    return 0;
  }
};

}  // namespace anosov
