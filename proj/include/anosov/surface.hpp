// Hyperbolic geometry on the upper half-plane for the Bolza surface:
// distances, axes of hyperbolic matrices, folding into the Dirichlet domain,
// equivariant conformal factors, and the discrete length minimizer for
// perturbed metrics e^{2 sigma} g_0.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "anosov/core.hpp"
#include "anosov/cutoff.hpp"
#include "anosov/orbits.hpp"
#include "anosov/systems.hpp"

namespace anosov {

using hpt = std::complex<double>;  // point in the upper half-plane

inline hpt mobius(const Mat2& m, hpt z) {
  return (m.a * z + m.b) / (m.c * z + m.d);
}

inline double hyp_dist(hpt z, hpt w) {
  double q = std::norm(z - w) / (2.0 * z.imag() * w.imag());
  return std::acosh(1.0 + q);
}

// Axis data of a hyperbolic matrix: Mobius map sending the axis to the
// imaginary axis (attracting fixed point to infinity), so points on the axis
// are M^{-1}(i e^tau), and gamma translates tau by its length.
struct AxisFrame {
  Mat2 to_standard;    // M with M(axis) = imaginary axis
  Mat2 from_standard;  // M^{-1}
  double length = 0;   // translation length of gamma along the axis

  hpt point(double tau) const {
    return mobius(from_standard, hpt(0.0, std::exp(tau)));
  }
};

inline AxisFrame axis_of(const Mat2& g) {
  double tr = g.trace();
  if (std::abs(tr) <= 2.0 + 1e-12)
    throw ConfigError("axis_of: matrix not hyperbolic");
  AxisFrame ax;
  ax.length = 2.0 * std::acosh(std::abs(tr) / 2.0);
  // fixed points on the boundary: c t^2 + (d - a) t - b = 0
  double p, q;
  if (std::abs(g.c) > 1e-14) {
    double disc = std::sqrt((g.d - g.a) * (g.d - g.a) + 4.0 * g.b * g.c);
    double t1 = (g.a - g.d + disc) / (2.0 * g.c);
    double t2 = (g.a - g.d - disc) / (2.0 * g.c);
    // identify the attracting fixed point (larger |derivative| is repelling;
    // derivative at fixed point t is 1/(c t + d)^2)
    double d1 = 1.0 / std::pow(g.c * t1 + g.d, 2);
    if (std::abs(d1) > 1.0) {
      p = t1;  // repelling
      q = t2;  // attracting
    } else {
      p = t2;
      q = t1;
    }
  } else {
    throw ConfigError("axis_of: vertical axis not supported (c == 0)");
  }
  // M sends p -> 0, q -> infinity: M = [[1, -p], [1, -q]] normalized
  double det = -q + p;  // det [[1,-p],[1,-q]] = -q + p
  double s = 1.0 / std::sqrt(std::abs(det));
  Mat2 M{s, -p * s, s, -q * s};
  if (det < 0) M = Mat2{s, -p * s, -s, q * s};  // keep det = +1
  ax.to_standard = M;
  ax.from_standard = M.inverse();
  return ax;
}

// ---------------------------------------------------------------------------
// Folding into the Dirichlet domain of the Bolza group centered at i, via a
// fixed generator-lookup: apply whichever generator strictly reduces the
// distance to the center, until none does.
// ---------------------------------------------------------------------------

struct FoldResult {
  hpt z;
  int steps = 0;
};

inline FoldResult fold_to_domain(const FuchsianGroup& g, hpt z,
                                 int max_steps = 512) {
  const hpt center(0.0, 1.0);
  FoldResult r{z, 0};
  for (int it = 0; it < max_steps; ++it) {
    double d0 = hyp_dist(r.z, center);
    int best = -1;
    double bestd = d0 - 1e-13;
    for (int k = 0; k < 8; ++k) {
      hpt w = mobius(g.gen(k), r.z);
      double d = hyp_dist(w, center);
      if (d < bestd) {
        bestd = d;
        best = k;
      }
    }
    if (best < 0) return r;
    r.z = mobius(g.gen(best), r.z);
    ++r.steps;
  }
  throw ConfigError("fold_to_domain: did not stabilize");
}

// ---------------------------------------------------------------------------
// Equivariant conformal factor sigma: a finite sum of geodesic-ball bumps
// placed on the orbit points reachable from the Dirichlet domain. Values are
// computed on the folded representative, so equivariance is structural.
// ---------------------------------------------------------------------------

struct ConformalBump {
  hpt center{0.0, 1.0};
  double radius = 0.8;      // support radius (must stay below the injectivity radius)
  double amplitude = 1.0;
  bool constant = false;    // sigma == amplitude everywhere (scaling control)
};

class ConformalFactor {
 public:
  ConformalFactor(const FuchsianGroup& g, ConformalBump bump)
      : group_(g), bump_(bump) {
    if (bump_.constant) return;
    if (bump_.radius > 1.2)
      throw ConfigError("ConformalFactor: bump radius exceeds the safe "
                        "injectivity bound");
    // orbit points of the center relevant near the Dirichlet domain
    std::vector<Mat2> words{Mat2::identity()};
    std::vector<Mat2> frontier{Mat2::identity()};
    for (int len = 1; len <= 3; ++len) {
      std::vector<Mat2> next;
      for (const auto& w : frontier)
        for (int k = 0; k < 8; ++k) next.push_back(w.mul(group_.gen(k)));
      for (const auto& w : next) words.push_back(w);
      frontier = std::move(next);
    }
    const hpt c0(0.0, 1.0);
    for (const auto& w : words) {
      hpt p = mobius(w, bump_.center);
      if (hyp_dist(p, c0) > 3.5 + bump_.radius) continue;
      bool dup = false;
      for (const auto& q : centers_)
        if (std::abs(p - q) < 1e-9) dup = true;
      if (!dup) centers_.push_back(p);
    }
  }

  double eval(hpt z) const {
    if (bump_.constant) return bump_.amplitude;
    hpt zf = fold_to_domain(group_, z).z;
    double s = 0;
    for (const auto& p : centers_) {
      double d = hyp_dist(zf, p);
      if (d < bump_.radius)
        s += bump_.amplitude * profile(d / bump_.radius);
    }
    return s;
  }

  double equivariance_residual(Rng& rng, int samples = 32) const {
    double worst = 0;
    for (int t = 0; t < samples; ++t) {
      hpt z(rng.uniform(-0.8, 0.8), std::exp(rng.uniform(-0.8, 0.8)));
      double v = eval(z);
      for (int k = 0; k < 8; ++k)
        worst = std::max(worst,
                         std::abs(eval(mobius(group_.gen(k), z)) - v));
    }
    return worst;
  }

 private:
  static double profile(double t) {
    // smooth bump: 1 at 0, 0 at 1 (mollified step on [0.2, 1])
    return SmoothStep{0.2, 1.0}(t);
  }
  const FuchsianGroup& group_;
  ConformalBump bump_;
  std::vector<hpt> centers_;
};

// ---------------------------------------------------------------------------
// Discrete perturbed length: closed polyline in the homotopy class of gamma,
// segment lengths e^{sigma(midpoint)} d_hyp(z_k, z_{k+1}), closure z_N =
// gamma z_0. Each vertex is constrained to a fixed geodesic fence normal to
// the gamma-axis (one transverse coordinate per vertex), which removes the
// flat reparameterization directions: the unperturbed minimizer is exactly
// the axis polyline and the transverse Hessian is positive definite.
// Minimized by Barzilai-Borwein descent with an Armijo fallback.
// ---------------------------------------------------------------------------

struct CurveDiscretization {
  int n_points = 256;
  // gradient sup-norm target; near the nondegenerate minimum the length
  // error is quadratic in this, so 1e-6 already gives ~1e-12 lengths
  double tol = 1e-6;
  int max_iters = 20000;
  double eps = 1.0;         // scaling of sigma (the metric is e^{2 eps sigma})
};

struct CurveResult {
  double length = 0;
  double grad_norm = 0;
  int iterations = 0;
  std::vector<hpt> points;
  double linear_term = 0;  // the first-order quadrature sum sigma(m_k) l_k
};

namespace detail {

struct CurveProblem {
  const Mat2 gamma;
  const Mat2 from_standard;  // axis frame: axis = imaginary axis upstairs
  const ConformalFactor* sigma;
  double eps;
  int N;
  double period;  // translation length of gamma

  // vertex k at transverse angle w on the fence through i e^{tau_k}: in the
  // standardized frame the fence is the half-circle of radius e^{tau_k},
  // z = e^{tau_k} (sin w + i cos w)
  hpt point(const std::vector<double>& v, int k) const {
    double tau = period * double(k) / N;
    double w = v[size_t(k)];
    hpt zs = std::exp(tau) * hpt(std::sin(w), std::cos(w));
    return mobius(from_standard, zs);
  }

  static hpt midpoint(hpt a, hpt b) {
    return hpt(0.5 * (a.real() + b.real()),
               std::sqrt(a.imag() * b.imag()));
  }

  double seg_factor(hpt a, hpt b) const {
    if (!sigma || eps == 0) return 1.0;
    return std::exp(eps * sigma->eval(midpoint(a, b)));
  }

  // energy of segment k (endpoints z_k and z_{k+1}, closed up by gamma)
  double seg_energy(const std::vector<double>& v, int k) const {
    hpt a = point(v, k);
    hpt b = (k + 1 < N) ? point(v, k + 1) : mobius(gamma, point(v, 0));
    return seg_factor(a, b) * hyp_dist(a, b);
  }

  double value(const std::vector<double>& v) const {
    double L = 0;
    for (int k = 0; k < N; ++k) L += seg_energy(v, k);
    return L;
  }

  // numerical gradient exploiting locality: variable k only enters segments
  // k-1 and k (for k = 0 through the gamma closure of segment N-1). Central
  // differences at 1e-5 balance truncation against roundoff at ~1e-10.
  void gradient(const std::vector<double>& v, std::vector<double>& g) const {
    const double h = 1e-5;
    std::vector<double> w = v;
    for (int k = 0; k < N; ++k) {
      int sa = (k + N - 1) % N, sb = k;
      size_t i = size_t(k);
      w[i] = v[i] + h;
      double fp = seg_energy(w, sa) + seg_energy(w, sb);
      w[i] = v[i] - h;
      double fm = seg_energy(w, sa) + seg_energy(w, sb);
      w[i] = v[i];
      g[i] = (fp - fm) / (2 * h);
    }
  }
};

}  // namespace detail

inline CurveResult perturbed_geodesic_length(const FuchsianGroup& group,
                                             const std::vector<int>& word,
                                             const ConformalFactor* sigma,
                                             CurveDiscretization disc) {
  if (disc.n_points < 64)
    throw ConfigError("perturbed_geodesic_length: n_points >= 64");
  Mat2 gamma = word_matrix(group, cyclic_reduce(word));
  AxisFrame ax = axis_of(gamma);
  int N = disc.n_points;
  detail::CurveProblem prob{gamma, ax.from_standard, sigma, disc.eps, N,
                            ax.length};
  // init: the axis polyline (all transverse coordinates zero)
  std::vector<double> v(size_t(N), 0.0);
  std::vector<double> g(v.size()), gprev(v.size()), vprev(v.size());
  prob.gradient(v, g);
  auto norm_inf = [](const std::vector<double>& a) {
    double m = 0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
  };
  double step = 1e-3;
  double fv = prob.value(v);
  int it = 0;
  for (; it < disc.max_iters; ++it) {
    if (norm_inf(g) <= disc.tol) break;
    // Barzilai-Borwein step after the first iteration
    if (it > 0) {
      double sy = 0, yy = 0;
      for (size_t i = 0; i < v.size(); ++i) {
        double s = v[i] - vprev[i], y = g[i] - gprev[i];
        sy += s * y;
        yy += y * y;
      }
      if (yy > 0 && sy > 0) step = sy / yy;
      step = std::clamp(step, 1e-8, 10.0);
    }
    vprev = v;
    gprev = g;
    // Armijo backtracking on the BB step
    double t = step;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> w(v.size());
      for (size_t i = 0; i < v.size(); ++i) w[i] = v[i] - t * g[i];
      double fw = prob.value(w);
      double decr = 0;
      for (double gi : g) decr += gi * gi;
      if (fw <= fv - 1e-4 * t * decr || bt == 59) {
        v = std::move(w);
        fv = fw;
        break;
      }
      t *= 0.5;
    }
    prob.gradient(v, g);
  }
  if (norm_inf(g) > disc.tol)
    throw ConfigError("perturbed_geodesic_length: descent stalled at gradient "
                      "norm " + std::to_string(norm_inf(g)));
  CurveResult res;
  res.length = fv;
  res.grad_norm = norm_inf(g);
  res.iterations = it;
  res.points.reserve(size_t(N));
  for (int k = 0; k < N; ++k) res.points.push_back(prob.point(v, k));
  // first-order quadrature along this minimizer: sum sigma(m_k) l_k with the
  // unweighted hyperbolic segment lengths
  if (sigma) {
    double lin = 0;
    for (int k = 0; k < N; ++k) {
      hpt a = res.points[size_t(k)];
      hpt b = (k + 1 < N) ? res.points[size_t(k + 1)]
                          : mobius(gamma, res.points[0]);
      lin += sigma->eval(detail::CurveProblem::midpoint(a, b)) * hyp_dist(a, b);
    }
    res.linear_term = lin;
  }
  return res;
}

}  // namespace anosov
