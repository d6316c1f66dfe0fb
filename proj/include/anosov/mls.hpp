// Geodesic-stretch and marked-length-spectrum experiments on the suspension
// model, plus the conformal linearization check on the Bolza surface.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "anosov/cohomology.hpp"
#include "anosov/core.hpp"
#include "anosov/orbits.hpp"
#include "anosov/surface.hpp"
#include "anosov/systems.hpp"

namespace anosov {

// ---------------------------------------------------------------------------
// Stretch between two roofs over a common base: a = r'/r lifted
// slice-constantly. Orbit integrals over the r-flow reproduce the r'-spectrum
// exactly: int_{gamma_r} a dt = sum r'(x_i).
// ---------------------------------------------------------------------------

struct StretchField {
  AnosovFlow ref;     // the r-flow whose orbits carry the integrals
  TrigPoly2 roof_to;  // r'
  double eval(double x, double y) const {
    return roof_to.eval_real(x, y) / ref.roof_at(x, y);
  }
};

inline StretchField stretch_from_roofs(const AnosovFlow& flow_r,
                                       const AnosovFlow& flow_rp) {
  if (flow_rp.roof_min_bound() <= 0 || flow_r.roof_min_bound() <= 0)
    throw ConfigError("stretch_from_roofs: roofs must be strictly positive");
  return StretchField{flow_r, flow_rp.roof};
}

// int_{gamma_r} a dt = sum_i r(x_i) a(x_i), exact for slice-constant a.
inline double stretch_orbit_integral(const StretchField& a,
                                     const PeriodicOrbit& orbit) {
  size_t start = 0;
  for (size_t i = 1; i < orbit.points.size(); ++i)
    if (orbit.points[i] < orbit.points[start]) start = i;
  double s = 0;
  for (size_t i = 0; i < orbit.points.size(); ++i) {
    const RatPt& p = orbit.points[(start + i) % orbit.points.size()];
    s += a.ref.roof_at(p.x(), p.y()) * a.eval(p.x(), p.y());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Marked-spectrum comparison with the first-order residual column
// ---------------------------------------------------------------------------

struct MlsCompareRow {
  std::string orbit_id;
  int period_steps = 0;
  double ratio_minus_one = 0;   // L'/L - 1
  double mean_stretch_minus_one = 0;  // orbit average of a - 1 over the r-flow
  double residual = 0;          // difference (identically 0 in this model)
};

inline std::vector<MlsCompareRow> mls_compare(const AnosovFlow& flow_r,
                                              const AnosovFlow& flow_rp,
                                              const OrbitSet& orbits, int P) {
  auto a = stretch_from_roofs(flow_r, flow_rp);
  std::vector<MlsCompareRow> rows;
  for (const auto* o : orbits.up_to(P)) {
    MlsCompareRow row;
    row.orbit_id = orbit_id_of(*o);
    row.period_steps = o->period;
    double L = orbit_flow_period(flow_r, *o);
    double Lp = orbit_flow_period(flow_rp, *o);
    row.ratio_minus_one = Lp / L - 1.0;
    row.mean_stretch_minus_one = stretch_orbit_integral(a, *o) / L - 1.0;
    row.residual = row.ratio_minus_one - row.mean_stretch_minus_one;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reparameterization invariance: a' = (1 + X u) a o Upsilon_u has the same
// orbit integrals as a. Works on the unit-roof suspension, where closed
// orbits and the time shift Upsilon_u(z) = phi_{u(z)}(z) are explicit.
// Observables are analytic functions of (x, s) supplied with exact X u.
// ---------------------------------------------------------------------------

struct SuspensionObservable {
  std::function<double(Vec2, double)> value;  // u(x, s)
  std::function<double(Vec2, double)> x_derivative;  // (X u)(x, s) = d_s u
};

// smooth test function u(x,s) = amp * g(s) cos(2 pi <k, x> + phase) with g a
// closed-form bump supported in (0,1): twisted-periodic by construction
inline SuspensionObservable train_observable(int k0, int k1, double amp,
                                             double phase, int bump_power = 8) {
  SinePowerBump g{bump_power};
  auto val = [=](Vec2 x, double s) {
    double ss = s - std::floor(s);
    return amp * g(ss) * std::cos(kTwoPi * (k0 * x.x + k1 * x.y) + phase);
  };
  auto dval = [=](Vec2 x, double s) {
    double ss = s - std::floor(s);
    return amp * g.deriv(ss) * std::cos(kTwoPi * (k0 * x.x + k1 * x.y) + phase);
  };
  return SuspensionObservable{val, dval};
}

inline SuspensionObservable constant_observable(double c) {
  return SuspensionObservable{[=](Vec2, double) { return c; },
                              [](Vec2, double) { return 0.0; }};
}

// flow point on the unit-roof suspension: from (x0, 0), time t
inline std::pair<Vec2, double> unit_flow_point(const AnosovMap& map, Vec2 x0,
                                               double t) {
  double fl = std::floor(t);
  int steps = int(fl);
  Vec2 x = x0;
  Mat2 A = map.matrix().to_real();
  if (steps >= 0) {
    for (int i = 0; i < steps; ++i) {
      x = A.apply(x);
      x.x -= std::floor(x.x);
      x.y -= std::floor(x.y);
    }
  } else {
    Mat2 Ai = map.matrix().inverse_unimodular().to_real();
    for (int i = 0; i < -steps; ++i) {
      x = Ai.apply(x);
      x.x -= std::floor(x.x);
      x.y -= std::floor(x.y);
    }
  }
  return {x, t - fl};
}

// Orbit integral of F over the closed unit-roof orbit through x0 (period n),
// by the full-orbit trapezoid rule (periodic integrand: spectral accuracy).
inline double orbit_integral_dense(const AnosovMap& map, Vec2 x0, int n,
                                   const std::function<double(Vec2, double)>& F,
                                   int nodes_per_unit = 256) {
  int M = n * nodes_per_unit;
  double acc = 0;
  Vec2 x = x0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < nodes_per_unit; ++i) {
      double s = double(i) / nodes_per_unit;
      acc += F(x, s);
    }
    Mat2 A = map.matrix().to_real();
    x = A.apply(x);
    x.x -= std::floor(x.x);
    x.y -= std::floor(x.y);
  }
  return acc * double(n) / double(M);
}

struct ReparamReport {
  double max_discrepancy = 0;
  double min_time_change = kInf;  // min of 1 + X u (must stay positive)
};

inline ReparamReport reparam_invariance_check(
    const AnosovMap& map, const std::function<double(Vec2, double)>& stretch,
    const SuspensionObservable& u, const OrbitSet& orbits, int P,
    int nodes_per_unit = 256) {
  ReparamReport rep;
  // positivity of the time change along the sampled orbits
  for (const auto* o : orbits.up_to(P)) {
    Vec2 x0{o->points[0].x(), o->points[0].y()};
    for (int i = 0; i < o->period * nodes_per_unit; ++i) {
      double t = double(i) / nodes_per_unit;
      auto [x, s] = unit_flow_point(map, x0, t);
      rep.min_time_change =
          std::min(rep.min_time_change, 1.0 + u.x_derivative(x, s));
    }
  }
  if (rep.min_time_change <= 0)
    throw ConfigError("reparam_invariance_check: 1 + Xu vanishes "
                      "(not a reparameterization)");
  for (const auto* o : orbits.up_to(P)) {
    Vec2 x0{o->points[0].x(), o->points[0].y()};
    int n = o->period;
    auto a_of = [&](Vec2 x, double s) {
      (void)s;
      return stretch(x, s);
    };
    double ia = orbit_integral_dense(map, x0, n, a_of, nodes_per_unit);
    auto a_reparam = [&](Vec2 x, double s) {
      double shift = u.value(x, s);
      auto [xs, ss] = unit_flow_point(map, x, s + shift);
      return (1.0 + u.x_derivative(x, s)) * stretch(xs, ss);
    };
    double ib = orbit_integral_dense(map, x0, n, a_reparam, nodes_per_unit);
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(ia - ib));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Stability experiment (the suspension analogue of the marked-length-spectrum
// stability estimate): the coboundary-free content of a roof perturbation is
// compared against the certified quotient-seminorm lower bound.
// ---------------------------------------------------------------------------

struct StabilitySample {
  double residual_norm = 0;   // sup norm of the coboundary-free representative
  double seminorm_lower = 0;  // max orbit average
  double ratio = 0;
  bool skipped = false;
  std::string note;
};

struct StabilityReport {
  std::vector<StabilitySample> samples;
  double max_ratio = 0;
  int skipped = 0;
};

// Decompose dr into coboundary + residual by collapsing every lattice
// B-orbit class onto its minimal-norm representative carrying the full class
// sum; the complement has vanishing orbit sums and solves exactly.
struct CoboundarySplit {
  Grid2Field coboundary_part;  // w o A - w
  Grid2Field residual;         // dr - (w o A - w)
  Grid2Field w;
};

inline CoboundarySplit coboundary_split(const AnosovMap& map,
                                        const Grid2Field& dr) {
  const GridSpec spec = dr.spec();
  int n = spec.n_side;
  int K = n / 2 - 1;
  long long K2 = (long long)(K) * K;
  IMat2 B = map.matrix().transpose();
  IMat2 Binv = B.inverse_unimodular();
  // orbit classes over the support of dr_hat
  std::map<std::pair<long long, long long>, cplx> residual_modes;
  std::vector<std::pair<long long, long long>> support;
  int bound = 256;  // enough steps for any orbit to escape the grid ball
  Grid2Field solvable = dr;
  auto& sc = solvable.mutable_coeffs();
  std::vector<bool> seen(size_t(n) * n, false);
  for (int ik = 0; ik < n; ++ik) {
    long long k0 = fft_index_to_k(ik, n);
    for (int jk = 0; jk < n; ++jk) {
      long long k1 = fft_index_to_k(jk, n);
      size_t id = size_t(ik) * n + jk;
      if (seen[id]) continue;
      if (std::abs(sc[id]) == 0.0) continue;
      if (k0 * k0 + k1 * k1 > K2) continue;
      // walk the orbit segment inside the ball through (k0, k1)
      std::vector<std::pair<long long, long long>> orbit{{k0, k1}};
      for (auto dir : {B, Binv}) {
        long long q0 = k0, q1 = k1;
        for (int j = 0; j < bound; ++j) {
          long long t0 = dir.a * q0 + dir.b * q1, t1 = dir.c * q0 + dir.d * q1;
          q0 = t0;
          q1 = t1;
          if (q0 * q0 + q1 * q1 > K2) break;
          orbit.push_back({q0, q1});
        }
      }
      cplx S = 0;
      std::pair<long long, long long> rep = orbit[0];
      long long best = rep.first * rep.first + rep.second * rep.second;
      for (auto& q : orbit) {
        size_t qid = size_t(k_to_fft_index(int(q.first), n)) * n +
                     k_to_fft_index(int(q.second), n);
        if (!seen[qid]) {
          S += sc[qid];
          seen[qid] = true;
        }
        long long norm = q.first * q.first + q.second * q.second;
        if (norm < best || (norm == best && q < rep)) {
          best = norm;
          rep = q;
        }
      }
      if (std::abs(S) > 0) residual_modes[rep] += S;
      support.push_back({k0, k1});
    }
  }
  // residual field and the solvable complement
  Grid2Field rho(spec);
  auto& rc = rho.mutable_coeffs();
  std::fill(rc.begin(), rc.end(), cplx(0));
  for (const auto& [k, c] : residual_modes)
    rc[size_t(k_to_fft_index(int(k.first), n)) * n +
       k_to_fft_index(int(k.second), n)] = c;
  Grid2Field solv = dr - rho;
  auto sol = livsic_solve(map, solv, K, 1e-10, 1e-9);
  CoboundarySplit out;
  out.w = sol.u;
  out.coboundary_part = sol.u.compose_int(map.matrix()) - sol.u;
  out.residual = dr - out.coboundary_part;
  return out;
}

inline StabilityReport stability_experiment(const AnosovMap& map,
                                            const std::vector<TrigPoly2>& drs,
                                            const OrbitSet& orbits, int P) {
  StabilityReport rep;
  GridSpec spec{128, 8};
  for (const auto& dr : drs) {
    StabilitySample s;
    auto f = Grid2Field::from_trig(spec, dr);
    s.seminorm_lower = quotient_seminorm_lower(dr, orbits);
    auto split = coboundary_split(map, f);
    s.residual_norm = split.residual.max_abs();
    if (s.seminorm_lower < 1e-11) {
      s.skipped = true;
      s.note = "pure coboundary (both sides at noise level)";
      rep.skipped++;
    } else {
      s.ratio = s.residual_norm / s.seminorm_lower;
      rep.max_ratio = std::max(rep.max_ratio, s.ratio);
    }
    rep.samples.push_back(s);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Conformal linearization on the Bolza surface: remainder slope of
// R(eps) = L_eps/L0 - 1 - (eps/L0) * int_gamma sigma  should be 2.
// ---------------------------------------------------------------------------

struct ConformalSlopeRow {
  std::string word;
  double slope = 0;
  std::vector<double> eps;
  std::vector<double> remainder;
  double L0 = 0;
};

inline ConformalSlopeRow conformal_linearization_word(
    const FuchsianGroup& group, const ConformalFactor& sigma,
    const std::vector<int>& word, const std::vector<double>& eps_list,
    CurveDiscretization disc) {
  if (eps_list.size() < 3)
    throw ConfigError("conformal_linearization: need >= 3 epsilons");
  ConformalSlopeRow row;
  for (int g : word) row.word += std::to_string(g) + ".";
  CurveDiscretization d0 = disc;
  d0.eps = 0.0;
  auto base = perturbed_geodesic_length(group, word, &sigma, d0);
  row.L0 = base.length;
  double D = base.linear_term;  // quadrature of sigma along the unperturbed curve
  std::vector<double> lx, ly;
  for (double eps : eps_list) {
    CurveDiscretization de = disc;
    de.eps = eps;
    auto res = perturbed_geodesic_length(group, word, &sigma, de);
    double R = res.length / row.L0 - 1.0 - eps * D / row.L0;
    row.eps.push_back(eps);
    row.remainder.push_back(R);
    if (std::abs(R) > 0) {
      lx.push_back(std::log(eps));
      ly.push_back(std::log(std::abs(R)));
    }
  }
  if (lx.size() >= 2) row.slope = linear_fit(lx, ly).slope;
  return row;
}

}  // namespace anosov
