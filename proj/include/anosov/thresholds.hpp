// Regularity thresholds: omega_+/- from periodic-orbit ergodic optimization
// with a rho-grid bisection, the subadditive doubling estimator, foliation
// bounds from Lyapunov data, cone-expansion equivalence, and the L^2
// (direct-integral) threshold.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "anosov/cohomology.hpp"
#include "anosov/core.hpp"
#include "anosov/orbits.hpp"
#include "anosov/systems.hpp"

namespace anosov {

struct OrbitRate {
  std::string orbit_id;
  int period_steps = 0;
  double flow_period = 0;
  double weight_rate = 0;     // per-unit-time log growth of the weight
  double expansion_rate = 0;  // per-unit-time unstable expansion (positive)
  double contraction_rate = 0;  // per-unit-time stable contraction (positive)
};

struct ThresholdReport {
  double omega_plus = 0, omega_minus = 0;
  std::string method = "periodic-orbit-max";
  int P = 0;
  double rho_step = 1.0 / 64;
  std::vector<OrbitRate> table;
  bool clamped_plus = false, clamped_minus = false;
};

inline std::vector<OrbitRate> orbit_rate_table(const AnosovFlow& flow,
                                               const CocycleWeight& weight,
                                               const OrbitSet& orbits, int P) {
  std::vector<OrbitRate> out;
  double loglam = flow.base.log_lambda();
  for (const auto* o : orbits.up_to(P)) {
    OrbitRate r;
    r.orbit_id = orbit_id_of(*o);
    r.period_steps = o->period;
    r.flow_period = orbit_flow_period(flow, *o);
    double wsum = 0;
    if (!weight.trivial() && weight.kind == CocycleWeight::Kind::scalar_potential)
      for (const auto& p : o->points)
        wsum += flow.roof_at(p.x(), p.y()) * weight.field.eval_real(p.x(), p.y());
    r.weight_rate = wsum / r.flow_period;
    // linear base: exact rates; the suspension direction is neutral
    r.expansion_rate = o->period * loglam / r.flow_period;
    r.contraction_rate = r.expansion_rate;
    out.push_back(r);
  }
  return out;
}

// Bisection point on the rho grid where max_orbit(weight - rho * rate)
// changes sign; clamped at zero.
inline double rho_grid_bisect(const std::vector<OrbitRate>& table,
                              bool forward, double rho_step, double rho_max,
                              bool* clamped) {
  auto max_rate = [&](double rho) {
    double m = -kInf;
    for (const auto& r : table) {
      double contract = forward ? r.expansion_rate : r.contraction_rate;
      m = std::max(m, r.weight_rate - rho * contract);
    }
    return m;
  };
  if (clamped) *clamped = false;
  if (max_rate(0.0) <= 0) {
    if (clamped) *clamped = true;
    return 0.0;  // zero weight (or negative rates) clamp exactly
  }
  int steps = int(std::ceil(rho_max / rho_step));
  double prev = max_rate(0.0);
  for (int i = 1; i <= steps; ++i) {
    double rho = i * rho_step;
    double cur = max_rate(rho);
    if (cur <= 0) {
      (void)prev;
      return rho;
    }
    prev = cur;
  }
  throw ConfigError("forward_threshold: rho grid too narrow (no sign change)");
}

inline ThresholdReport forward_threshold(const AnosovFlow& flow,
                                         const CocycleWeight& weight,
                                         const OrbitSet& orbits, int P,
                                         double rho_step = 1.0 / 64,
                                         double rho_max = 8.0) {
  if (P < 4) throw ConfigError("forward_threshold: P >= 4");
  ThresholdReport rep;
  rep.P = P;
  rep.rho_step = rho_step;
  rep.table = orbit_rate_table(flow, weight, orbits, P);
  rep.omega_plus =
      rho_grid_bisect(rep.table, true, rho_step, rho_max, &rep.clamped_plus);
  rep.omega_minus =
      rho_grid_bisect(rep.table, false, rho_step, rho_max, &rep.clamped_minus);
  return rep;
}

// ---------------------------------------------------------------------------
// Subadditive doubling estimator (the proof mechanism of the appendix lemma):
// sup_x g(x, 2^m)/2^m over the full lattice vs the periodic-orbit maximum.
// ---------------------------------------------------------------------------

struct SubadditiveSpec {
  enum class Kind { birkhoff, log_cocycle } kind = Kind::birkhoff;
  TrigPoly2 v;  // potential for the birkhoff family
  double lipschitz_along_orbit = 0;
};

struct ConvergenceReport {
  std::vector<double> doubling_values;  // m = 1..m_max: sup_x g(x,2^m)/2^m
  double orbit_max = 0;
  double gap = 0;
  double subadditivity_defect = 0;
};

inline ConvergenceReport subadditive_limit(const SubadditiveSpec& spec,
                                           const AnosovMap& map,
                                           const OrbitSet& orbits, int m_max,
                                           int grid_n = 0, int P = 0,
                                           double spot_tol = 1e-9) {
  if (!map.is_linear())
    throw ConfigError("subadditive_limit: exact doubling needs the linear map");
  if (grid_n <= 0) grid_n = 128;
  if (P <= 0) P = orbits.max_period;
  int n = grid_n;
  size_t nn = size_t(n) * n;
  // permutation of the lattice under A
  std::vector<int> fwd(nn);
  const IMat2 A = map.matrix();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long long fi = RatPt::mod(A.a * i + A.b * j, n);
      long long fj = RatPt::mod(A.c * i + A.d * j, n);
      fwd[size_t(i) * n + j] = int(fi) * n + int(fj);
    }
  auto g_of = [&](size_t id) {
    int i = int(id) / n, j = int(id) % n;
    double x = double(i) / n, y = double(j) / n;
    if (spec.kind == SubadditiveSpec::Kind::birkhoff)
      return spec.v.eval_real(x, y);
    return map.log_lambda();  // log unstable cocycle gain per step (linear)
  };
  // g(x, 1) on the grid, then double: g(x, 2T) = g(x,T) + g(A^T x, T)
  std::vector<double> g(nn), perm(nn);
  for (size_t id = 0; id < nn; ++id) g[id] = g_of(id);
  std::vector<int> power = fwd;  // permutation by A^{2^0}
  ConvergenceReport rep;
  // subadditivity spot check on sampled triples (equality for Birkhoff sums)
  {
    Rng rng(1234);
    double worst = 0;
    for (int t = 0; t < 32; ++t) {
      size_t id = size_t(rng.next_u64() % nn);
      double g1 = g[id], g1f = g[size_t(fwd[id])];
      double lhs = g1 + g1f;  // g(x, 2) via the cocycle identity
      // direct evaluation of g(x,2)
      double direct = g_of(id) + g_of(size_t(fwd[id]));
      worst = std::max(worst, std::abs(lhs - direct));
    }
    rep.subadditivity_defect = worst;
    if (worst > spot_tol)
      throw ConfigError("subadditive_limit: family not subadditive");
  }
  long long T = 1;
  for (int m = 1; m <= m_max; ++m) {
    // g_{2T}(x) = g_T(x) + g_T(A^T x)
    for (size_t id = 0; id < nn; ++id) perm[id] = g[size_t(power[id])];
    for (size_t id = 0; id < nn; ++id) g[id] += perm[id];
    T *= 2;
    // power <- power o power (A^{2^m})
    std::vector<int> p2(nn);
    for (size_t id = 0; id < nn; ++id) p2[id] = power[size_t(power[id])];
    power.swap(p2);
    double sup = -kInf;
    for (size_t id = 0; id < nn; ++id) sup = std::max(sup, g[id]);
    rep.doubling_values.push_back(sup / double(T));
  }
  // periodic-orbit maximum of the per-step average
  double om = -kInf;
  for (const auto* o : orbits.up_to(P)) {
    double s = 0;
    for (const auto& p : o->points)
      s += (spec.kind == SubadditiveSpec::Kind::birkhoff
                ? spec.v.eval_real(p.x(), p.y())
                : map.log_lambda());
    om = std::max(om, s / o->period);
  }
  rep.orbit_max = om;
  rep.gap = rep.doubling_values.back() - om;
  return rep;
}

// ---------------------------------------------------------------------------
// Foliation threshold from Lyapunov data
// ---------------------------------------------------------------------------

inline double foliation_threshold(const LyapunovReport& lyap,
                                  bool volume_preserving_3d) {
  if (lyap.lambda_u_min <= 0 || lyap.lambda_s_min <= 0)
    throw ConfigError("foliation_threshold: zero denominator");
  double num = lyap.lambda_u_max + lyap.lambda_s_max;
  double bound = std::max(num / lyap.lambda_u_min, num / lyap.lambda_s_min);
  if (volume_preserving_3d) bound = std::min(bound, 2.0);
  return bound;
}

// ---------------------------------------------------------------------------
// Cone-expansion equivalence (the block-decay mechanism's geometric input):
// Lambda_cone(x,T) = sup over sampled covectors xi in the cone of
// |xi| / |d phi_T^T xi|, compared with || d phi_{-T}|_{E_u} ||.
// ---------------------------------------------------------------------------

struct ConeEquivalenceReport {
  double ratio_min = kInf, ratio_max = 0;
  std::vector<double> lambda_of_T;  // the cone quantity per horizon step
};

inline ConeEquivalenceReport cone_expansion_equivalence_check(
    const AnosovFlow& flow, const ConeSymbol& cone, int T_horizon,
    int angle_samples = 64) {
  if (!flow.unit_roof)
    throw ConfigError("cone_expansion_equivalence_check: unit roof required");
  const AnosovMap& map = flow.base;
  Vec2 estar_s = map.estar_s_dir();
  Vec2 estar_u = map.estar_u_dir();
  // validation: the cone must contain E*_s and exclude E*_u + E*_0
  if (cone.eval(estar_s.x, estar_s.y, 0.0) < 1.0)
    throw ConfigError("cone validation: E*_s not in the cone plateau");
  if (cone.eval(estar_u.x, estar_u.y, 0.0) != 0.0 ||
      cone.eval(0.0, 0.0, 1.0) != 0.0)
    throw ConfigError("cone validation: cone meets E*_u or E*_0");
  Mat2 Bt = map.matrix().transpose().to_real();
  ConeEquivalenceReport rep;
  for (int T = 1; T <= T_horizon; ++T) {
    double contraction = std::pow(map.lambda(), -double(T));
    double lam = 0;
    // sample covector directions across the cone support (base plane and
    // tilted out of plane)
    for (int a = 0; a <= angle_samples; ++a) {
      double ang = (2.0 * a / angle_samples - 1.0) * cone.angle_support;
      Vec2 dir{estar_s.x * std::cos(ang) - estar_s.y * std::sin(ang),
               estar_s.x * std::sin(ang) + estar_s.y * std::cos(ang)};
      for (double tilt : {0.0, 0.3, 0.7}) {
        double z = std::tan(tilt * cone.angle_support);
        double norm0 = std::sqrt(1.0 + z * z);
        if (cone.eval(dir.x, dir.y, z) == 0.0) continue;
        Vec2 w = dir;
        for (int t = 0; t < T; ++t) w = Bt.apply(w);
        double imgnorm = std::sqrt(w.dot(w) + z * z);
        lam = std::max(lam, norm0 / imgnorm);
      }
    }
    rep.lambda_of_T.push_back(lam);
    double ratio = lam / contraction;
    rep.ratio_min = std::min(rep.ratio_min, ratio);
    rep.ratio_max = std::max(rep.ratio_max, ratio);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Appendix-B style L^2 threshold via the direct integral
//   (1/T) log int e^{int_0^T v o phi_{-t} dt} || d phi_{-T}|_{E_u} ||^rho dmu
// on the unit-roof suspension over a linear base. The weight integral is
// exact on the lattice (v is slice-constant), the T-slope is fitted, and the
// zero crossing in rho is reported on the same grid as forward_threshold.
// ---------------------------------------------------------------------------

struct SobolevThresholdReport {
  double omega_l2 = 0;
  double integral_rate = 0;  // fitted slope of log int e^{W_T} in T
  double fit_residual = 0;
  std::vector<double> log_integrals;
  bool clamped = false;
};

inline SobolevThresholdReport sobolev_threshold_integral(
    const AnosovFlow& flow, const TrigPoly2& v, int T_max, int grid_n = 128,
    int n_s = 8, double rho_step = 1.0 / 64, double fit_residual_tol = 0.05) {
  if (!flow.unit_roof || !flow.base.is_linear())
    throw ConfigError("sobolev_threshold_integral: unit-roof linear model");
  if (T_max < 4) throw ConfigError("sobolev_threshold_integral: horizon too short");
  int n = grid_n;
  size_t nn = size_t(n) * n;
  const IMat2 Ainv = flow.base.matrix().inverse_unimodular();
  std::vector<int> bwd(nn);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long long bi = RatPt::mod(Ainv.a * i + Ainv.b * j, n);
      long long bj = RatPt::mod(Ainv.c * i + Ainv.d * j, n);
      bwd[size_t(i) * n + j] = int(bi) * n + int(bj);
    }
  std::vector<double> vg(nn);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      vg[size_t(i) * n + j] = v.eval_real(double(i) / n, double(j) / n);
  // W_T(x, s) accumulated exactly: slices s = (q + 0.5)/n_s (midpoint measure)
  std::vector<double> svals(static_cast<size_t>(n_s), 0.0);
  for (int q = 0; q < n_s; ++q) svals[size_t(q)] = (q + 0.5) / n_s;
  std::vector<std::vector<double>> W(size_t(n_s),
                                     std::vector<double>(nn, 0.0));
  std::vector<int> back_power(nn);  // A^{-T} as permutation, T running
  for (size_t id = 0; id < nn; ++id) back_power[id] = int(id);
  SobolevThresholdReport rep;
  std::vector<double> xs, ys;
  for (int T = 1; T <= T_max; ++T) {
    // add the segment [T-1, T]: s v(A^{-(T-1)} x) + (1-s) v(A^{-T} x)
    std::vector<int> next(nn);
    for (size_t id = 0; id < nn; ++id) next[id] = bwd[size_t(back_power[id])];
    for (int q = 0; q < n_s; ++q) {
      double s = svals[size_t(q)];
      auto& Wq = W[size_t(q)];
      for (size_t id = 0; id < nn; ++id)
        Wq[id] += s * vg[size_t(back_power[id])] + (1 - s) * vg[size_t(next[id])];
    }
    back_power.swap(next);
    // log integral with a stable max-shift
    double mx = -kInf;
    for (int q = 0; q < n_s; ++q)
      for (size_t id = 0; id < nn; ++id) mx = std::max(mx, W[size_t(q)][id]);
    double acc = 0;
    for (int q = 0; q < n_s; ++q)
      for (size_t id = 0; id < nn; ++id) acc += std::exp(W[size_t(q)][id] - mx);
    double logI = mx + std::log(acc / (double(n_s) * nn));
    rep.log_integrals.push_back(logI);
    if (T > T_max / 2) {
      xs.push_back(double(T));
      ys.push_back(logI);
    }
  }
  auto fit = linear_fit(xs, ys);
  rep.integral_rate = fit.slope;
  rep.fit_residual = fit.residual_rms;
  if (fit.residual_rms > fit_residual_tol)
    throw ConfigError("sobolev_threshold_integral: horizon too short (fit "
                      "residual " + std::to_string(fit.residual_rms) + ")");
  double loglam = flow.base.log_lambda();
  // zero crossing of integral_rate - rho log lambda on the rho grid
  if (rep.integral_rate <= 0) {
    rep.omega_l2 = 0;
    rep.clamped = true;
  } else {
    int steps = int(std::ceil(rep.integral_rate / loglam / rho_step)) + 1;
    rep.omega_l2 = 0;
    for (int i = 1; i <= steps; ++i) {
      if (rep.integral_rate - i * rho_step * loglam <= 0) {
        rep.omega_l2 = i * rho_step;
        break;
      }
    }
  }
  return rep;
}

}  // namespace anosov
