// Acceptance suite: one test per criterion, each printing a pass/fail line
// with the measured value at the pinned tolerance.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>

#include "anosov/lab.hpp"

using namespace anosov;

namespace {

const double kLogLambda = 0.9624236501192069;  // log((3 + sqrt 5)/2)

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(int num, bool pass, const std::string& what, double value,
            double threshold) {
  std::printf("[criterion %02d] %s: %s (value %.6g, threshold %.6g)\n", num,
              pass ? "PASS" : "FAIL", what.c_str(), value, threshold);
  std::fflush(stdout);
}

TrigPoly2 coboundary_of(const AnosovMap& map, const TrigPoly2& u0) {
  IMat2 B = map.matrix().transpose();
  TrigPoly2 F;
  for (const auto& m : u0.modes) {
    F.modes.push_back({int(B.a * m.k0 + B.b * m.k1),
                       int(B.c * m.k0 + B.d * m.k1), m.c});
    F.modes.push_back({m.k0, m.k1, -m.c});
  }
  return F;
}

TrigPoly2 random_poly(Rng& rng, int k_max, int terms, double amp = 1.0) {
  TrigPoly2 p;
  for (int t = 0; t < terms; ++t) {
    int k0 = rng.uniform_int(-k_max, k_max), k1 = rng.uniform_int(-k_max, k_max);
    if (k0 == 0 && k1 == 0) k0 = 1;
    p.add_real_cos(k0, k1, amp * rng.normal(), rng.uniform(0, kTwoPi));
  }
  return p;
}

// 1. Livsic exact recovery: 100 random band-limited u at n_side = 64,
//    recovery modulo constants with sup error <= 1e-10; runtime <= 10 s.
TEST(Acceptance, C01_LivsicExactRecovery) {
  auto t0 = std::chrono::steady_clock::now();
  auto map = cat_map_system();
  GridSpec spec{64, 8};
  Rng root(2026);
  double worst = 0;
  for (int s = 0; s < 100; ++s) {
    Rng rs = root.split(s);
    TrigPoly2 u0 = random_poly(rs, 5, 6);
    auto F = Grid2Field::from_trig(spec, coboundary_of(map, u0));
    auto sol = livsic_solve(map, F);
    auto want = Grid2Field::from_trig(spec, u0);
    Grid2Field diff = sol.u - want;
    cplx mean = diff.coeff(0, 0);
    worst = std::max(worst,
                     (diff - Grid2Field::mode(spec, 0, 0) * mean).max_abs());
  }
  double dt = seconds_since(t0);
  bool pass = worst <= 1e-10 && dt <= 10.0;
  report(1, pass, "Livsic construct-and-recover, 100 samples", worst, 1e-10);
  EXPECT_LE(worst, 1e-10);
  EXPECT_LE(dt, 10.0);
}

// 2. Orbit counts for n <= 10 equal |det(A^n - I)| = tr(A^n) - 2 exactly;
//    runtime <= 5 s.
TEST(Acceptance, C02_OrbitCounts) {
  auto t0 = std::chrono::steady_clock::now();
  auto map = cat_map_system();
  auto set = enumerate_periodic_orbits(map, 10);
  long long T0 = 2, T1 = 3;
  bool pass = orbit_counts_consistent(set);
  for (int n = 1; n <= 10; ++n) {
    if (set.period_point_counts[size_t(n) - 1] != T1 - 2) pass = false;
    long long t2 = 3 * T1 - T0;
    T0 = T1;
    T1 = t2;
  }
  double dt = seconds_since(t0);
  pass = pass && dt <= 5.0;
  report(2, pass, "period-n point counts vs trace recursion, n <= 10",
         double(set.period_point_counts[9]), double(15127));
  EXPECT_TRUE(pass);
}

// 3. Lyapunov exactness: map exponents within 1e-8, suspension per-unit-time
//    within 1e-6.
TEST(Acceptance, C03_LyapunovExactness) {
  auto map = cat_map_system();
  auto m_rep = lyapunov_data(map, {{0.2, 0.3}, {0.7, 0.1}}, 64);
  double err_map =
      std::max(std::abs(m_rep.lambda_u_min - kLogLambda),
               std::max(std::abs(m_rep.lambda_u_max - kLogLambda),
                        std::abs(m_rep.lambda_s_max - kLogLambda)));
  auto flow = unit_suspension(map);
  auto f_rep = lyapunov_data(flow, {{0.2, 0.3}}, 64);
  double err_flow = std::max(std::abs(f_rep.lambda_u_min - kLogLambda),
                             std::abs(f_rep.lambda_u_max - kLogLambda));
  bool pass = err_map <= 1e-8 && err_flow <= 1e-6;
  report(3, pass, "cat-map and suspension Lyapunov exponents",
         std::max(err_map, err_flow), 1e-6);
  EXPECT_LE(err_map, 1e-8);
  EXPECT_LE(err_flow, 1e-6);
}

// 4. Threshold closed form: v = log(lambda)/2 gives omega_+ = 0.5 within one
//    rho-grid step (1/64) at P = 12; the trivial weight gives 0 exactly.
TEST(Acceptance, C04_ThresholdClosedForm) {
  auto flow = unit_suspension(cat_map_system());
  auto orbits = enumerate_periodic_orbits(flow.base, 12);
  TrigPoly2 v;
  v.modes.push_back({0, 0, cplx(kLogLambda / 2, 0)});
  auto rep = forward_threshold(flow, CocycleWeight::scalar(v), orbits, 12);
  auto triv = forward_threshold(flow, CocycleWeight::none(), orbits, 12);
  bool pass = std::abs(rep.omega_plus - 0.5) <= 1.0 / 64 + 1e-12 &&
              std::abs(rep.omega_minus - 0.5) <= 1.0 / 64 + 1e-12 &&
              triv.omega_plus == 0.0 && triv.omega_minus == 0.0;
  report(4, pass, "constant-weight threshold and trivial clamp",
         rep.omega_plus, 0.5);
  EXPECT_TRUE(pass);
}

// 5. Subadditive doubling at T = 2^10 vs periodic-orbit max (P = 12) within
//    1%, subadditivity spot checks at 1e-9.
TEST(Acceptance, C05_SubadditiveDoubling) {
  auto map = cat_map_system();
  auto orbits = enumerate_periodic_orbits(map, 12);
  SubadditiveSpec spec;
  spec.kind = SubadditiveSpec::Kind::birkhoff;
  spec.v.add_real_cos(1, 0, 1.0);
  auto conv = subadditive_limit(spec, map, orbits, 10, 128, 12, 1e-9);
  double rel = std::abs(conv.doubling_values.back() - conv.orbit_max) /
               std::max(std::abs(conv.orbit_max), 1e-30);
  bool pass = rel <= 0.01 && conv.subadditivity_defect <= 1e-9;
  report(5, pass, "doubling estimator vs periodic-orbit maximum", rel, 0.01);
  EXPECT_LE(rel, 0.01);
  EXPECT_LE(conv.subadditivity_defect, 1e-9);
}

// 6. Source-estimate dichotomy at n_side = 256: unweighted running-sup ratios
//    vary by < 2x over 4 dyadic h steps for rho in {0.25, 0.5, 1.0} (50
//    random smooth samples); with v = log lambda the fitted ratio-growth
//    exponent is >= 0.25 at rho = 0.5 and <= 0.1 at rho = 1.25.
//    Runtime <= 5 min.
TEST(Acceptance, C06_SourceEstimateDichotomy) {
  auto t0 = std::chrono::steady_clock::now();
  auto flow = unit_suspension(cat_map_system());
  GridSpec spec{256, 8};
  auto pair = make_radial_pair(flow, 0.85, 0.5, 6, 1.6);
  bool pass = true;
  // unweighted stability over a populated dyadic window (the first octave
  // must already see the cone-filtered content of the family)
  std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  for (double rho : {0.25, 0.5, 1.0}) {
    auto rep = source_estimate_sweep(flow, pair, rho, 4, hs, 50, 61, 0.0,
                                     spec, SweepFamily::random_smooth, 0.0);
    double lo = kInf, hi = 0;
    for (double m : rep.running_sup_median)
      if (m > 0) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
    bool ok = lo > 0 && hi / lo < 2.0;
    pass = pass && ok;
    report(6, ok, "unweighted ratio stability at rho " + std::to_string(rho),
           lo > 0 ? hi / lo : kInf, 2.0);
    EXPECT_TRUE(ok);
  }
  // weighted dichotomy on the transport-saturated family
  std::vector<double> hs2{1.0 / 32, 1.0 / 64, 1.0 / 128};
  auto below = source_estimate_sweep(flow, pair, 0.5, 4, hs2, 8, 61,
                                     kLogLambda, spec,
                                     SweepFamily::resolvent_states, 1.0);
  auto above = source_estimate_sweep(flow, pair, 1.25, 4, hs2, 8, 61,
                                     kLogLambda, spec,
                                     SweepFamily::resolvent_states, 1.0);
  bool okb = below.growth_exponent >= 0.25;
  bool oka = above.growth_exponent <= 0.1;
  double dt = seconds_since(t0);
  pass = pass && okb && oka && dt <= 300.0;
  report(6, okb, "below-threshold growth exponent (rho 0.5, omega 1)",
         below.growth_exponent, 0.25);
  report(6, oka, "above-threshold growth exponent (rho 1.25, omega 1)",
         above.growth_exponent, 0.1);
  EXPECT_GE(below.growth_exponent, 0.25);
  EXPECT_LE(above.growth_exponent, 0.1);
  EXPECT_LE(dt, 300.0);
}

// 7. Block decay: fitted rate at rho = 0.5 within 20% of rho log lambda; at
//    rho = 0 the profile is flat (|slope| <= 0.02).
TEST(Acceptance, C07_BlockDecay) {
  auto flow = unit_suspension(cat_map_system());
  GridSpec spec{256, 8};
  auto train = rho_critical_train(flow.base, 1, 0, 0.5, 127);
  auto u = train.render(spec, flow.base.matrix());
  auto rep = block_decay_probe(flow, u, 0.5, {3, 4, 5}, 0.25);
  double want = -0.5 * kLogLambda;
  bool ok1 = std::abs(rep.fitted_rate - want) <= 0.2 * std::abs(want);
  auto train0 = rho_critical_train(flow.base, 1, 0, 0.0, 127);
  auto u0 = train0.render(spec, flow.base.matrix());
  auto rep0 = block_decay_probe(flow, u0, 0.0, {3, 4, 5}, 0.25);
  bool ok0 = std::abs(rep0.fitted_rate) <= 0.02;
  report(7, ok1, "block decay rate at rho 0.5", rep.fitted_rate, want);
  report(7, ok0, "flat profile at rho 0", rep0.fitted_rate, 0.02);
  EXPECT_TRUE(ok1);
  EXPECT_TRUE(ok0);
}

// 8. Coboundary invisibility: coboundary roof perturbations change no period
//    (<= 1e-12, P = 10); X-ray of coboundaries <= 1e-11 over 1000 samples.
TEST(Acceptance, C08_CoboundaryInvisibility) {
  auto map = cat_map_system();
  auto orbits = enumerate_periodic_orbits(map, 10);
  TrigPoly2 one;
  one.modes.push_back({0, 0, cplx(1, 0)});
  auto f1 = suspension_flow(map, one);
  Rng root(4242);
  double worst_period = 0;
  for (int s = 0; s < 10; ++s) {
    Rng rs = root.split(s);
    TrigPoly2 u = random_poly(rs, 3, 3, 0.05);
    TrigPoly2 roof2 = one;
    auto cob = coboundary_of(map, u);
    for (const auto& m : cob.modes) roof2.modes.push_back(m);
    auto f2 = suspension_flow(map, roof2);
    for (const auto& o : orbits.orbits)
      worst_period = std::max(worst_period,
                              std::abs(orbit_flow_period(f2, o) -
                                       orbit_flow_period(f1, o)));
  }
  bool ok1 = worst_period <= 1e-12;
  double worst_xray = 0;
  for (int s = 0; s < 1000; ++s) {
    Rng rs = root.split(1000 + s);
    TrigPoly2 u = random_poly(rs, 4, 4);
    TrigPoly2 F = coboundary_of(map, u);
    for (const auto& o : orbits.orbits)
      worst_xray = std::max(worst_xray, std::abs(xray(F, o)));
  }
  bool ok2 = worst_xray <= 1e-11;
  report(8, ok1, "coboundary roof leaves all periods unchanged", worst_period,
         1e-12);
  report(8, ok2, "X-ray kills coboundaries (1000 samples)", worst_xray, 1e-11);
  EXPECT_TRUE(ok1);
  EXPECT_TRUE(ok2);
}

// 9. Conformal linearization on the Bolza surface: bump-sigma remainder slope
//    in [1.8, 2.2] for the systole word; the constant-sigma control has slope
//    2.000 +- 0.01; systole length within 1e-6. Runtime <= 2 min.
TEST(Acceptance, C09_ConformalLinearization) {
  auto t0 = std::chrono::steady_clock::now();
  auto group = fuchsian_bolza();
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
  CurveDiscretization disc;
  disc.n_points = 256;
  ConformalFactor bumpy(group, ConformalBump{hpt(0.05, 1.1), 0.8, 0.5, false});
  auto row = conformal_linearization_word(group, bumpy, {0}, eps, disc);
  bool ok_bump = row.slope >= 1.8 && row.slope <= 2.2;
  ConformalFactor constant(group, ConformalBump{hpt(0, 1), 0.5, 1.0, true});
  auto ctrl = conformal_linearization_word(group, constant, {0}, eps, disc);
  bool ok_ctrl = std::abs(ctrl.slope - 2.0) <= 0.01;
  double L0 = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
  bool ok_systole = std::abs(row.L0 - L0) <= 1e-6;
  double dt = seconds_since(t0);
  report(9, ok_bump, "bump-sigma remainder slope", row.slope, 1.8);
  report(9, ok_ctrl, "constant-sigma control slope", ctrl.slope, 2.0);
  report(9, ok_systole, "systole length from the minimizer", row.L0, L0);
  EXPECT_TRUE(ok_bump);
  EXPECT_TRUE(ok_ctrl);
  EXPECT_TRUE(ok_systole);
  EXPECT_LE(dt, 120.0);
}

// 10. Stability experiment: over a 20-sample roof-perturbation family the
//     residual/seminorm ratios are finite; amplitudes 1e-3 and 1e-2 give
//     ratios agreeing within 1%.
TEST(Acceptance, C10_StabilityExperiment) {
  auto map = cat_map_system();
  auto orbits = enumerate_periodic_orbits(map, 10);
  Rng root(31337);
  std::vector<TrigPoly2> family;
  for (int s = 0; s < 20; ++s) {
    Rng rs = root.split(s);
    family.push_back(random_poly(rs, 3, 4, 1e-2));
  }
  auto rep = stability_experiment(map, family, orbits, 10);
  bool ok_finite = std::isfinite(rep.max_ratio) && rep.max_ratio > 0;
  // scale invariance on the first sample
  TrigPoly2 small = family[0];
  for (auto& m : small.modes) m.c *= 0.1;  // amplitude 1e-3
  auto rep_small = stability_experiment(map, {small}, orbits, 10);
  double rel = std::abs(rep_small.samples[0].ratio - rep.samples[0].ratio) /
               rep.samples[0].ratio;
  bool ok_scale = rel <= 0.01;
  report(10, ok_finite, "stability ratios finite over 20 samples",
         rep.max_ratio, 0);
  report(10, ok_scale, "ratio scale invariance 1e-3 vs 1e-2", rel, 0.01);
  EXPECT_TRUE(ok_finite);
  EXPECT_TRUE(ok_scale);
}

// 11. Foliation thresholds: the cat-map suspension bound is exactly 2; the
//     projector invariance residual is round-off for the linear model and
//     decreases with the splitting resolution for the eps = 0.01 perturbation.
TEST(Acceptance, C11_FoliationThresholds) {
  auto flow = unit_suspension(cat_map_system());
  auto lyap = lyapunov_data(flow, {{0.3, 0.4}}, 48);
  double bound = foliation_threshold(lyap, false);
  double bound3d = foliation_threshold(lyap, true);
  bool ok_bound = std::abs(bound - 2.0) <= 1e-9 && bound3d == bound;
  double lin = projector_invariance_residual(flow.base, 4, 8);
  bool ok_lin = lin <= 1e-12;
  TrigPolyVec2 bump;
  bump.px.add_real_cos(0, 1, 1.0, -kPi / 2);
  auto pert = perturbed_cat_map(flow.base, 0.01, bump, 128);
  double r1 = projector_invariance_residual(pert, 6, 3);
  double r2 = projector_invariance_residual(pert, 6, 6);
  double r3 = projector_invariance_residual(pert, 6, 12);
  bool ok_dec = r2 < r1 && r3 <= r2 + 1e-15;
  report(11, ok_bound, "cat-map suspension foliation bound", bound, 2.0);
  report(11, ok_lin, "linear projector residual is round-off", lin, 1e-12);
  report(11, ok_dec, "perturbed projector residual decreases", r3, r1);
  EXPECT_TRUE(ok_bound);
  EXPECT_TRUE(ok_lin);
  EXPECT_TRUE(ok_dec);
}

// 12. L^2 (direct-integral) threshold: zero-mean non-coboundary weight gives
//     omega_L2 <= omega_+ with a strictly positive gap; constant weights
//     coincide within one grid step.
TEST(Acceptance, C12_SobolevThresholdGap) {
  auto flow = unit_suspension(cat_map_system());
  auto orbits = enumerate_periodic_orbits(flow.base, 12);
  TrigPoly2 v;
  v.add_real_cos(1, 0, 0.3);
  auto l2 = sobolev_threshold_integral(flow, v, 14, 128, 8);
  auto sup = forward_threshold(flow, CocycleWeight::scalar(v), orbits, 12);
  bool ok_gap = l2.omega_l2 <= sup.omega_plus + 1e-12 &&
                (sup.omega_plus - l2.omega_l2) > 1.0 / 64;
  TrigPoly2 c;
  c.modes.push_back({0, 0, cplx(kLogLambda / 2, 0)});
  auto l2c = sobolev_threshold_integral(flow, c, 12, 64, 8);
  auto supc = forward_threshold(flow, CocycleWeight::scalar(c), orbits, 12);
  bool ok_const = std::abs(l2c.omega_l2 - supc.omega_plus) <= 1.0 / 64 + 1e-12;
  report(12, ok_gap, "omega_L2 strictly below omega_+ for cosine weight",
         sup.omega_plus - l2.omega_l2, 1.0 / 64);
  report(12, ok_const, "constant weight: thresholds coincide",
         std::abs(l2c.omega_l2 - supc.omega_plus), 1.0 / 64);
  EXPECT_TRUE(ok_gap);
  EXPECT_TRUE(ok_const);
}

// 13. Norm machinery: LP reconstruction <= 1e-10 relative L2; the norm
//     equivalence interval is stable under grid doubling (< 10%); the
//     disjoint-support product exhibits local decay exponent >= 4 by 2^-6.
TEST(Acceptance, C13_NormMachinery) {
  GridSpec spec{256, 8};
  auto bank = build_lp_filters(spec);
  Rng rng(99);
  Grid2Field f = random_band_limited(spec, 60, rng);
  Grid2Field sum(spec);
  for (int j = 0; j <= bank.j_max; ++j) sum += band_apply(bank, f, j);
  double rec = (sum - f).l2() / f.l2();
  bool ok_rec = rec <= 1e-10;

  auto interval = [&](GridSpec s) {
    double lo = kInf, hi = 0;
    for (int k : {2, 3, 5, 9, 16, 28, 47, 80}) {
      auto wave = Grid2Field::mode(s, k, k / 3);
      auto rep = norm_equivalence_check(wave, 0.5, 0.5,
                                        ConeSymbol::unit_annulus(0.5),
                                        ConeSymbol::ball());
      lo = std::min(lo, rep.ratio);
      hi = std::max(hi, rep.ratio);
    }
    return std::pair<double, double>(lo, hi);
  };
  auto [lo1, hi1] = interval(GridSpec{256, 8});
  auto [lo2, hi2] = interval(GridSpec{512, 8});
  bool ok_interval = std::abs(lo2 - lo1) <= 0.1 * lo1 &&
                     std::abs(hi2 - hi1) <= 0.1 * hi1;

  auto a = ConeSymbol::ball(0.5, 1.0);
  auto b = ConeSymbol::annulus(1.0, 1.25, 1.75, 2.0);
  std::vector<double> hs;
  for (int m = 1; m <= 6; ++m) hs.push_back(std::ldexp(1.0, -m));
  GridSpec dspec{512, 8};
  Rng rng2(7);
  Grid2Field g = random_band_limited(dspec, 100, rng2);
  auto rep = disjoint_support_product_check(dspec, a, b, 1.0, hs, g);
  double exp6 = rep.local_exponent.back();
  bool ok_disjoint = exp6 >= 4.0;

  report(13, ok_rec, "LP reconstruction (relative L2)", rec, 1e-10);
  report(13, ok_interval, "norm equivalence interval stability",
         std::max(std::abs(lo2 - lo1) / lo1, std::abs(hi2 - hi1) / hi1), 0.1);
  report(13, ok_disjoint, "disjoint product local exponent by h = 2^-6", exp6,
         4.0);
  EXPECT_TRUE(ok_rec);
  EXPECT_TRUE(ok_interval);
  EXPECT_TRUE(ok_disjoint);
}

}  // namespace
