// Experiment configs and drivers behind the anosov-lab CLI: JSON config
// parsing with exhaustive validation, dispatch to the library modules, and
// deterministic CSV/JSON/SVG report writing.
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anosov/lab.hpp"

namespace anosov::cli {

using nlohmann::json;

inline const char* kToolVersion = "anosov-lab 1.0.0";

struct ExperimentConfig {
  std::string kind;
  IMat2 matrix{2, 1, 1, 1};
  double eps = 0.0;
  TrigPolyVec2 bump;
  TrigPoly2 roof;          // empty means the unit roof
  GridSpec grid{64, 8};
  uint64_t seed = 1;
  std::string out_dir = "out";
  json params;             // kind-specific knobs (already validated)
  json raw;                // canonical config (hashed into the manifest)
};

// ---------------------------------------------------------------------------
// Validation: every violation is reported, not just the first.
// ---------------------------------------------------------------------------

inline const std::set<std::string>& known_kinds() {
  static const std::set<std::string> k{
      "norms",   "livsic",    "threshold",         "source-sweep",
      "propagation", "foliation", "mls",           "stretch-stability",
      "conformal"};
  return k;
}

inline TrigPoly2 parse_trig(const json& arr, std::vector<std::string>& errors,
                            const std::string& where) {
  TrigPoly2 p;
  if (!arr.is_array()) {
    errors.push_back(where + ": expected an array of modes");
    return p;
  }
  for (const auto& m : arr) {
    if (!m.is_object() || !m.contains("k") || !m.contains("amp")) {
      errors.push_back(where + ": each mode needs \"k\": [k0,k1], \"amp\"");
      continue;
    }
    auto k = m["k"];
    if (!k.is_array() || k.size() != 2) {
      errors.push_back(where + ": \"k\" must be [k0, k1]");
      continue;
    }
    double phase = m.value("phase", 0.0);
    p.add_real_cos(k[0].get<int>(), k[1].get<int>(), m["amp"].get<double>(),
                   phase);
  }
  return p;
}

inline ExperimentConfig validate_config(const json& j,
                                        std::vector<std::string>& errors) {
  ExperimentConfig cfg;
  cfg.raw = j;
  static const std::set<std::string> allowed{
      "version", "kind", "system", "grid", "seed", "out_dir", "params"};
  if (!j.is_object()) {
    errors.push_back("config: top level must be an object");
    return cfg;
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      errors.push_back("config: unknown key \"" + it.key() + "\"");
  if (j.value("version", 1) != 1)
    errors.push_back("version: only schema version 1 is supported");
  cfg.kind = j.value("kind", "");
  if (!known_kinds().count(cfg.kind))
    errors.push_back("kind: \"" + cfg.kind + "\" is not a known experiment");
  if (j.contains("system")) {
    const auto& s = j["system"];
    static const std::set<std::string> sys_keys{"matrix", "eps", "bump",
                                                "roof", "group"};
    for (auto it = s.begin(); it != s.end(); ++it)
      if (!sys_keys.count(it.key()))
        errors.push_back("system: unknown key \"" + it.key() + "\"");
    if (s.contains("matrix")) {
      auto m = s["matrix"];
      if (!m.is_array() || m.size() != 2 || !m[0].is_array() ||
          m[0].size() != 2 || m[1].size() != 2) {
        errors.push_back("system.matrix: expected [[a,b],[c,d]]");
      } else {
        cfg.matrix = IMat2{m[0][0].get<long long>(), m[0][1].get<long long>(),
                           m[1][0].get<long long>(), m[1][1].get<long long>()};
        if (std::llabs(cfg.matrix.det()) != 1)
          errors.push_back("system.matrix: |det| must be 1");
        else if (std::llabs(cfg.matrix.trace()) <= 2)
          errors.push_back("system.matrix: |trace| <= 2 is not hyperbolic");
      }
    }
    cfg.eps = s.value("eps", 0.0);
    if (cfg.eps < 0) errors.push_back("system.eps: must be >= 0");
    if (s.contains("bump")) {
      const auto& b = s["bump"];
      if (b.contains("x")) cfg.bump.px = parse_trig(b["x"], errors, "system.bump.x");
      if (b.contains("y")) cfg.bump.py = parse_trig(b["y"], errors, "system.bump.y");
    }
    if (s.contains("roof")) cfg.roof = parse_trig(s["roof"], errors, "system.roof");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.grid.n_side = g.value("n_side", 64);
    cfg.grid.n_s = g.value("n_s", 8);
    if (cfg.grid.n_side < 8 || !detail::is_pow2(size_t(cfg.grid.n_side)))
      errors.push_back("grid.n_side: must be a power of two >= 8");
    if (cfg.grid.n_s < 4) errors.push_back("grid.n_s: must be >= 4");
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  cfg.out_dir = j.value("out_dir", "out");
  cfg.params = j.value("params", json::object());
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::vector<std::string>& errors) {
  std::ifstream in(path);
  if (!in) {
    errors.push_back("config file not readable: " + path);
    return {};
  }
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    errors.push_back(std::string("config JSON parse error: ") + e.what());
    return {};
  }
  return validate_config(j, errors);
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

struct RunContext {
  ExperimentConfig cfg;
  std::string out_dir;
  int jobs = 1;
  bool plots = false;
  RunManifest manifest;
  json summary;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
  void emit(const std::string& name, const std::string& content) {
    write_file(path(name), content);
    manifest.outputs.push_back(name);
  }
  void check(const std::string& name, bool pass, double value,
             double threshold) {
    manifest.checks.push_back({name, pass, value, threshold});
  }
};

inline json system_spec_json(const ExperimentConfig& cfg) {
  json s;
  s["matrix"] = {{cfg.matrix.a, cfg.matrix.b}, {cfg.matrix.c, cfg.matrix.d}};
  s["eps"] = cfg.eps;
  auto modes_json = [](const TrigPoly2& p) {
    json arr = json::array();
    for (const auto& m : p.modes)
      arr.push_back({{"k", {m.k0, m.k1}}, {"re", m.c.real()}, {"im", m.c.imag()}});
    return arr;
  };
  s["bump_x"] = modes_json(cfg.bump.px);
  s["bump_y"] = modes_json(cfg.bump.py);
  s["roof"] = modes_json(cfg.roof);
  return s;
}

inline AnosovMap build_map(const ExperimentConfig& cfg) {
  auto base = cat_map_system(cfg.matrix);
  if (cfg.eps > 0) return perturbed_cat_map(base, cfg.eps, cfg.bump, 128);
  return base;
}

inline AnosovFlow build_flow(const ExperimentConfig& cfg) {
  auto base = build_map(cfg);
  if (cfg.roof.modes.empty()) return unit_suspension(base);
  return suspension_flow(base, cfg.roof);
}

// ---------------------------------------------------------------------------
// Experiment drivers
// ---------------------------------------------------------------------------

inline void run_norms(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  GridSpec spec = ctx.cfg.grid;
  auto bank = build_lp_filters(spec);
  double defect = lp_partition_defect(bank);
  ctx.check("lp_partition_defect", defect <= 1e-12, defect, 1e-12);
  ctx.summary["filter_bank"] = {
      {"n_side", spec.n_side},
      {"cutoff", {{"plateau_end", bank.cutoff.plateau_end},
                  {"support_end", bank.cutoff.support_end},
                  {"kernel", "poly4"}}},
      {"j_max", bank.j_max}};
  // reconstruction on a seeded random field
  Rng rng(ctx.cfg.seed);
  Grid2Field f = random_band_limited(spec, spec.n_side / 4, rng);
  Grid2Field sum(spec);
  for (int j = 0; j <= bank.j_max; ++j) sum += band_apply(bank, f, j);
  double rec = (sum - f).l2() / f.l2();
  ctx.check("lp_reconstruction_rel_l2", rec <= 1e-10, rec, 1e-10);
  // norm equivalence across a plane-wave family
  double lo = kInf, hi = 0;
  CsvWriter eq({"k", "norm_dyadic", "norm_hz", "ratio"});
  for (int k : {2, 3, 5, 9, 16, 28, 47, 80}) {
    if (k >= spec.n_side / 2) continue;
    auto wave = Grid2Field::mode(spec, k, k / 3);
    auto rep = norm_equivalence_check(wave, p.value("s", 0.5), 0.5,
                                      ConeSymbol::unit_annulus(0.5),
                                      ConeSymbol::ball());
    lo = std::min(lo, rep.ratio);
    hi = std::max(hi, rep.ratio);
    eq.row({std::to_string(k), fmt_double(rep.norm_a), fmt_double(rep.norm_b),
            fmt_double(rep.ratio)});
  }
  ctx.emit("norm_equivalence.csv", eq.str());
  ctx.summary["equivalence_ratio_interval"] = {lo, hi};
  // disjoint-support product sweep
  auto a = ConeSymbol::ball(0.5, 1.0);
  auto b = ConeSymbol::annulus(1.0, 1.25, 1.75, 2.0);
  std::vector<double> hs;
  for (int m = 1; m <= p.value("disjoint_h_steps", 6); ++m)
    hs.push_back(std::ldexp(1.0, -m));
  Rng r2 = rng.split(1);
  Grid2Field g = random_band_limited(spec, spec.n_side / 4, r2);
  auto rep = disjoint_support_product_check(spec, a, b, 1.0, hs, g);
  CsvWriter dj({"h", "residual", "disjoint", "local_exponent"});
  double exp_at_6 = 0;
  for (size_t i = 0; i < hs.size(); ++i) {
    dj.row({fmt_double(hs[i]), fmt_double(rep.residual[i]),
            rep.disjoint[i] ? "1" : "0", fmt_double(rep.local_exponent[i])});
    if (std::abs(hs[i] - 1.0 / 64) < 1e-12) exp_at_6 = rep.local_exponent[i];
  }
  ctx.emit("disjoint_product.csv", dj.str());
  ctx.check("disjoint_local_exponent_at_2^-6", exp_at_6 >= 4.0, exp_at_6, 4.0);
}

inline void run_livsic(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  GridSpec spec = ctx.cfg.grid;
  auto map = build_map(ctx.cfg);
  int n_samples = p.value("n_samples", 100);
  int k_max = p.value("field_k_max", 5);
  double tol = p.value("tol_recover", 1e-10);
  auto orbits = enumerate_periodic_orbits(map, p.value("orbit_P", 6));
  Rng root(ctx.cfg.seed);
  CsvWriter csv({"sample", "residual", "recover_error", "obstruction"});
  double worst = 0;
  IMat2 B = map.matrix().transpose();
  for (int s = 0; s < n_samples; ++s) {
    Rng rs = root.split(s);
    TrigPoly2 u0;
    for (int t = 0; t < 6; ++t) {
      int k0 = rs.uniform_int(-k_max, k_max), k1 = rs.uniform_int(-k_max, k_max);
      if (k0 == 0 && k1 == 0) k0 = 1;
      u0.add_real_cos(k0, k1, rs.normal(), rs.uniform(0, kTwoPi));
    }
    TrigPoly2 F;
    for (const auto& m : u0.modes) {
      F.modes.push_back({int(B.a * m.k0 + B.b * m.k1),
                         int(B.c * m.k0 + B.d * m.k1), m.c});
      F.modes.push_back({m.k0, m.k1, -m.c});
    }
    auto Fg = Grid2Field::from_trig(spec, F);
    auto sol = livsic_solve(map, Fg);
    auto want = Grid2Field::from_trig(spec, u0);
    Grid2Field diff = sol.u - want;
    cplx mean = diff.coeff(0, 0);
    double err = (diff - Grid2Field::mode(spec, 0, 0) * mean).max_abs();
    double obs = obstruction_check(Fg, orbits);
    worst = std::max(worst, err);
    csv.row({std::to_string(s), fmt_double(sol.residual), fmt_double(err),
             fmt_double(obs)});
  }
  ctx.emit("livsic_recovery.csv", csv.str());
  ctx.check("max_recover_error", worst <= tol, worst, tol);
  // band-decay profile of the last solved u (the bootstrap observable)
  {
    Rng rs = root.split(n_samples - 1);
    TrigPoly2 u0;
    for (int t = 0; t < 6; ++t) {
      int k0 = rs.uniform_int(-k_max, k_max), k1 = rs.uniform_int(-k_max, k_max);
      if (k0 == 0 && k1 == 0) k0 = 1;
      u0.add_real_cos(k0, k1, rs.normal(), rs.uniform(0, kTwoPi));
    }
    TrigPoly2 F;
    for (const auto& m : u0.modes) {
      F.modes.push_back({int(B.a * m.k0 + B.b * m.k1),
                         int(B.c * m.k0 + B.d * m.k1), m.c});
      F.modes.push_back({m.k0, m.k1, -m.c});
    }
    auto sol = livsic_solve(map, Grid2Field::from_trig(spec, F));
    auto prof = regularity_profile(sol.u);
    CsvWriter band({"j", "b_j"});
    for (size_t j = 0; j < prof.band_sups.size(); ++j)
      band.row({std::to_string(j), fmt_double(prof.band_sups[j])});
    ctx.emit("band_decay.csv", band.str());
    ctx.summary["alpha_hat"] = prof.alpha_defined ? prof.alpha_hat : 0.0;
    if (ctx.plots) {
      SvgPlot plot;
      plot.title = "band decay of the Livsic solution";
      plot.x_label = "j";
      plot.y_label = "b_j";
      plot.log2_y = true;
      SvgSeries ser;
      ser.label = "b_j";
      for (size_t j = 0; j < prof.band_sups.size(); ++j)
        if (prof.band_sups[j] > 0) {
          ser.x.push_back(double(j));
          ser.y.push_back(prof.band_sups[j]);
        }
      plot.series.push_back(ser);
      ctx.emit("band_decay.svg", plot.render());
    }
  }
}

inline void run_threshold(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  auto flow = build_flow(ctx.cfg);
  int P = p.value("P", 12);
  auto orbits = enumerate_periodic_orbits(flow.base, P);
  CocycleWeight weight = CocycleWeight::none();
  if (p.contains("weight")) {
    std::vector<std::string> errs;
    TrigPoly2 v = parse_trig(p["weight"], errs, "params.weight");
    if (p.value("weight_const", 0.0) != 0.0)
      v.modes.push_back({0, 0, cplx(p["weight_const"].get<double>(), 0)});
    weight = CocycleWeight::scalar(v);
  } else if (p.value("weight_const", 0.0) != 0.0) {
    TrigPoly2 v;
    v.modes.push_back({0, 0, cplx(p["weight_const"].get<double>(), 0)});
    weight = CocycleWeight::scalar(v);
  }
  auto rep = forward_threshold(flow, weight, orbits, P,
                               p.value("rho_step", 1.0 / 64));
  CsvWriter tab({"orbit_id", "period_steps", "flow_period", "weight_rate",
                 "expansion_rate"});
  for (const auto& r : rep.table)
    tab.row({r.orbit_id, std::to_string(r.period_steps),
             fmt_double(r.flow_period), fmt_double(r.weight_rate),
             fmt_double(r.expansion_rate)});
  ctx.emit("orbit_rates.csv", tab.str());
  ctx.summary["omega_plus"] = rep.omega_plus;
  ctx.summary["omega_minus"] = rep.omega_minus;
  ctx.summary["rho_step"] = rep.rho_step;
  if (!weight.trivial() && p.value("doubling", true)) {
    SubadditiveSpec sub;
    sub.kind = SubadditiveSpec::Kind::birkhoff;
    sub.v = weight.field;
    auto conv = subadditive_limit(sub, flow.base, orbits,
                                  p.value("m_max", 10), 128, P);
    CsvWriter dv({"m", "doubling_value"});
    for (size_t m = 0; m < conv.doubling_values.size(); ++m)
      dv.row({std::to_string(m + 1), fmt_double(conv.doubling_values[m])});
    ctx.emit("doubling.csv", dv.str());
    ctx.summary["doubling_last"] = conv.doubling_values.back();
    ctx.summary["orbit_max"] = conv.orbit_max;
    double rel = std::abs(conv.gap) /
                 std::max(std::abs(conv.orbit_max), 1e-30);
    ctx.check("doubling_vs_orbit_max", rel <= 0.01, rel, 0.01);
  }
  if (!weight.trivial() && p.value("sobolev", false)) {
    auto l2 =
        sobolev_threshold_integral(flow, weight.field, p.value("T_max", 12),
                                   128, 8, p.value("rho_step", 1.0 / 64));
    ctx.summary["omega_l2"] = l2.omega_l2;
    ctx.summary["integral_rate"] = l2.integral_rate;
    ctx.check("omega_l2_below_omega_plus", l2.omega_l2 <= rep.omega_plus + 1e-12,
              l2.omega_l2, rep.omega_plus);
  }
  if (p.contains("expect_omega_plus")) {
    double want = p["expect_omega_plus"].get<double>();
    double got = rep.omega_plus;
    ctx.check("omega_plus_expected", std::abs(got - want) <= rep.rho_step + 1e-12,
              got, want);
  }
  if (ctx.plots) {
    // bisection plot: max orbit rate as a function of rho
    SvgPlot plot;
    plot.title = "threshold bisection";
    plot.x_label = "rho";
    plot.y_label = "max orbit rate";
    SvgSeries s;
    s.label = "max orbit rate";
    for (double rho = 0; rho <= rep.omega_plus + 0.5; rho += rep.rho_step) {
      double mx = -kInf;
      for (const auto& r : rep.table)
        mx = std::max(mx, r.weight_rate - rho * r.expansion_rate);
      s.x.push_back(rho);
      s.y.push_back(mx);
    }
    plot.series.push_back(s);
    ctx.emit("threshold_bisection.svg", plot.render());
  }
}

inline void run_source_sweep(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  auto flow = build_flow(ctx.cfg);
  GridSpec spec = ctx.cfg.grid;
  double half_angle = p.value("half_angle", 0.85);
  double h0 = p.value("h0", 0.5);
  int horizon = p.value("horizon", 6);
  auto pair = make_radial_pair(flow, half_angle, h0, horizon,
                               p.value("b_margin", 1.6));
  std::vector<double> hs;
  if (p.contains("h_list"))
    for (const auto& h : p["h_list"]) hs.push_back(h.get<double>());
  else
    for (int m = 4; m <= 7; ++m) hs.push_back(std::ldexp(1.0, -m));
  double weight_c = p.value("weight_const", 0.0);
  double omega = p.value("omega_hint",
                         weight_c > 0 ? weight_c / flow.base.log_lambda() : 0.0);
  SweepFamily family = p.value("family", std::string("random-smooth")) ==
                               std::string("resolvent")
                           ? SweepFamily::resolvent_states
                           : SweepFamily::random_smooth;
  int n_samples = p.value("n_samples", 50);
  json per_rho = json::array();
  for (const auto& rj : p.value("rho_list", json::array({0.5}))) {
    double rho = rj.get<double>();
    auto rep = source_estimate_sweep(flow, pair, rho, p.value("N", 4), hs,
                                     n_samples, ctx.cfg.seed, weight_c, spec,
                                     family, omega);
    char name[64];
    std::snprintf(name, sizeof name, "sweep_rho_%g.csv", rho);
    CsvWriter csv({"sample", "h", "lhs", "rhs", "ratio"});
    for (const auto& r : rep.rows)
      csv.row({std::to_string(r.sample), fmt_double(r.h), fmt_double(r.lhs),
               fmt_double(r.rhs), fmt_double(r.ratio)});
    ctx.emit(name, csv.str());
    json jr;
    jr["rho"] = rho;
    jr["growth_exponent"] = rep.growth_exponent;
    jr["max_ratio"] = rep.max_ratio;
    jr["divergence_expected"] = rep.divergence_expected;
    double lo = kInf, hi = 0;
    for (double m : rep.ratio_median)
      if (m > 0) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
    jr["median_spread"] = (lo < kInf && lo > 0) ? hi / lo : 0.0;
    per_rho.push_back(jr);
    double rlo = kInf, rhi = 0;
    for (double m : rep.running_sup_median)
      if (m > 0) {
        rlo = std::min(rlo, m);
        rhi = std::max(rhi, m);
      }
    jr["running_sup_spread"] = (rlo < kInf && rlo > 0) ? rhi / rlo : 0.0;
    std::string expect = p.value("expect", "");
    if (expect == "stable")
      ctx.check("stable_rho_" + std::to_string(rho),
                rlo > 0 && rhi / rlo < 2.0, rlo > 0 ? rhi / rlo : kInf, 2.0);
    else if (expect == "divergence")
      ctx.check("divergence_rho_" + std::to_string(rho),
                rep.growth_exponent >= 0.25, rep.growth_exponent, 0.25);
    if (ctx.plots) {
      SvgPlot plot;
      plot.title = "estimate ratio vs h (rho = " + std::to_string(rho) + ")";
      plot.x_label = "h";
      plot.y_label = "median ratio";
      plot.log2_x = true;
      plot.log2_y = true;
      SvgSeries s;
      s.label = "median";
      s.x = rep.h_list;
      s.y = rep.ratio_median;
      plot.series.push_back(s);
      std::snprintf(name, sizeof name, "sweep_rho_%g.svg", rho);
      ctx.emit(name, plot.render());
    }
  }
  ctx.summary["per_rho"] = per_rho;
}

inline void run_propagation(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  auto flow = build_flow(ctx.cfg);
  GridSpec spec = ctx.cfg.grid;
  Vec2 es = flow.base.estar_s_dir(), eu = flow.base.estar_u_dir();
  Vec2 mid = (es + eu).normalized();
  auto A = ConeSymbol::cone({mid.x, mid.y, 0.0}, p.value("a_angle", 0.18), 1.0,
                            kInf, 0.3);
  auto B = ConeSymbol::cone({mid.x, mid.y, 0.0}, 1.5, 0.5, kInf, 0.2);
  auto D = ConeSymbol::cone({eu.x, eu.y, 0.0}, p.value("d_angle", 0.9), 0.5,
                            kInf, 0.2);
  int T = p.value("T", 3);
  auto rep = propagation_sweep(flow, A, B, D, p.value("s", 0.5), T,
                               p.value("n_samples", 20), ctx.cfg.seed, spec);
  CsvWriter csv({"sample", "ratio"});
  for (size_t i = 0; i < rep.ratios.size(); ++i)
    csv.row({std::to_string(i), fmt_double(rep.ratios[i])});
  ctx.emit("propagation_ratios.csv", csv.str());
  ctx.summary["max_ratio"] = rep.max_ratio;
  ctx.check("ratios_finite", std::isfinite(rep.max_ratio), rep.max_ratio, 0);
}

inline void run_foliation(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  auto flow = build_flow(ctx.cfg);
  std::vector<Vec2> sample;
  Rng rng(ctx.cfg.seed);
  for (int i = 0; i < p.value("n_sample_points", 8); ++i)
    sample.push_back({rng.uniform(), rng.uniform()});
  auto lyap = lyapunov_data(flow, sample, p.value("T", 64));
  double bound = foliation_threshold(lyap, p.value("volume_preserving_3d", true));
  ctx.summary["lyapunov"] = {{"lambda_u_min", lyap.lambda_u_min},
                             {"lambda_u_max", lyap.lambda_u_max},
                             {"lambda_s_min", lyap.lambda_s_min},
                             {"lambda_s_max", lyap.lambda_s_max}};
  ctx.summary["foliation_bound"] = bound;
  if (flow.base.is_linear())
    ctx.check("foliation_bound_is_two", std::abs(bound - 2.0) <= 1e-9, bound, 2.0);
  CsvWriter csv({"n_iter", "projector_residual"});
  double prev = kInf;
  bool decreasing = true;
  for (int it : {3, 6, 12, 24}) {
    double r = projector_invariance_residual(flow.base, 6, it);
    csv.row({std::to_string(it), fmt_double(r)});
    if (r > prev + 1e-15) decreasing = false;
    prev = r;
  }
  ctx.emit("projector_residuals.csv", csv.str());
  ctx.check("projector_residual_decreasing", decreasing, prev, 0);
}

inline void run_mls(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  auto flow = build_flow(ctx.cfg);
  int P = p.value("P", 10);
  auto orbits = enumerate_periodic_orbits(flow.base, P);
  // second roof: either supplied, or the first roof perturbed by a coboundary
  TrigPoly2 roof2 = ctx.cfg.roof;
  if (roof2.modes.empty()) roof2.modes.push_back({0, 0, cplx(1, 0)});
  if (p.contains("roof_b")) {
    std::vector<std::string> errs;
    roof2 = parse_trig(p["roof_b"], errs, "params.roof_b");
  } else {
    TrigPoly2 u;
    u.add_real_cos(1, 0, 1.0, 0.3);
    IMat2 B = flow.base.matrix().transpose();
    for (const auto& m : u.modes) {
      roof2.modes.push_back({int(B.a * m.k0 + B.b * m.k1),
                             int(B.c * m.k0 + B.d * m.k1),
                             p.value("coboundary_scale", 0.05) * m.c});
      roof2.modes.push_back({m.k0, m.k1, -p.value("coboundary_scale", 0.05) * m.c});
    }
  }
  auto flow_b = suspension_flow(flow.base, roof2);
  auto table = marked_spectrum_pair(flow, flow_b, orbits, P);
  CsvWriter csv(
      {"orbit_id", "period_steps", "length_system_a", "length_system_b", "ratio"});
  double max_delta = 0;
  for (const auto& r : table.rows) {
    csv.row({r.orbit_id, std::to_string(r.period_steps), fmt_double(r.length_a),
             fmt_double(r.length_b), fmt_double(r.ratio)});
    max_delta = std::max(max_delta, std::abs(r.length_b - r.length_a));
  }
  ctx.emit("marked_spectrum.csv", csv.str());
  if (!p.contains("roof_b"))
    ctx.check("coboundary_roof_invisible", max_delta <= 1e-12, max_delta, 1e-12);
  auto rows = mls_compare(flow, flow_b, orbits, P);
  CsvWriter cmp({"orbit_id", "ratio_minus_one", "mean_stretch_minus_one",
                 "residual"});
  double worst_res = 0;
  for (const auto& r : rows) {
    cmp.row({r.orbit_id, fmt_double(r.ratio_minus_one),
             fmt_double(r.mean_stretch_minus_one), fmt_double(r.residual)});
    worst_res = std::max(worst_res, std::abs(r.residual));
  }
  ctx.emit("mls_compare.csv", cmp.str());
  ctx.check("first_order_residual_model_exact", worst_res <= 1e-12, worst_res,
            1e-12);
  // coboundary invisibility of the X-ray transform over random samples
  int n_cob = p.value("n_coboundary_samples", 100);
  Rng root(ctx.cfg.seed);
  IMat2 B = flow.base.matrix().transpose();
  double worst_xray = 0;
  for (int s = 0; s < n_cob; ++s) {
    Rng rs = root.split(s);
    TrigPoly2 u;
    for (int t = 0; t < 4; ++t) {
      int k0 = rs.uniform_int(-4, 4), k1 = rs.uniform_int(-4, 4);
      if (k0 == 0 && k1 == 0) k0 = 1;
      u.add_real_cos(k0, k1, rs.normal(), rs.uniform(0, kTwoPi));
    }
    TrigPoly2 F;
    for (const auto& m : u.modes) {
      F.modes.push_back({int(B.a * m.k0 + B.b * m.k1),
                         int(B.c * m.k0 + B.d * m.k1), m.c});
      F.modes.push_back({m.k0, m.k1, -m.c});
    }
    for (const auto& o : orbits.orbits)
      worst_xray = std::max(worst_xray, std::abs(xray(F, o)));
  }
  ctx.summary["xray_coboundary_max"] = worst_xray;
  ctx.check("xray_kills_coboundaries", worst_xray <= 1e-11, worst_xray, 1e-11);
}

inline void run_stretch_stability(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  auto map = build_map(ctx.cfg);
  int P = p.value("P", 10);
  auto orbits = enumerate_periodic_orbits(map, P);
  int n = p.value("n_samples", 20);
  double amp = p.value("amplitude", 1e-2);
  Rng root(ctx.cfg.seed);
  std::vector<TrigPoly2> family;
  for (int s = 0; s < n; ++s) {
    Rng rs = root.split(s);
    TrigPoly2 dr;
    for (int t = 0; t < 4; ++t) {
      int k0 = rs.uniform_int(-3, 3), k1 = rs.uniform_int(-3, 3);
      if (k0 == 0 && k1 == 0) k0 = 1;
      dr.add_real_cos(k0, k1, amp * rs.normal(), rs.uniform(0, kTwoPi));
    }
    family.push_back(dr);
  }
  auto rep = stability_experiment(map, family, orbits, P);
  CsvWriter csv({"sample", "residual_norm", "seminorm_lower", "ratio",
                 "skipped"});
  for (size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    csv.row({std::to_string(i), fmt_double(s.residual_norm),
             fmt_double(s.seminorm_lower), fmt_double(s.ratio),
             s.skipped ? "1" : "0"});
  }
  ctx.emit("stability.csv", csv.str());
  ctx.summary["max_ratio"] = rep.max_ratio;
  ctx.summary["skipped"] = rep.skipped;
  ctx.check("stability_ratios_finite",
            std::isfinite(rep.max_ratio) && rep.max_ratio > 0, rep.max_ratio, 0);
  if (p.value("scale_check", true)) {
    // homogeneity: the first sample rescaled by 10 gives the same ratio
    TrigPoly2 scaled = family[0];
    for (auto& m : scaled.modes) m.c *= 10.0;
    auto r2 = stability_experiment(map, {scaled}, orbits, P);
    if (!rep.samples[0].skipped && !r2.samples[0].skipped) {
      double rel = std::abs(r2.samples[0].ratio - rep.samples[0].ratio) /
                   rep.samples[0].ratio;
      ctx.check("scale_invariance_1pc", rel <= 0.01, rel, 0.01);
    }
  }
}

inline void run_conformal(RunContext& ctx) {
  const auto& p = ctx.cfg.params;
  auto group = fuchsian_bolza();
  ctx.check("bolza_relation_residual", group.relation_residual <= 1e-10,
            group.relation_residual, 1e-10);
  CurveDiscretization disc;
  disc.n_points = p.value("n_points", 256);
  disc.tol = p.value("tol", 1e-6);
  std::vector<double> eps_list;
  if (p.contains("eps_list"))
    for (const auto& e : p["eps_list"]) eps_list.push_back(e.get<double>());
  else
    eps_list = {1e-2, 5e-3, 2.5e-3};
  ConformalBump bump;
  if (p.contains("bump")) {
    const auto& b = p["bump"];
    bump.center = hpt(b.value("x", 0.05), b.value("y", 1.1));
    bump.radius = b.value("radius", 0.8);
    bump.amplitude = b.value("amplitude", 0.5);
    bump.constant = b.value("constant", false);
  }
  ConformalFactor sigma(group, bump);
  Rng rng(ctx.cfg.seed);
  double eqres = bump.constant ? 0.0 : sigma.equivariance_residual(rng);
  ctx.check("sigma_equivariance", eqres <= 1e-9, eqres, 1e-9);
  std::vector<std::vector<int>> words{{0}};
  if (p.contains("words")) {
    words.clear();
    for (const auto& w : p["words"]) {
      std::vector<int> word;
      for (const auto& g : w) word.push_back(g.get<int>());
      words.push_back(word);
    }
  }
  CsvWriter csv({"word", "eps", "remainder", "slope", "L0"});
  for (const auto& w : words) {
    auto row = conformal_linearization_word(group, sigma, w, eps_list, disc);
    for (size_t i = 0; i < row.eps.size(); ++i)
      csv.row({row.word, fmt_double(row.eps[i]), fmt_double(row.remainder[i]),
               fmt_double(row.slope), fmt_double(row.L0)});
    double lo = p.value("slope_lo", 1.8), hi = p.value("slope_hi", 2.2);
    ctx.check("slope_word_" + row.word, row.slope >= lo && row.slope <= hi,
              row.slope, lo);
    if (w == std::vector<int>{0}) {
      double L0 = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
      ctx.check("systole_length", std::abs(row.L0 - L0) <= 1e-6, row.L0, L0);
    }
    if (ctx.plots) {
      SvgPlot plot;
      plot.title = "conformal remainder (word " + row.word + ")";
      plot.x_label = "eps";
      plot.y_label = "|R|";
      plot.log2_x = true;
      plot.log2_y = true;
      SvgSeries s;
      s.label = "remainder";
      s.x = row.eps;
      for (double r : row.remainder) s.y.push_back(std::abs(r));
      plot.series.push_back(s);
      ctx.emit("conformal_" + row.word + "svg.svg", plot.render());
    }
  }
  ctx.emit("conformal_slopes.csv", csv.str());
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline int run_experiment(RunContext& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  ctx.manifest.config_hash = hex64(fnv1a64(ctx.cfg.raw.dump()));
  ctx.manifest.tool_version = kToolVersion;
  ctx.manifest.seed = ctx.cfg.seed;
  ctx.summary["kind"] = ctx.cfg.kind;
  ctx.summary["system"] = system_spec_json(ctx.cfg);
  bool ok = true;
  try {
    if (ctx.cfg.kind == "norms")
      run_norms(ctx);
    else if (ctx.cfg.kind == "livsic")
      run_livsic(ctx);
    else if (ctx.cfg.kind == "threshold")
      run_threshold(ctx);
    else if (ctx.cfg.kind == "source-sweep")
      run_source_sweep(ctx);
    else if (ctx.cfg.kind == "propagation")
      run_propagation(ctx);
    else if (ctx.cfg.kind == "foliation")
      run_foliation(ctx);
    else if (ctx.cfg.kind == "mls")
      run_mls(ctx);
    else if (ctx.cfg.kind == "stretch-stability")
      run_stretch_stability(ctx);
    else if (ctx.cfg.kind == "conformal")
      run_conformal(ctx);
    else
      throw ConfigError("unknown experiment kind: " + ctx.cfg.kind);
  } catch (const std::exception& e) {
    // partial outputs are removed on failure
    for (const auto& f : ctx.manifest.outputs)
      std::filesystem::remove(ctx.path(f));
    std::fprintf(stderr, "error [%s]: %s\n", ctx.cfg.kind.c_str(), e.what());
    return 2;
  }
  auto t1 = std::chrono::steady_clock::now();
  ctx.manifest.wall_seconds =
      std::chrono::duration<double>(t1 - t0).count();
  json man;
  man["config_hash"] = ctx.manifest.config_hash;
  man["tool_version"] = ctx.manifest.tool_version;
  man["seed"] = ctx.manifest.seed;
  man["wall_seconds"] = ctx.manifest.wall_seconds;
  man["outputs"] = ctx.manifest.outputs;
  json checks = json::array();
  for (const auto& c : ctx.manifest.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"value", c.value},
                      {"threshold", c.threshold}});
    if (!c.pass) ok = false;
    std::printf("[%s] %s: value=%.6g threshold=%.6g\n",
                c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.threshold);
  }
  man["checks"] = checks;
  write_file(ctx.path("summary.json"), ctx.summary.dump(2) + "\n");
  write_file(ctx.path("manifest.json"), man.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace anosov::cli
