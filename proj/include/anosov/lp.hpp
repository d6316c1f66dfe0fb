// Littlewood-Paley banks, Holder-Zygmund norms, cone multipliers, and the
// multiplier-calculus checks (norm equivalence, scale comparison, L^inf
// boundedness, disjoint-support products) on T^2 and on mapping-torus charts.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "anosov/core.hpp"
#include "anosov/cutoff.hpp"
#include "anosov/grid.hpp"

namespace anosov {

// ---------------------------------------------------------------------------
// Dyadic filter bank. Bands are evaluated on demand from the cutoff profile;
// only the generating parameters are stored (and serialized).
// ---------------------------------------------------------------------------

struct LPFilterBank {
  GridSpec spec;
  CutoffSpec cutoff;
  int j_max = 0;

  static int bands_for(double xi_max, const CutoffSpec& c) {
    int j = 0;
    while (std::ldexp(xi_max, -j) > c.plateau_end) ++j;
    return j;
  }
  double phi(int j, double r) const { return cutoff.phi(j, r); }
};

inline LPFilterBank build_lp_filters(GridSpec spec, CutoffSpec cutoff = {}) {
  spec.validate();
  cutoff.validate();
  double xi_max = kTwoPi * (spec.n_side / 2) * std::sqrt(2.0);
  LPFilterBank bank{spec, cutoff, LPFilterBank::bands_for(xi_max, cutoff)};
  if (bank.j_max < 1)
    throw ConfigError("build_lp_filters: grid too small to hold the j=1 band");
  return bank;
}

// Partition-of-unity defect max over the frequency lattice.
inline double lp_partition_defect(const LPFilterBank& bank) {
  int n = bank.spec.n_side;
  double worst = 0;
  for (int ik = 0; ik < n; ++ik) {
    int k0 = fft_index_to_k(ik, n);
    for (int jk = 0; jk < n; ++jk) {
      int k1 = fft_index_to_k(jk, n);
      double r = kTwoPi * std::hypot(double(k0), double(k1));
      double s = 0;
      for (int j = 0; j <= bank.j_max; ++j) s += bank.phi(j, r);
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return worst;
}

inline Grid2Field band_apply(const LPFilterBank& bank, const Grid2Field& f,
                             int j) {
  return f.multiplier([&](int k0, int k1) {
    return bank.phi(j, kTwoPi * std::hypot(double(k0), double(k1)));
  });
}

// Per-band sup norms b_j = ||Op(phi_j) f||_inf.
inline std::vector<double> band_sups(const LPFilterBank& bank,
                                     const Grid2Field& f) {
  std::vector<double> b(bank.j_max + 1);
  for (int j = 0; j <= bank.j_max; ++j) b[j] = band_apply(bank, f, j).max_abs();
  return b;
}

inline double hz_norm_from_sups(const std::vector<double>& b, double s) {
  double m = 0;
  for (size_t j = 0; j < b.size(); ++j)
    m = std::max(m, b[j] * std::pow(2.0, s * double(j)));
  return m;
}

inline double hz_norm(const Grid2Field& f, double s, CutoffSpec cutoff = {}) {
  auto bank = build_lp_filters(f.spec(), cutoff);
  return hz_norm_from_sups(band_sups(bank, f), s);
}

// ---------------------------------------------------------------------------
// Cone / annulus / ball symbols. A symbol is an angular profile around a
// center covector line times a radial profile; both are mollified steps with
// explicit edges, so the value is 1 strictly inside the shrunk region and 0
// outside the stated one.
// ---------------------------------------------------------------------------

struct ConeSymbol {
  std::array<double, 3> center{1, 0, 0};  // unit covector (line through 0)
  double angle_plateau = kPi / 2;         // <= angle_support
  double angle_support = kPi / 2;         // pi/2 disables angular localization
  // radial edges in |xi| units; value 1 on [r_lo_in, r_hi_in], 0 outside
  // (r_lo_out, r_hi_out); r_lo_out = 0 or r_hi_out = inf disable an edge.
  double r_lo_out = 0, r_lo_in = 0;
  double r_hi_in = kInf, r_hi_out = kInf;

  static ConeSymbol cone(std::array<double, 3> dir, double half_angle,
                         double r_lo, double r_hi, double smoothing = 0.25) {
    ConeSymbol s;
    double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    s.center = {dir[0] / n, dir[1] / n, dir[2] / n};
    s.angle_support = half_angle;
    s.angle_plateau = half_angle * (1.0 - smoothing);
    if (r_lo > 0) {
      s.r_lo_out = r_lo;
      s.r_lo_in = r_lo * (1.0 + smoothing);
    }
    if (std::isfinite(r_hi)) {
      s.r_hi_out = r_hi;
      s.r_hi_in = r_hi * (1.0 - smoothing);
    }
    return s;
  }
  static ConeSymbol cone2(Vec2 dir, double half_angle, double r_lo, double r_hi,
                          double smoothing = 0.25) {
    return cone({dir.x, dir.y, 0.0}, half_angle, r_lo, r_hi, smoothing);
  }
  // ball: 1 on |xi| <= plateau, 0 beyond support (Psi of the norm lemma)
  static ConeSymbol ball(double plateau = 2.0, double support = 3.0) {
    ConeSymbol s;
    s.r_hi_in = plateau;
    s.r_hi_out = support;
    return s;
  }
  // annulus around |xi|=1 (Phi of the norm lemma):
  // supported in {1/(1+eps) < |xi| < 1+eps}, equal 1 on the eps/2 version
  static ConeSymbol unit_annulus(double eps = 0.5) {
    ConeSymbol s;
    s.r_lo_out = 1.0 / (1.0 + eps);
    s.r_lo_in = 1.0 / (1.0 + eps / 2);
    s.r_hi_in = 1.0 + eps / 2;
    s.r_hi_out = 1.0 + eps;
    return s;
  }
  static ConeSymbol annulus(double lo_out, double lo_in, double hi_in,
                            double hi_out) {
    ConeSymbol s;
    s.r_lo_out = lo_out;
    s.r_lo_in = lo_in;
    s.r_hi_in = hi_in;
    s.r_hi_out = hi_out;
    return s;
  }

  bool radial_only() const { return angle_support >= kPi / 2; }

  double eval(double x0, double x1, double x2 = 0) const {
    double r = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
    double radial = 1.0;
    if (r_lo_out > 0) {
      if (r <= r_lo_out) return 0;
      if (r < r_lo_in)
        radial *= poly_kernel_cdf((2 * r - (r_lo_out + r_lo_in)) /
                                  (r_lo_in - r_lo_out));
    }
    if (std::isfinite(r_hi_out)) {
      if (r >= r_hi_out) return 0;
      if (r > r_hi_in)
        radial *= 1.0 - poly_kernel_cdf((2 * r - (r_hi_in + r_hi_out)) /
                                        (r_hi_out - r_hi_in));
    }
    if (radial_only() || r == 0) return radial;
    double ca = std::abs(x0 * center[0] + x1 * center[1] + x2 * center[2]) / r;
    ca = std::min(ca, 1.0);
    double ang = std::acos(ca);
    if (ang >= angle_support) return 0;
    double angular = 1.0;
    if (ang > angle_plateau)
      angular = 1.0 - poly_kernel_cdf((2 * ang - (angle_plateau + angle_support)) /
                                      (angle_support - angle_plateau));
    return radial * angular;
  }
};

// Op_h(sym): Fourier coefficients multiplied by sym(h * 2 pi k).
inline Grid2Field band_filter_apply(const Grid2Field& f, const ConeSymbol& sym,
                                    double h) {
  if (!(h > 0 && h <= 1)) throw ConfigError("band_filter_apply: h in (0,1]");
  return f.multiplier([&](int k0, int k1) {
    return sym.eval(h * kTwoPi * k0, h * kTwoPi * k1, 0.0);
  });
}

// ---------------------------------------------------------------------------
// Mapping-torus charts: a fixed two-chart atlas. Chart 0 covers s in
// (0.1, 0.9) untwisted; chart 1 covers s in (0.6, 1.4) (local coordinate
// sigma = s - 1/2, with the A-twist applied past the seam). The windows are
// complementary mollified steps summing to 1, so gluing with symbol == 1
// reproduces the field exactly.
// ---------------------------------------------------------------------------

struct ChartAtlas {
  GridSpec spec;
  IMat2 twist;
  SmoothWindow window{0.1, 0.4, 0.6, 0.9};

  void validate() const {
    spec.validate();
    if (spec.n_s % 2 != 0 || spec.n_s < 8)
      throw ConfigError("ChartAtlas: n_s must be even and >= 8 for the chart overlap");
  }

  // patch layout: [m][i][j], m slice index in chart coordinates
  std::vector<cplx> extract(const MappingTorusField& u, int chart) const {
    int n = spec.n_side, ns = spec.n_s;
    std::vector<cplx> p(size_t(ns) * n * n, cplx(0));
    int off = chart * ns / 2;
    for (int m = 0; m < ns; ++m) {
      double w = window(double(m) / ns);
      if (w == 0) continue;
      Grid2Field sl = u.twisted_slice(m + off);
      const auto& v = sl.values();
      for (size_t t = 0; t < v.size(); ++t)
        p[size_t(m) * n * n + t] = w * v[t];
    }
    return p;
  }

  void fft3(std::vector<cplx>& p, bool inverse) const {
    int n = spec.n_side, ns = spec.n_s;
    fft_axis(p, ns, size_t(n) * n, 1, inverse);       // s axis
    fft_axis(p, n, n, ns, inverse);                   // x axis
    fft_axis(p, n, 1, size_t(ns) * n, inverse);       // y axis
    if (!inverse) {
      double norm = 1.0 / (double(ns) * n * n);
      for (auto& c : p) c *= norm;
    }
  }

  // multiplier on a patch given in value space; q(xi0, xi1, xi_s)
  void apply_multiplier(std::vector<cplx>& p,
                        const std::function<double(double, double, double)>& q)
      const {
    int n = spec.n_side, ns = spec.n_s;
    fft3(p, false);
    for (int m = 0; m < ns; ++m) {
      double ks = fft_index_to_k(m, ns);
      for (int i = 0; i < n; ++i) {
        double k0 = fft_index_to_k(i, n);
        for (int j = 0; j < n; ++j) {
          double k1 = fft_index_to_k(j, n);
          p[(size_t(m) * n + i) * n + j] *=
              q(kTwoPi * k0, kTwoPi * k1, kTwoPi * ks);
        }
      }
    }
    fft3(p, true);
  }

  double patch_max_abs(const std::vector<cplx>& p) const {
    double mx = 0;
    for (const auto& c : p) mx = std::max(mx, std::abs(c));
    return mx;
  }

  // Glue chart results back onto slices: global slice j receives, from chart
  // c, the patch value at m = j - c*ns/2 (mod ns), undoing the twist when the
  // chart coordinate wrapped past the seam.
  MappingTorusField glue(const std::vector<std::vector<cplx>>& patches) const {
    int n = spec.n_side, ns = spec.n_s;
    MappingTorusField out(spec, twist);
    for (int c = 0; c < 2; ++c) {
      int off = c * ns / 2;
      for (int m = 0; m < ns; ++m) {
        int jg = m + off;  // global slice index, possibly >= ns (wrapped)
        int wrap = jg / ns;
        int j = jg % ns;
        std::vector<cplx> vals(size_t(n) * n);
        for (size_t t = 0; t < vals.size(); ++t)
          vals[t] = patches[c][size_t(m) * n * n + t];
        Grid2Field g = Grid2Field::from_values(spec, std::move(vals));
        if (wrap > 0) g = g.compose_int(twist.inverse_unimodular().pow(wrap));
        out.slice(j) += g;
      }
    }
    return out;
  }

  // Chartwise quantization of a symbol at scale h.
  MappingTorusField op(const MappingTorusField& u, const ConeSymbol& sym,
                       double h) const {
    std::vector<std::vector<cplx>> patches(2);
    for (int c = 0; c < 2; ++c) {
      patches[c] = extract(u, c);
      apply_multiplier(patches[c], [&](double a, double b, double s) {
        return sym.eval(h * a, h * b, h * s);
      });
    }
    return glue(patches);
  }

  // Spectral d/ds on the patches glued back: X u for the suspension generator.
  MappingTorusField d_ds(const MappingTorusField& u) const {
    int n = spec.n_side, ns = spec.n_s;
    std::vector<std::vector<cplx>> patches(2);
    for (int c = 0; c < 2; ++c) {
      patches[c] = extract(u, c);
      auto& p = patches[c];
      fft3(p, false);
      for (int m = 0; m < ns; ++m) {
        double ks = fft_index_to_k(m, ns);
        cplx factor(0.0, kTwoPi * ks);
        for (size_t t = 0; t < size_t(n) * n; ++t)
          p[size_t(m) * n * n + t] *= factor;
      }
      fft3(p, true);
    }
    return glue(patches);
  }
};

// Per-band sups of the chartwise 3D decomposition (max over the two charts).
inline std::vector<double> band_sups_torus3(const ChartAtlas& atlas,
                                            const MappingTorusField& f,
                                            CutoffSpec cutoff = {}) {
  atlas.validate();
  int n = atlas.spec.n_side, ns = atlas.spec.n_s;
  double xi_max = kTwoPi * std::sqrt(2.0 * (n / 2.0) * (n / 2.0) +
                                     (ns / 2.0) * (ns / 2.0));
  int jmax = LPFilterBank::bands_for(xi_max, cutoff);
  std::vector<double> b(jmax + 1, 0.0);
  for (int c = 0; c < 2; ++c) {
    auto patch = atlas.extract(f, c);
    atlas.fft3(patch, false);
    for (int j = 0; j <= jmax; ++j) {
      auto banded = patch;
      for (int m = 0; m < ns; ++m) {
        double ks = fft_index_to_k(m, ns);
        for (int i = 0; i < n; ++i) {
          double k0 = fft_index_to_k(i, n);
          for (int jj = 0; jj < n; ++jj) {
            double k1 = fft_index_to_k(jj, n);
            double r = kTwoPi * std::sqrt(k0 * k0 + k1 * k1 + ks * ks);
            banded[(size_t(m) * n + i) * n + jj] *= cutoff.phi(j, r);
          }
        }
      }
      atlas.fft3(banded, true);
      b[j] = std::max(b[j], atlas.patch_max_abs(banded));
    }
  }
  return b;
}

inline double hz_norm_torus3(const ChartAtlas& atlas,
                             const MappingTorusField& f, double s,
                             CutoffSpec cutoff = {}) {
  return hz_norm_from_sups(band_sups_torus3(atlas, f, cutoff), s);
}

// ---------------------------------------------------------------------------
// Norm equivalence (dyadic h-sampled semiclassical norm vs dyadic band norm)
// ---------------------------------------------------------------------------

struct EquivReport {
  double norm_a = 0;  // || . ||_{s, h0, Phi, Psi} over the dyadic h sample
  double norm_b = 0;  // hz_norm
  double ratio = 0;
  std::vector<double> h_samples;
};

inline EquivReport norm_equivalence_check(const Grid2Field& f, double s,
                                          double h0, const ConeSymbol& phi_ann,
                                          const ConeSymbol& psi_ball,
                                          int dyadic_steps = 0,
                                          CutoffSpec cutoff = {}) {
  if (!(h0 > 0 && h0 <= 1)) throw ConfigError("norm_equivalence_check: h0 in (0,1]");
  int n = f.spec().n_side;
  if (dyadic_steps <= 0) {
    // sample until the annulus at scale h passes the grid Nyquist
    double xi_max = kTwoPi * (n / 2.0);
    dyadic_steps = std::max(1, int(std::floor(std::log2(h0 * xi_max))));
  }
  EquivReport rep;
  double low = band_filter_apply(f, psi_ball, h0).max_abs();
  double sup = 0;
  for (int m = 1; m <= dyadic_steps; ++m) {
    double h = std::ldexp(h0, -m);
    rep.h_samples.push_back(h);
    double v = band_filter_apply(f, phi_ann, h).max_abs();
    sup = std::max(sup, std::pow(h, -s) * v);
  }
  if (rep.h_samples.empty())
    throw ConfigError("norm_equivalence_check: empty h sample");
  rep.norm_a = low + sup;
  rep.norm_b = hz_norm(f, s, cutoff);
  rep.ratio = rep.norm_b > 0 ? rep.norm_a / rep.norm_b
                             : (rep.norm_a > 0 ? kInf : 1.0);
  return rep;
}

// ---------------------------------------------------------------------------
// Scale comparison between C^rho and C^rho' through Op_h(b)
// ---------------------------------------------------------------------------

struct ScaleComparison {
  double lhs = 0;
  double rhs_main = 0;  // h^{rho'-rho} || Op_h(b) f ||_{C^rho'} (or converse)
  double rhs_low = 0;   // h^N || f ||_{C^-N}
  double ratio = 0;     // lhs / (rhs_main + rhs_low): the constant to fit
  bool first_form = true;
};

inline ScaleComparison scale_comparison_check(const Grid2Field& f, double rho,
                                              double rho_p, double h,
                                              const ConeSymbol& b, int N = 4,
                                              CutoffSpec cutoff = {}) {
  if (!(rho_p > rho)) throw ConfigError("scale_comparison_check: need rho' > rho");
  ScaleComparison r;
  bool high_pass = b.r_lo_out >= 0.5;
  bool low_pass = std::isfinite(b.r_hi_out) && b.r_hi_out <= 2.0 && b.r_lo_out == 0;
  if (!high_pass && !low_pass)
    throw ConfigError("scale_comparison_check: b support matches neither form");
  r.first_form = high_pass;
  Grid2Field bf = band_filter_apply(f, b, h);
  double c_rho = hz_norm(bf, rho, cutoff), c_rhop = hz_norm(bf, rho_p, cutoff);
  double low = std::pow(h, N) * hz_norm(f, -double(N), cutoff);
  if (high_pass) {
    r.lhs = c_rho;
    r.rhs_main = std::pow(h, rho_p - rho) * c_rhop;
  } else {
    r.lhs = c_rhop;
    r.rhs_main = std::pow(h, rho - rho_p) * c_rho;
  }
  r.rhs_low = low;
  double denom = r.rhs_main + r.rhs_low;
  r.ratio = denom > 0 ? r.lhs / denom : (r.lhs > 0 ? kInf : 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// Measured L^inf -> L^inf bound of Op_h(sym) over random trigonometric
// polynomials, reported per h. Uniformity in h is the property under test.
// ---------------------------------------------------------------------------

struct LinfBoundReport {
  std::vector<double> h_list;
  std::vector<double> bound;  // max over trials of ||Op_h(sym)u||inf/||u||inf
};

inline Grid2Field random_band_limited(GridSpec spec, int k_max, Rng& rng,
                                      bool zero_mean = false) {
  TrigPoly2 p;
  for (int k0 = -k_max; k0 <= k_max; ++k0)
    for (int k1 = -k_max; k1 <= k_max; ++k1) {
      if (k0 == 0 && k1 == 0) continue;
      if (k0 < 0 || (k0 == 0 && k1 < 0)) continue;  // conjugate pair partner
      double amp = rng.normal(), phase = rng.uniform(0, kTwoPi);
      p.add_real_cos(k0, k1, amp, phase);
    }
  if (!zero_mean) p.modes.push_back({0, 0, cplx(rng.normal(), 0)});
  return Grid2Field::from_trig(spec, p);
}

inline LinfBoundReport linf_band_bound(GridSpec spec, const ConeSymbol& sym,
                                       const std::vector<double>& h_list,
                                       int trials, uint64_t seed, int k_max = 8) {
  LinfBoundReport rep;
  rep.h_list = h_list;
  rep.bound.assign(h_list.size(), 0.0);
  Rng root(seed);
  for (int t = 0; t < trials; ++t) {
    Rng rt = root.split(t);
    Grid2Field u = random_band_limited(spec, k_max, rt);
    double un = u.max_abs();
    if (un == 0) continue;
    for (size_t i = 0; i < h_list.size(); ++i) {
      double v = band_filter_apply(u, sym, h_list[i]).max_abs();
      rep.bound[i] = std::max(rep.bound[i], v / un);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Disjoint-support product: residual of Op_{h0}(a) Op_h(b) f over a dyadic
// h sweep. On the torus these are exact multipliers, so true disjointness
// makes the product vanish identically; the fitted local exponent is +inf
// (reported as such) once that happens, and the overlap flag records where
// the hypothesis failed.
// ---------------------------------------------------------------------------

struct DisjointProductReport {
  std::vector<double> h_list;
  std::vector<double> residual;
  std::vector<bool> disjoint;        // lattice-support disjointness at this h
  std::vector<double> local_exponent;  // log2(r_{m-1}/r_m); +inf on exact zero
};

inline DisjointProductReport disjoint_support_product_check(
    GridSpec spec, const ConeSymbol& a, const ConeSymbol& b, double h0,
    const std::vector<double>& h_list, const Grid2Field& f) {
  DisjointProductReport rep;
  rep.h_list = h_list;
  int n = spec.n_side;
  for (size_t m = 0; m < h_list.size(); ++m) {
    double h = h_list[m];
    bool disjoint = true;
    for (int ik = 0; ik < n && disjoint; ++ik) {
      int k0 = fft_index_to_k(ik, n);
      for (int jk = 0; jk < n; ++jk) {
        int k1 = fft_index_to_k(jk, n);
        double xa = a.eval(h0 * kTwoPi * k0, h0 * kTwoPi * k1);
        double xb = b.eval(h * kTwoPi * k0, h * kTwoPi * k1);
        if (xa != 0 && xb != 0) {
          disjoint = false;
          break;
        }
      }
    }
    rep.disjoint.push_back(disjoint);
    Grid2Field g = band_filter_apply(band_filter_apply(f, b, h), a, h0);
    rep.residual.push_back(g.max_abs());
  }
  rep.local_exponent.assign(h_list.size(), 0.0);
  for (size_t m = 1; m < h_list.size(); ++m) {
    double r0 = rep.residual[m - 1], r1 = rep.residual[m];
    if (r1 == 0)
      rep.local_exponent[m] = kInf;  // decay stronger than any power
    else if (r0 == 0)
      rep.local_exponent[m] = -kInf;  // residual reappeared (overlap)
    else
      rep.local_exponent[m] =
          std::log2(r0 / r1) / std::log2(h_list[m - 1] / h_list[m]);
  }
  return rep;
}

// Lemma-style high-frequency control: || Op_h(sym) f ||_inf <= C h^s || f ||_{C^s}.
// Returns the measured ratio (the constant for this sample).
inline double control_by_cs_ratio(const Grid2Field& f, const ConeSymbol& sym,
                                  double h, double s, CutoffSpec cutoff = {}) {
  double lhs = band_filter_apply(f, sym, h).max_abs();
  double rhs = std::pow(h, s) * hz_norm(f, s, cutoff);
  return rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
}

}  // namespace anosov
