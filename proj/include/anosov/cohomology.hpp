// Cohomological equations u o A - u = F (maps) and X u = f (suspensions),
// the abelian twisted transfer problem, Livsic obstruction checks, and
// band-decay regularity profiling of solutions.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "anosov/core.hpp"
#include "anosov/grid.hpp"
#include "anosov/lp.hpp"
#include "anosov/orbits.hpp"
#include "anosov/systems.hpp"

namespace anosov {

// Scalar-potential or U(1)-phase weight for the derivation X = X - v (flows)
// or the transfer u -> e^{i theta} u o A (maps).
struct CocycleWeight {
  enum class Kind { none, scalar_potential, phase } kind = Kind::none;
  TrigPoly2 field;  // v (real) or theta (real)

  static CocycleWeight none() { return {}; }
  static CocycleWeight scalar(TrigPoly2 v) {
    return {Kind::scalar_potential, std::move(v)};
  }
  static CocycleWeight phase(TrigPoly2 theta) {
    return {Kind::phase, std::move(theta)};
  }
  bool trivial() const { return kind == Kind::none; }
  // log |weight factor| per unit time at x (0 for unitary weights)
  double log_rate(double x, double y) const {
    return kind == Kind::scalar_potential ? field.eval_real(x, y) : 0.0;
  }
};

// Max over primitive orbits of the unnormalized Birkhoff sum |sum_orbit F|.
inline double obstruction_check(const Grid2Field& F, const OrbitSet& orbits) {
  TrigPoly2 p = F.sparse_modes();
  double worst = 0;
  for (const auto& o : orbits.orbits)
    worst = std::max(worst, std::abs(birkhoff_sum(p, o)));
  return worst;
}

inline double obstruction_check(const TrigPoly2& F, const OrbitSet& orbits) {
  double worst = 0;
  for (const auto& o : orbits.orbits)
    worst = std::max(worst, std::abs(birkhoff_sum(F, o)));
  return worst;
}

// ---------------------------------------------------------------------------
// Discrete-time Livsic solver on the Fourier lattice:
//   u(k) = sum_{j>=1} F(B^j k),  B = A^T,
// summed until the orbit leaves |k| <= K_max (exact for band-limited F whose
// lattice orbits escape; the hyperbolicity of B guarantees escape in O(log)
// steps). Normalization u(0) = 0.
// ---------------------------------------------------------------------------

struct LivsicSolution {
  Grid2Field u;
  double residual = 0;      // || u o A - u - F ||_inf on the grid
  double mean_defect = 0;   // |F_hat(0)|
  int max_orbit_steps = 0;
};

inline LivsicSolution livsic_solve(const AnosovMap& map, const Grid2Field& F,
                                   int K_max = 0, double mean_tol = 1e-12,
                                   double residual_tol = 1e-9,
                                   bool backward_sum = false) {
  if (!map.is_linear())
    throw ConfigError("livsic_solve: needs the linear base map");
  const GridSpec spec = F.spec();
  int n = spec.n_side;
  if (K_max <= 0) K_max = n / 2 - 1;
  LivsicSolution sol;
  sol.mean_defect = std::abs(F.coeff(0, 0));
  if (sol.mean_defect > mean_tol)
    throw ConfigError("livsic_solve: F has nonzero mean (unsolvable)");
  IMat2 B = map.matrix().transpose();
  if (backward_sum) B = B.inverse_unimodular();
  // generous escape horizon: integer orbits leave any K-ball in O(log) steps
  int j_stop =
      int(std::ceil(2.0 * std::log(double(K_max) * n + 10.0) /
                    map.log_lambda())) + 8;
  Grid2Field u(spec);
  auto& cu = u.mutable_coeffs();
  std::fill(cu.begin(), cu.end(), cplx(0));
  long long K2 = (long long)(K_max) * K_max;
  for (int ik = 0; ik < n; ++ik) {
    long long k0 = fft_index_to_k(ik, n);
    for (int jk = 0; jk < n; ++jk) {
      long long k1 = fft_index_to_k(jk, n);
      if (k0 == 0 && k1 == 0) continue;
      if (k0 * k0 + k1 * k1 > K2) continue;
      // forward:  u(k) =   sum_{j>=1} F(B^j k)
      // backward: u(k) = - sum_{j>=0} F(B^-j k)  (the diagonal term included)
      cplx acc = backward_sum ? F.coeff(int(k0), int(k1)) : cplx(0);
      long long q0 = k0, q1 = k1;
      int steps = 0;
      for (int j = 1; j <= j_stop; ++j) {
        long long t0 = B.a * q0 + B.b * q1;
        long long t1 = B.c * q0 + B.d * q1;
        q0 = t0;
        q1 = t1;
        if (q0 * q0 + q1 * q1 > K2) break;
        acc += F.coeff(int(q0), int(q1));
        steps = j;
      }
      sol.max_orbit_steps = std::max(sol.max_orbit_steps, steps);
      if (backward_sum) acc = -acc;
      cu[size_t(ik) * n + jk] = acc;
    }
  }
  sol.u = u;
  Grid2Field lhs = u.compose_int(map.matrix()) - u - F;
  sol.residual = lhs.max_abs();
  if (sol.residual > residual_tol)
    throw ConfigError(
        "livsic_solve: residual " + std::to_string(sol.residual) +
        " too large (input not band-limited, or Livsic obstruction violated)");
  return sol;
}

// ---------------------------------------------------------------------------
// High-order cumulative quadrature on a uniform grid (7-point interpolatory
// weights per interval), used to integrate along the suspension direction.
// ---------------------------------------------------------------------------

namespace detail {

// weights w[r] with int_{x_i}^{x_{i+1}} f ~= h * sum_r w[r] f(x_{s0+r}); the
// P-node stencil s0..s0+P-1 contains the interval; exact for degree <= P-1.
inline std::vector<double> interval_weights(int i, int s0, int P) {
  // integrate Lagrange basis polynomials over [i, i+1] in node coordinates
  // with a 6-node Gauss rule (exact through degree 11)
  static const double gx[6] = {-0.9324695142031521, -0.6612093864662645,
                               -0.2386191860831969, 0.2386191860831969,
                               0.6612093864662645,  0.9324695142031521};
  static const double gw[6] = {0.1713244923791704, 0.3607615730481386,
                               0.4679139345726910, 0.4679139345726910,
                               0.3607615730481386, 0.1713244923791704};
  std::vector<double> w(size_t(P), 0.0);
  for (int r = 0; r < P; ++r) {
    double acc = 0;
    for (int g = 0; g < 6; ++g) {
      double t = i + 0.5 + 0.5 * gx[g];
      double L = 1;
      for (int q = 0; q < P; ++q) {
        if (q == r) continue;
        L *= (t - (s0 + q)) / double(r - q);
      }
      acc += 0.5 * gw[g] * L;
    }
    w[size_t(r)] = acc;
  }
  return w;
}

}  // namespace detail

// Cumulative integrals of samples f_0..f_m (m+1 nodes, spacing h): returns
// partial integrals at every node. Interpolatory order (up to 11) for smooth
// data.
inline std::vector<double> cumulative_integral(const std::vector<double>& f,
                                               double h) {
  int m = int(f.size()) - 1;
  if (m < 6) throw ConfigError("cumulative_integral: need >= 7 nodes");
  int P = std::min(11, m + 1);
  std::vector<double> out(f.size(), 0.0);
  double acc = 0;
  for (int i = 0; i < m; ++i) {
    int s0 = std::clamp(i - (P - 1) / 2, 0, m - (P - 1));
    auto w = detail::interval_weights(i, s0, P);
    double seg = 0;
    for (int r = 0; r < P; ++r) seg += w[size_t(r)] * f[size_t(s0 + r)];
    acc += h * seg;
    out[size_t(i) + 1] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suspension Livsic: solve X u = f on the mapping torus by reducing to the
// base equation. With u(x,s) = u0(x) + int_0^s f(x,sigma) d sigma, the
// twisted periodicity forces u0(A x) - u0(x) = int_0^1 f(x, s) ds.
// ---------------------------------------------------------------------------

struct SuspensionLivsicSolution {
  MappingTorusField u;
  double base_residual = 0;
  double seam_defect = 0;  // twisted-boundary defect of the assembled solution
};

inline SuspensionLivsicSolution suspension_livsic_solve(
    const AnosovMap& map, const MappingTorusField& f, int K_max = 0,
    double defect_tol = 1e-9) {
  const GridSpec spec = f.spec();
  int n = spec.n_side, ns = spec.n_s;
  if (ns < 8)
    throw ConfigError("suspension_livsic_solve: n_s too small for quadrature");
  // per-gridpoint slice samples including the twisted end value f(x,1)
  Grid2Field top = f.twisted_slice(ns);
  // cumulative integrals along s for every grid point
  std::vector<std::vector<double>> cum(size_t(n) * n);
  {
    std::vector<double> samples(size_t(ns) + 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < ns; ++m)
          samples[size_t(m)] = f.slice(m).value_at(i, j).real();
        samples[size_t(ns)] = top.value_at(i, j).real();
        cum[size_t(i) * n + j] = cumulative_integral(samples, 1.0 / ns);
      }
  }
  // base transfer F(x) = int_0^1 f(x, s) ds
  Grid2Field F(spec);
  {
    auto& vals = F.mutable_values();
    for (size_t t = 0; t < vals.size(); ++t) vals[t] = cum[t].back();
  }
  // the space mean of f is a genuine obstruction; values below the quadrature
  // accuracy are noise and get projected away
  cplx mu = F.coeff(0, 0);
  if (std::abs(mu) > 1e-8)
    throw ConfigError("suspension_livsic_solve: nonzero space mean of f "
                      "(obstructed)");
  F -= Grid2Field::mode(spec, 0, 0) * mu;
  auto base = livsic_solve(map, F, K_max, 1e-12, defect_tol);
  SuspensionLivsicSolution sol;
  sol.base_residual = base.residual;
  sol.u = MappingTorusField(spec, map.matrix());
  for (int m = 0; m < ns; ++m) {
    auto& vals = sol.u.slice(m).mutable_values();
    const auto& u0 = base.u.values();
    for (size_t t = 0; t < vals.size(); ++t)
      vals[t] = u0[t] + cum[t][size_t(m)];
  }
  // twisted-boundary defect: u0(x) + int_0^1 f dx vs u0(A x)
  Grid2Field seam = base.u.compose_int(map.matrix()) - base.u - F;
  sol.seam_defect = seam.max_abs();
  if (sol.seam_defect > defect_tol)
    throw ConfigError("suspension_livsic_solve: twisted boundary defect " +
                      std::to_string(sol.seam_defect));
  return sol;
}

// ---------------------------------------------------------------------------
// Abelian twisted transport: find |u| = 1 with u o A = c u for |c| = 1.
// ---------------------------------------------------------------------------

struct TwistedTransportSolution {
  Grid2Field u;
  Grid2Field theta;  // the continuous branch of -i log c actually solved
  double residual = 0;
  long long winding_x = 0, winding_y = 0;
};

inline TwistedTransportSolution twisted_transport_solve(
    const AnosovMap& map, const Grid2Field& c, int K_max = 0,
    double obstruction_tol = 1e-10) {
  const GridSpec spec = c.spec();
  int n = spec.n_side;
  TwistedTransportSolution sol;
  // modulus sanity
  for (const auto& v : c.values())
    if (std::abs(std::abs(v) - 1.0) > 1e-9)
      throw ConfigError("twisted_transport_solve: |c| != 1");
  auto principal = [](cplx z) { return std::arg(z); };
  // winding along the two cycles
  double wx = 0, wy = 0;
  for (int i = 0; i < n; ++i)
    wx += principal(c.value_at(i + 1, 0) / c.value_at(i, 0));
  for (int j = 0; j < n; ++j)
    wy += principal(c.value_at(0, j + 1) / c.value_at(0, j));
  sol.winding_x = llround(wx / kTwoPi);
  sol.winding_y = llround(wy / kTwoPi);
  if (sol.winding_x != 0 || sol.winding_y != 0)
    throw ConfigError("twisted_transport_solve: topologically obstructed "
                      "(nonzero winding number)");
  // continuous branch: unwrap along column 0, then along each row
  Grid2Field theta(spec);
  auto& tv = theta.mutable_values();
  std::vector<double> col(n);
  col[0] = principal(c.value_at(0, 0));
  for (int i = 1; i < n; ++i)
    col[i] = col[i - 1] + principal(c.value_at(i, 0) / c.value_at(i - 1, 0));
  for (int i = 0; i < n; ++i) {
    double cur = col[size_t(i)];
    tv[size_t(i) * n + 0] = cur;
    for (int j = 1; j < n; ++j) {
      cur += principal(c.value_at(i, j) / c.value_at(i, j - 1));
      tv[size_t(i) * n + j] = cur;
    }
  }
  // the additive problem needs zero mean; the only freedom is a global 2 pi
  // shift, so fold the mean and reject a genuine obstruction
  cplx mean = theta.coeff(0, 0);
  double shift = kTwoPi * std::round(mean.real() / kTwoPi);
  theta *= cplx(1, 0);  // ensure values materialized
  {
    auto& vals = theta.mutable_values();
    for (auto& v : vals) v -= shift;
  }
  cplx mean2 = theta.coeff(0, 0);
  if (std::abs(mean2) > obstruction_tol)
    throw ConfigError(
        "twisted_transport_solve: phase obstruction (mean " +
        std::to_string(std::abs(mean2)) + ")");
  auto add = livsic_solve(map, theta, K_max, obstruction_tol);
  sol.theta = theta;
  Grid2Field u(spec);
  {
    auto& uv = u.mutable_values();
    const auto& wv = add.u.values();
    for (size_t t = 0; t < uv.size(); ++t)
      uv[t] = std::polar(1.0, wv[t].real());
  }
  sol.u = u;
  Grid2Field lhs = u.compose_int(map.matrix()) - c.pointwise(u);
  sol.residual = lhs.max_abs();
  return sol;
}

// ---------------------------------------------------------------------------
// Regularity profiling
// ---------------------------------------------------------------------------

struct ProfileReport {
  std::vector<double> band_sups;
  double alpha_hat = 0;
  bool alpha_defined = false;
  bool single_band = false;
  int fit_lo = 0, fit_hi = 0;
};

inline ProfileReport profile_from_sups(std::vector<double> b) {
  ProfileReport rep;
  rep.band_sups = std::move(b);
  int jmax = int(rep.band_sups.size()) - 1;
  rep.fit_lo = 2;
  rep.fit_hi = jmax - 2;  // the two highest bands are grid-polluted
  if (rep.fit_hi - rep.fit_lo + 1 < 3)
    throw ConfigError("regularity_profile: fewer than 3 resolvable bands");
  double peak = 0;
  for (double v : rep.band_sups) peak = std::max(peak, v);
  std::vector<double> xs, ys;
  for (int j = rep.fit_lo; j <= rep.fit_hi; ++j) {
    double v = rep.band_sups[size_t(j)];
    if (v > 1e-14 * peak && v > 0) {
      xs.push_back(double(j));
      ys.push_back(-std::log2(v));
    }
  }
  // a plane wave populates at most two adjacent bands: no slope to fit
  bool concentrated =
      xs.size() <= 1 ||
      (xs.size() == 2 && std::abs(xs[1] - xs[0]) <= 1.0 + 1e-12);
  if (concentrated) {
    rep.single_band = true;
    return rep;
  }
  auto fit = linear_fit(xs, ys);
  rep.alpha_hat = fit.slope;
  rep.alpha_defined = true;
  return rep;
}

inline ProfileReport regularity_profile(const Grid2Field& u,
                                        CutoffSpec cutoff = {}) {
  auto bank = build_lp_filters(u.spec(), cutoff);
  return profile_from_sups(band_sups(bank, u));
}

inline ProfileReport regularity_profile(const ChartAtlas& atlas,
                                        const MappingTorusField& u,
                                        CutoffSpec cutoff = {}) {
  return profile_from_sups(band_sups_torus3(atlas, u, cutoff));
}

// ---------------------------------------------------------------------------
// Certified lower bound for the quotient seminorm inf_u || f + Xu ||_{C^0}:
// orbit averages are coboundary-invariant and bounded by the sup norm.
// ---------------------------------------------------------------------------

inline double quotient_seminorm_lower(const TrigPoly2& f,
                                      const OrbitSet& orbits) {
  double worst = 0;
  for (const auto& o : orbits.orbits)
    worst = std::max(worst, std::abs(xray(f, o)));
  return worst;
}

inline double quotient_seminorm_lower(const Grid2Field& f,
                                      const OrbitSet& orbits) {
  return quotient_seminorm_lower(f.sparse_modes(), orbits);
}

}  // namespace anosov
