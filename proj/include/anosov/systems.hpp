// Concrete hyperbolic systems: linear toral automorphisms, trigonometric
// perturbations with a certified cone condition, suspension flows over them,
// splitting frames, Lyapunov data, and the Bolza surface group.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "anosov/core.hpp"
#include "anosov/grid.hpp"

namespace anosov {

// Vector-valued trigonometric polynomial perturbation p : T^2 -> R^2.
struct TrigPolyVec2 {
  TrigPoly2 px, py;
  Vec2 eval(double x, double y) const {
    return {px.eval_real(x, y), py.eval_real(x, y)};
  }
  Mat2 jacobian(double x, double y) const {
    Vec2 gx = px.grad_real(x, y), gy = py.grad_real(x, y);
    return {gx.x, gx.y, gy.x, gy.y};
  }
  double sup_norm_bound() const {  // sum of |coefficients| bounds sup
    double sx = 0, sy = 0;
    for (const auto& m : px.modes) sx += std::abs(m.c);
    for (const auto& m : py.modes) sy += std::abs(m.c);
    return std::hypot(sx, sy);
  }
  double jacobian_bound() const {
    double s = 0;
    for (const auto& m : px.modes)
      s += std::abs(m.c) * kTwoPi * std::hypot(double(m.k0), double(m.k1));
    for (const auto& m : py.modes)
      s += std::abs(m.c) * kTwoPi * std::hypot(double(m.k0), double(m.k1));
    return s;
  }
  // crude bound on the second derivative (Lipschitz constant of the Jacobian)
  double hessian_bound() const {
    double s = 0;
    for (const auto& m : px.modes)
      s += std::abs(m.c) * kTwoPi * kTwoPi *
           (double(m.k0) * m.k0 + double(m.k1) * m.k1);
    for (const auto& m : py.modes)
      s += std::abs(m.c) * kTwoPi * kTwoPi *
           (double(m.k0) * m.k0 + double(m.k1) * m.k1);
    return s;
  }
};

struct ConeCertificate {
  double half_angle = 0;       // certified unstable cone half-angle (radians)
  double expansion_min = 0;    // certified expansion inside the cone
  double contraction_max = 0;  // certified contraction in the stable cone
  int grid_checked = 0;
  double lipschitz_margin = 0;
};

// Hyperbolic toral map x -> A x + eps p(x) mod Z^2.
class AnosovMap {
 public:
  enum class Kind { linear, perturbed };

  static AnosovMap cat_map(IMat2 m) {
    if (std::abs(m.det()) != 1)
      throw ConfigError("cat_map_system: |det| must be 1");
    if (std::abs(m.trace()) <= 2)
      throw ConfigError("cat_map_system: |trace| <= 2, not hyperbolic");
    AnosovMap s;
    s.kind_ = Kind::linear;
    s.A_ = m;
    s.init_eigen();
    return s;
  }

  static AnosovMap perturbed(const AnosovMap& base, double eps,
                             TrigPolyVec2 bump, int cert_grid = 256) {
    if (base.kind_ != Kind::linear)
      throw ConfigError("perturbed_cat_map: base must be linear");
    if (eps < 0) throw ConfigError("perturbed_cat_map: eps >= 0");
    AnosovMap s = base;
    if (eps == 0) return s;  // the linear map unchanged
    s.kind_ = Kind::perturbed;
    s.eps_ = eps;
    s.p_ = std::move(bump);
    s.certify_cones(cert_grid);
    return s;
  }

  Kind kind() const { return kind_; }
  const IMat2& matrix() const { return A_; }
  double eps() const { return eps_; }
  const TrigPolyVec2& bump() const { return p_; }
  bool is_linear() const { return kind_ == Kind::linear; }

  double lambda() const { return lambda_; }          // |unstable eigenvalue|
  double log_lambda() const { return std::log(lambda_); }
  Vec2 unstable_dir() const { return e_u_; }
  Vec2 stable_dir() const { return e_s_; }
  // dual covector lines: E*_s annihilates E_s + RX, E*_u annihilates E_u + RX
  Vec2 estar_s_dir() const { return e_s_.perp().normalized(); }
  Vec2 estar_u_dir() const { return e_u_.perp().normalized(); }

  Vec2 apply(Vec2 v) const {
    Vec2 w = A_.to_real().apply(v);
    if (kind_ == Kind::perturbed) {
      Vec2 pv = p_.eval(v.x, v.y);
      w = w + pv * eps_;
    }
    w.x -= std::floor(w.x);
    w.y -= std::floor(w.y);
    return w;
  }

  // Preimage by contraction iteration (exact inverse for the linear part).
  Vec2 apply_inverse(Vec2 v, int iters = 60) const {
    Mat2 ai = A_.inverse_unimodular().to_real();
    if (kind_ == Kind::linear) {
      Vec2 w = ai.apply(v);
      w.x -= std::floor(w.x);
      w.y -= std::floor(w.y);
      return w;
    }
    // solve A y + eps p(y) = v (mod Z^2) by y <- A^{-1}(v - eps p(y))
    Vec2 y = ai.apply(v);
    y.x -= std::floor(y.x);
    y.y -= std::floor(y.y);
    for (int i = 0; i < iters; ++i) {
      Vec2 py = p_.eval(y.x, y.y);
      Vec2 yn = ai.apply({v.x - eps_ * py.x, v.y - eps_ * py.y});
      yn.x -= std::floor(yn.x);
      yn.y -= std::floor(yn.y);
      y = yn;
    }
    return y;
  }

  Mat2 derivative(Vec2 x) const {
    Mat2 d = A_.to_real();
    if (kind_ == Kind::perturbed) {
      Mat2 j = p_.jacobian(x.x, x.y);
      d.a += eps_ * j.a;
      d.b += eps_ * j.b;
      d.c += eps_ * j.c;
      d.d += eps_ * j.d;
    }
    return d;
  }

  const ConeCertificate& certificate() const { return cert_; }

  std::string describe() const {
    return (kind_ == Kind::linear ? "linear" : "perturbed");
  }

 private:
  void init_eigen() {
    double tr = double(A_.trace());
    double disc = std::sqrt(tr * tr - 4.0 * double(A_.det()));
    double l1 = (tr + disc) / 2, l2 = (tr - disc) / 2;
    lambda_ = std::abs(l1) > std::abs(l2) ? std::abs(l1) : std::abs(l2);
    double lu = std::abs(l1) > std::abs(l2) ? l1 : l2;
    double ls = std::abs(l1) > std::abs(l2) ? l2 : l1;
    auto eigvec = [&](double lam) -> Vec2 {
      Mat2 m = A_.to_real();
      // rows of (A - lam I) are orthogonal to the eigenvector
      Vec2 r1{m.a - lam, m.b}, r2{m.c, m.d - lam};
      Vec2 v = r1.norm() > r2.norm() ? Vec2{-r1.y, r1.x} : Vec2{-r2.y, r2.x};
      v = v.normalized();
      if (v.x < 0 || (v.x == 0 && v.y < 0)) v = v * -1.0;  // deterministic sign
      return v;
    };
    e_u_ = eigvec(lu);
    e_s_ = eigvec(ls);
  }

  void certify_cones(int grid) {
    // Strict cone condition at every grid point plus a Lipschitz margin: the
    // image of the unstable cone must land strictly inside it with expansion
    // > 1. Sufficient certificate, not a sharp one.
    double theta = 0.15;  // candidate cone half-angle around e_u
    double lip = eps_ * p_.hessian_bound() / grid;  // Jacobian wobble between nodes
    double worst_angle = 0, worst_exp = kInf, worst_contr = 0;
    double vx = 0, vy = 0;
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        Vec2 x{double(i) / grid, double(j) / grid};
        Mat2 d = derivative(x);
        for (double sgn : {-1.0, 1.0}) {
          // cone boundary vector
          Vec2 b = (e_u_ + e_u_.perp() * (sgn * std::tan(theta))).normalized();
          Vec2 ib = d.apply(b);
          double ang = std::asin(std::min(
              1.0, std::abs(ib.normalized().dot(e_u_.perp()))));
          double ex = ib.norm();
          if (ang > worst_angle) {
            worst_angle = ang;
            vx = x.x;
            vy = x.y;
          }
          worst_exp = std::min(worst_exp, ex);
        }
        // stable cone contraction under the inverse derivative
        Mat2 di = d.inverse();
        for (double sgn : {-1.0, 1.0}) {
          Vec2 b = (e_s_ + e_s_.perp() * (sgn * std::tan(theta))).normalized();
          worst_contr = std::max(worst_contr, 1.0 / di.apply(b).norm());
        }
      }
    double margin = std::asin(std::min(1.0, lip));
    if (worst_angle + margin >= theta || worst_exp <= 1.0 + lip) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "perturbed_cat_map: cone condition fails near (%.4f, %.4f) "
                    "(angle %.4f + margin %.4f vs %.4f, expansion %.4f)",
                    vx, vy, worst_angle, margin, theta, worst_exp);
      throw ConfigError(buf);
    }
    cert_.half_angle = theta;
    cert_.expansion_min = worst_exp - lip;
    cert_.contraction_max = worst_contr + lip;
    cert_.grid_checked = grid;
    cert_.lipschitz_margin = margin;
  }

  Kind kind_ = Kind::linear;
  IMat2 A_{2, 1, 1, 1};
  double eps_ = 0;
  TrigPolyVec2 p_;
  double lambda_ = 0;
  Vec2 e_u_, e_s_;
  ConeCertificate cert_;
};

inline AnosovMap cat_map_system(IMat2 m = IMat2{2, 1, 1, 1}) {
  return AnosovMap::cat_map(m);
}

inline AnosovMap perturbed_cat_map(const AnosovMap& base, double eps,
                                   TrigPolyVec2 bump, int cert_grid = 256) {
  return AnosovMap::perturbed(base, eps, std::move(bump), cert_grid);
}

// ---------------------------------------------------------------------------
// Suspension flow: unit-speed vertical flow on the mapping torus of the base
// with return time given by the roof. Grid-exact propagation is available for
// the unit roof (the mapping-torus model); general roofs enter through
// orbit data (periods are Birkhoff sums of the roof).
// ---------------------------------------------------------------------------

struct AnosovFlow {
  AnosovMap base;
  TrigPoly2 roof;        // strictly positive; roof == 1 means the pure twist
  bool unit_roof = true;

  double roof_at(double x, double y) const {
    return unit_roof ? 1.0 : roof.eval_real(x, y);
  }
  double roof_min_bound() const {
    if (unit_roof) return 1.0;
    double mean = 0, rest = 0;
    for (const auto& m : roof.modes) {
      if (m.k0 == 0 && m.k1 == 0)
        mean += m.c.real();
      else
        rest += std::abs(m.c);
    }
    return mean - rest;
  }
};

inline AnosovFlow suspension_flow(const AnosovMap& base, TrigPoly2 roof) {
  AnosovFlow f{base, std::move(roof), false};
  bool trivial = true;
  for (const auto& m : f.roof.modes) {
    if (m.k0 == 0 && m.k1 == 0) {
      if (std::abs(m.c - cplx(1.0, 0)) > 1e-15) trivial = false;
    } else if (std::abs(m.c) > 0) {
      trivial = false;
    }
  }
  if (f.roof.modes.empty()) trivial = false;  // empty roof spec means roof == 0
  f.unit_roof = trivial;
  if (!f.unit_roof && f.roof_min_bound() <= 0)
    throw ConfigError("suspension_flow: roof must be strictly positive");
  return f;
}

inline AnosovFlow unit_suspension(const AnosovMap& base) {
  TrigPoly2 one;
  one.modes.push_back({0, 0, cplx(1, 0)});
  return suspension_flow(base, one);
}

// ---------------------------------------------------------------------------
// Splitting frames via power iteration of the derivative cocycle
// ---------------------------------------------------------------------------

struct SplittingFrame {
  Vec2 x;
  Vec2 e_u, e_s;          // unit tangent directions
  Vec2 eu_star, es_star;  // dual covector directions: E*_u _|_ e_u, E*_s _|_ e_s
  double residual = 0;    // invariance defect of e_u under the map derivative
};

inline SplittingFrame splitting_at(const AnosovMap& map, Vec2 x, int n_iter,
                                   double tol = 1e-12) {
  if (n_iter < 1) throw ConfigError("splitting_at: n_iter >= 1");
  SplittingFrame fr;
  fr.x = x;
  if (map.is_linear()) {
    fr.e_u = map.unstable_dir();
    fr.e_s = map.stable_dir();
    fr.residual = 0;
  } else {
    // E_u: push a vector along the orbit ending at x (derivatives evaluated
    // along preimages); start from the linear eigendirection.
    std::vector<Vec2> pre(n_iter + 1);
    pre[0] = x;
    for (int i = 1; i <= n_iter; ++i) pre[i] = map.apply_inverse(pre[i - 1]);
    Vec2 v = map.unstable_dir();
    for (int i = n_iter; i >= 1; --i) {
      v = map.derivative(pre[i]).apply(v);
      v = v.normalized();
    }
    if (v.x < 0 || (v.x == 0 && v.y < 0)) v = v * -1.0;
    fr.e_u = v;
    // E_s: power-iterate the inverse cocycle along the forward orbit from x.
    std::vector<Vec2> fwd(n_iter + 1);
    fwd[0] = x;
    for (int i = 1; i <= n_iter; ++i) fwd[i] = map.apply(fwd[i - 1]);
    Vec2 w = map.stable_dir();
    for (int i = n_iter - 1; i >= 0; --i) {
      w = map.derivative(fwd[i]).inverse().apply(w);
      w = w.normalized();
    }
    if (w.x < 0 || (w.x == 0 && w.y < 0)) w = w * -1.0;
    fr.e_s = w;
    // invariance residual: d(map)_x e_u vs e_u(map x)
    Vec2 img = map.derivative(x).apply(fr.e_u).normalized();
    Vec2 fx = map.apply(x);
    std::vector<Vec2> pre2(n_iter + 1);
    pre2[0] = fx;
    for (int i = 1; i <= n_iter; ++i) pre2[i] = map.apply_inverse(pre2[i - 1]);
    Vec2 v2 = map.unstable_dir();
    for (int i = n_iter; i >= 1; --i)
      v2 = map.derivative(pre2[i]).apply(v2).normalized();
    if (v2.x < 0 || (v2.x == 0 && v2.y < 0)) v2 = v2 * -1.0;
    fr.residual = std::min((img - v2).norm(), (img + v2).norm());
    if (fr.residual > tol && fr.residual > 1e-3)
      throw ConfigError("splitting_at: power iteration did not converge");
  }
  fr.eu_star = fr.e_u.perp().normalized();  // annihilates e_u (and the flow dir)
  fr.es_star = fr.e_s.perp().normalized();  // annihilates e_s (and the flow dir)
  return fr;
}

// Projector onto E_u along E_s (2x2 block; the flow direction is untouched).
inline Mat2 unstable_projector(const SplittingFrame& fr) {
  // pi = e_u (x) l / <l, e_u> with l the covector annihilating e_s
  Vec2 l = fr.es_star;
  double d = l.dot(fr.e_u);
  return {fr.e_u.x * l.x / d, fr.e_u.x * l.y / d, fr.e_u.y * l.x / d,
          fr.e_u.y * l.y / d};
}

// ---------------------------------------------------------------------------
// Lyapunov data
// ---------------------------------------------------------------------------

struct LyapunovReport {
  double lambda_u_min = 0, lambda_u_max = 0;
  double lambda_s_min = 0, lambda_s_max = 0;  // positive rates
  int sample_count = 0;
  int horizon = 0;
  bool short_horizon_warning = false;
};

inline LyapunovReport lyapunov_data(const AnosovMap& map,
                                    const std::vector<Vec2>& orbit_sample,
                                    int T) {
  if (orbit_sample.empty()) throw ConfigError("lyapunov_data: empty sample");
  LyapunovReport rep;
  rep.sample_count = int(orbit_sample.size());
  rep.horizon = T;
  rep.short_horizon_warning = T < 16;
  rep.lambda_u_min = rep.lambda_s_min = kInf;
  for (Vec2 x0 : orbit_sample) {
    if (map.is_linear()) {
      double lu = map.log_lambda();
      rep.lambda_u_min = std::min(rep.lambda_u_min, lu);
      rep.lambda_u_max = std::max(rep.lambda_u_max, lu);
      rep.lambda_s_min = std::min(rep.lambda_s_min, lu);
      rep.lambda_s_max = std::max(rep.lambda_s_max, lu);
      continue;
    }
    // normalized cocycle products along the orbit, re-normalized each step
    Vec2 x = x0;
    Vec2 vu = splitting_at(map, x, 30).e_u;
    Vec2 vs = splitting_at(map, x, 30).e_s;
    double su = 0, ss = 0;
    for (int t = 0; t < T; ++t) {
      Mat2 d = map.derivative(x);
      Vec2 iu = d.apply(vu), is = d.apply(vs);
      su += std::log(iu.norm());
      ss += std::log(is.norm());
      vu = iu.normalized();
      vs = is.normalized();
      x = map.apply(x);
    }
    double lu = su / T, ls = -ss / T;  // report stable rate as positive
    rep.lambda_u_min = std::min(rep.lambda_u_min, lu);
    rep.lambda_u_max = std::max(rep.lambda_u_max, lu);
    rep.lambda_s_min = std::min(rep.lambda_s_min, ls);
    rep.lambda_s_max = std::max(rep.lambda_s_max, ls);
  }
  return rep;
}

// Per-unit-time exponents for a suspension: divide by the mean roof along
// the sampled orbits (exact for the unit roof).
inline LyapunovReport lyapunov_data(const AnosovFlow& flow,
                                    const std::vector<Vec2>& orbit_sample,
                                    int T) {
  LyapunovReport rep = lyapunov_data(flow.base, orbit_sample, T);
  if (!flow.unit_roof) {
    // normalize each extreme by the worst-case roof average over the sample
    double rmin = kInf, rmax = 0;
    for (Vec2 x0 : orbit_sample) {
      Vec2 x = x0;
      double s = 0;
      for (int t = 0; t < std::max(T, 1); ++t) {
        s += flow.roof_at(x.x, x.y);
        x = flow.base.apply(x);
      }
      double avg = s / std::max(T, 1);
      rmin = std::min(rmin, avg);
      rmax = std::max(rmax, avg);
    }
    rep.lambda_u_max /= rmin;
    rep.lambda_u_min /= rmax;
    rep.lambda_s_max /= rmin;
    rep.lambda_s_min /= rmax;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Conjugacy between the linear base and a perturbation: H = id + h with
// H o A0 = F o H. Each iteration solves the linearized twisted equation
// h(A0 x) - A h(x) = g(x) exactly by geometric series along the stable and
// unstable eigendirections (the discrete-time analogue of inverting the
// flow derivative on ker beta: backward sum on E_u, forward sum on E_s).
// ---------------------------------------------------------------------------

struct ConjugacyField {
  GridSpec spec;
  Grid2Field hx, hy;  // components of h on the grid
  double defect = 0;  // || H o A0 - F o H ||_inf over the grid
  int iterations = 0;

  Vec2 eval(Vec2 x) const {
    return {hx.eval(x.x, x.y, 1e-14).real(), hy.eval(x.x, x.y, 1e-14).real()};
  }
};

inline ConjugacyField conjugacy_solve(const AnosovMap& base,
                                      const AnosovMap& pert, double tol,
                                      GridSpec spec = GridSpec{128, 8},
                                      int max_iters = 200) {
  if (!base.is_linear())
    throw ConfigError("conjugacy_solve: base must be linear");
  int n = spec.n_side;
  IMat2 A = base.matrix();
  double lam = base.lambda();
  Vec2 eu = base.unstable_dir(), es = base.stable_dir();
  // dual basis for coordinates in the eigenframe
  double det = eu.x * es.y - eu.y * es.x;
  auto coord_u = [&](Vec2 v) { return (v.x * es.y - v.y * es.x) / det; };
  auto coord_s = [&](Vec2 v) { return (eu.x * v.y - eu.y * v.x) / det; };

  int series_len = std::max(8, int(std::ceil(std::log(1e4 / tol) / std::log(lam))));

  // forward/backward lattice orbits of every grid node (A permutes the grid)
  std::vector<int> fwd(size_t(n) * n), bwd(size_t(n) * n);
  IMat2 Ainv = A.inverse_unimodular();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long long fi = RatPt::mod(A.a * i + A.b * j, n);
      long long fj = RatPt::mod(A.c * i + A.d * j, n);
      fwd[size_t(i) * n + j] = int(fi) * n + int(fj);
      long long bi = RatPt::mod(Ainv.a * i + Ainv.b * j, n);
      long long bj = RatPt::mod(Ainv.c * i + Ainv.d * j, n);
      bwd[size_t(i) * n + j] = int(bi) * n + int(bj);
    }

  size_t nn = size_t(n) * n;
  std::vector<double> hu(nn, 0.0), hs(nn, 0.0), gu(nn), gs(nn);
  double prev_defect = kInf;
  int bad_streak = 0;
  double defect = kInf;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    // g(x) = eps p(x + h(x)) in eigencoordinates, and the defect of h
    defect = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        size_t id = size_t(i) * n + j;
        Vec2 h{eu.x * hu[id] + es.x * hs[id], eu.y * hu[id] + es.y * hs[id]};
        Vec2 x{double(i) / n + h.x, double(j) / n + h.y};
        Vec2 pv = pert.bump().eval(x.x, x.y) * pert.eps();
        gu[id] = coord_u(pv);
        gs[id] = coord_s(pv);
        size_t fid = fwd[id];
        double du = hu[fid] - lam * hu[id] - gu[id];
        double ds = hs[fid] - (1.0 / lam) * hs[id] - gs[id];
        Vec2 dv{eu.x * du + es.x * ds, eu.y * du + es.y * ds};
        defect = std::max(defect, std::max(std::abs(dv.x), std::abs(dv.y)));
      }
    if (defect <= tol) break;
    if (defect >= prev_defect) {
      if (++bad_streak >= 5)
        throw ConfigError("conjugacy_solve: defect not decreasing (diverging)");
    } else {
      bad_streak = 0;
    }
    prev_defect = defect;
    // exact solve of h(A0 x) - A h(x) = g(x):
    //   unstable: h_u(x) = - sum_{k>=0} lam^{-(k+1)} g_u(A^k x)
    //   stable:   h_s(x) =   sum_{k>=1} lam^{-(k-1)} g_s(A^{-k} x)
    for (size_t id = 0; id < nn; ++id) {
      double su = 0, w = 1.0 / lam;
      size_t cur = id;
      for (int k = 0; k < series_len; ++k) {
        su -= w * gu[cur];
        w /= lam;
        cur = fwd[cur];
      }
      hu[id] = su;
      double ss = 0, w2 = 1.0;
      cur = bwd[id];
      for (int k = 0; k < series_len; ++k) {
        ss += w2 * gs[cur];
        w2 /= lam;
        cur = bwd[cur];
      }
      hs[id] = ss;
    }
  }
  ConjugacyField out;
  out.spec = spec;
  std::vector<cplx> vx(nn), vy(nn);
  for (size_t id = 0; id < nn; ++id) {
    vx[id] = cplx(eu.x * hu[id] + es.x * hs[id], 0);
    vy[id] = cplx(eu.y * hu[id] + es.y * hs[id], 0);
  }
  out.hx = Grid2Field::from_values(spec, std::move(vx));
  out.hy = Grid2Field::from_values(spec, std::move(vy));
  out.defect = defect;
  out.iterations = iter;
  if (defect > tol)
    throw ConfigError("conjugacy_solve: did not reach tolerance");
  return out;
}

// Invariance defect of the unstable projector under the map derivative
// (the discrete-time face of L_X pi_{E_u} = 0): for splittings computed with
// n_iter cocycle steps, reports max_x || d(f)^{-1} pi(f x) d(f) - pi(x) ||.
inline double projector_invariance_residual(const AnosovMap& map, int grid_n,
                                            int n_iter) {
  double worst = 0;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      Vec2 x{(i + 0.375) / grid_n, (j + 0.125) / grid_n};
      auto fr = splitting_at(map, x, n_iter);
      auto fr2 = splitting_at(map, map.apply(x), n_iter);
      Mat2 p1 = unstable_projector(fr), p2 = unstable_projector(fr2);
      Mat2 d = map.derivative(x);
      Mat2 pulled = d.inverse().mul(p2).mul(d);
      Mat2 diff{pulled.a - p1.a, pulled.b - p1.b, pulled.c - p1.c,
                pulled.d - p1.d};
      worst = std::max(worst, diff.op_norm());
    }
  return worst;
}

// ---------------------------------------------------------------------------
// The Bolza surface group: regular-octagon side pairings, hard-coded with
// explicit radicals. g_k = R(k pi/4) T R(-k pi/4), T = [[a,b],[b,a]],
// a = 1 + sqrt 2, b = sqrt(a^2 - 1). Relation:
// g1 g3 g1^-1 g3^-1 g0 g2 g0^-1 g2^-1 = I.
// ---------------------------------------------------------------------------

struct FuchsianGroup {
  std::array<Mat2, 8> gens;  // 0..3 the pairings, 4..7 their inverses
  std::vector<int> relation; // indices into gens spelling the relation word
  double relation_residual = 0;

  const Mat2& gen(int i) const { return gens[i]; }
  static int inverse_index(int i) { return i < 4 ? i + 4 : i - 4; }
};

inline FuchsianGroup fuchsian_bolza() {
  FuchsianGroup g;
  double a = 1.0 + std::sqrt(2.0), b = std::sqrt(a * a - 1.0);
  for (int k = 0; k < 4; ++k) {
    double t = k * kPi / 4;
    Mat2 r{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
    Mat2 rt{std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
    Mat2 T{a, b, b, a};
    g.gens[k] = r.mul(T).mul(rt);
    g.gens[k + 4] = g.gens[k].inverse();
  }
  g.relation = {1, 3, 5, 7, 0, 2, 4, 6};
  Mat2 P = Mat2::identity();
  for (int idx : g.relation) P = P.mul(g.gens[idx]);
  double res = std::max({std::abs(P.a - 1), std::abs(P.b), std::abs(P.c),
                         std::abs(P.d - 1)});
  double res_neg = std::max({std::abs(P.a + 1), std::abs(P.b), std::abs(P.c),
                             std::abs(P.d + 1)});
  g.relation_residual = std::min(res, res_neg);
  if (g.relation_residual > 1e-10)
    throw ConfigError("fuchsian_bolza: relation residual too large");
  return g;
}

}  // namespace anosov
