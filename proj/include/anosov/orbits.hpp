// Periodic-orbit enumeration (exact rational arithmetic), X-ray transforms,
// marked length spectra, and word-length data on the Bolza group.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "anosov/core.hpp"
#include "anosov/grid.hpp"
#include "anosov/systems.hpp"

namespace anosov {

struct PeriodicOrbit {
  int period = 1;                // steps of the base map
  bool primitive = true;
  std::vector<RatPt> points;    // cycle order, lexicographically minimal start
  const RatPt& representative() const { return points.front(); }
};

struct OrbitSet {
  IMat2 matrix;
  int max_period = 0;
  std::vector<PeriodicOrbit> orbits;              // primitive orbits, n <= P
  std::vector<long long> period_point_counts;     // |det(A^n - I)|, n = 1..P

  std::vector<const PeriodicOrbit*> up_to(int P) const {
    std::vector<const PeriodicOrbit*> out;
    for (const auto& o : orbits)
      if (o.period <= P) out.push_back(&o);
    return out;
  }
};

namespace detail {

// Smith normal form of a 2x2 integer matrix: U * M * V = diag(d1, d2) with
// U, V unimodular and d1 | d2 (up to signs; we normalize d1, d2 > 0).
struct Snf2 {
  IMat2 U, V;
  long long d1 = 1, d2 = 1;
};

inline Snf2 smith_normal_form(IMat2 m) {
  IMat2 U{1, 0, 0, 1}, V{1, 0, 0, 1};
  // Invariant: current m equals U * m_original * V after each paired op.
  auto swap_rows = [&]() {
    std::swap(m.a, m.c);
    std::swap(m.b, m.d);
    std::swap(U.a, U.c);
    std::swap(U.b, U.d);
  };
  auto swap_cols = [&]() {
    std::swap(m.a, m.b);
    std::swap(m.c, m.d);
    std::swap(V.a, V.b);
    std::swap(V.c, V.d);
  };
  auto row2_minus = [&](long long t) {  // R2 -= t R1
    m.c -= t * m.a;
    m.d -= t * m.b;
    U.c -= t * U.a;
    U.d -= t * U.b;
  };
  auto col2_minus = [&](long long t) {  // C2 -= t C1
    m.b -= t * m.a;
    m.d -= t * m.c;
    V.b -= t * V.a;
    V.d -= t * V.c;
  };
  auto col1_plus_col2 = [&]() {  // C1 += C2
    m.a += m.b;
    m.c += m.d;
    V.a += V.b;
    V.c += V.d;
  };
  for (int guard = 0; guard < 512; ++guard) {
    if (m.a == 0) {
      if (m.c != 0)
        swap_rows();
      else if (m.b != 0)
        swap_cols();
      else if (m.d != 0) {
        swap_rows();
        swap_cols();
      } else
        break;  // zero matrix
      continue;
    }
    if (m.c != 0) {
      row2_minus(m.c / m.a);
      if (m.c != 0) {
        swap_rows();
        continue;  // Euclidean step on the first column
      }
    }
    if (m.b != 0) {
      col2_minus(m.b / m.a);
      if (m.b != 0) {
        swap_cols();
        continue;
      }
    }
    if (m.b == 0 && m.c == 0) {
      if (m.d % m.a != 0) {
        col1_plus_col2();  // pull m.d into column 1 and keep reducing
        continue;
      }
      break;
    }
  }
  // sign normalization: make diagonal entries nonnegative
  if (m.a < 0) {
    m.a = -m.a;
    m.b = -m.b;
    U.a = -U.a;
    U.b = -U.b;
  }
  if (m.d < 0) {
    m.d = -m.d;
    V.b = -V.b;
    V.d = -V.d;
  }
  Snf2 s;
  s.U = U;
  s.V = V;
  s.d1 = m.a;
  s.d2 = m.d;
  return s;
}

}  // namespace detail

// All period-n points of the linear map as exact rationals, solving
// (A^n - I) x = m over Q via the Smith form (no search, no duplicates).
inline std::vector<RatPt> period_points(const IMat2& A, int n) {
  IMat2 M = A.pow(n);
  M.a -= 1;
  M.d -= 1;
  long long q = std::llabs(M.det());
  if (q == 0) throw ConfigError("period_points: A^n - I singular (not hyperbolic)");
  auto snf = detail::smith_normal_form(M);
  long long d1 = snf.d1, d2 = snf.d2;
  // x = V y with y = (p/d1, r/d2); common denominator d2 (d1 | d2)
  if (d1 * d2 != q) throw ConfigError("period_points: SNF inconsistency");
  long long scale = d2 / d1;
  std::vector<RatPt> pts;
  pts.reserve(size_t(q));
  for (long long p = 0; p < d1; ++p)
    for (long long r = 0; r < d2; ++r) {
      long long n0 = snf.V.a * p * scale + snf.V.b * r;
      long long n1 = snf.V.c * p * scale + snf.V.d * r;
      pts.push_back(RatPt::make(n0, n1, d2));
    }
  return pts;
}

inline OrbitSet enumerate_periodic_orbits(const AnosovMap& map, int P,
                                          long long point_budget = 4000000) {
  if (P < 1) throw ConfigError("enumerate_periodic_orbits: P >= 1");
  if (!map.is_linear())
    throw ConfigError(
        "enumerate_periodic_orbits: exact enumeration needs a linear map "
        "(perturbed maps get orbits through the conjugacy)");
  OrbitSet set;
  set.matrix = map.matrix();
  set.max_period = P;
  long long total = 0;
  for (int n = 1; n <= P; ++n) {
    IMat2 M = map.matrix().pow(n);
    M.a -= 1;
    M.d -= 1;
    long long q = std::llabs(M.det());
    set.period_point_counts.push_back(q);
    total += q;
    if (total > point_budget)
      throw ConfigError(
          "enumerate_periodic_orbits: orbit budget of " +
          std::to_string(point_budget) + " points exceeded at period " +
          std::to_string(n));
    auto pts = period_points(map.matrix(), n);
    std::set<RatPt> seen;
    for (const auto& p0 : pts) {
      if (seen.count(p0)) continue;
      // walk the cycle
      std::vector<RatPt> cyc{p0};
      RatPt x = p0.apply(map.matrix());
      while (!(x == p0)) {
        cyc.push_back(x);
        x = x.apply(map.matrix());
      }
      for (const auto& p : cyc) seen.insert(p);
      if (int(cyc.size()) != n) continue;  // non-primitive, counted at its own period
      // rotate so the lexicographically smallest point leads
      size_t best = 0;
      for (size_t i = 1; i < cyc.size(); ++i)
        if (cyc[i] < cyc[best]) best = i;
      std::rotate(cyc.begin(), cyc.begin() + best, cyc.end());
      PeriodicOrbit orb;
      orb.period = n;
      orb.points = std::move(cyc);
      set.orbits.push_back(std::move(orb));
    }
  }
  return set;
}

// Exact divisor-sum consistency: sum_{d|n} d * #prim(d) == |det(A^n - I)|.
inline bool orbit_counts_consistent(const OrbitSet& set) {
  for (int n = 1; n <= set.max_period; ++n) {
    long long acc = 0;
    for (const auto& o : set.orbits)
      if (n % o.period == 0) acc += o.period;
    if (acc != set.period_point_counts[size_t(n) - 1]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// X-ray transforms (normalized orbit averages)
// ---------------------------------------------------------------------------

// Discrete Birkhoff average of a base function over a map orbit.
inline double xray(const TrigPoly2& f, const PeriodicOrbit& orbit) {
  double s = 0;
  for (const auto& p : orbit.points) s += f.eval_real(p.x(), p.y());
  return s / double(orbit.points.size());
}

inline double xray(const Grid2Field& f, const PeriodicOrbit& orbit,
                   double sparse_tol = 1e-15) {
  TrigPoly2 p = f.sparse_modes(sparse_tol);
  return xray(p, orbit);
}

// Unnormalized Birkhoff sum (the Livsic obstruction data).
inline double birkhoff_sum(const TrigPoly2& f, const PeriodicOrbit& orbit) {
  double s = 0;
  for (const auto& p : orbit.points) s += f.eval_real(p.x(), p.y());
  return s;
}

// Roof-weighted orbit average for a suspension flow and a base observable:
// If(gamma) = sum r(x_i) f(x_i) / sum r(x_i).
inline double xray_flow(const AnosovFlow& flow, const TrigPoly2& f,
                        const PeriodicOrbit& orbit) {
  double num = 0, den = 0;
  for (const auto& p : orbit.points) {
    double r = flow.roof_at(p.x(), p.y());
    num += r * f.eval_real(p.x(), p.y());
    den += r;
  }
  return num / den;
}

// Closed-orbit period of the suspension orbit over a base orbit. Summation
// starts at the lexicographically minimal point so the result is independent
// of which representative the caller rotated to the front.
inline double orbit_flow_period(const AnosovFlow& flow,
                                const PeriodicOrbit& orbit) {
  size_t start = 0;
  for (size_t i = 1; i < orbit.points.size(); ++i)
    if (orbit.points[i] < orbit.points[start]) start = i;
  double s = 0;
  for (size_t i = 0; i < orbit.points.size(); ++i) {
    const RatPt& p = orbit.points[(start + i) % orbit.points.size()];
    s += flow.roof_at(p.x(), p.y());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Marked spectrum tables
// ---------------------------------------------------------------------------

struct SpectrumRow {
  std::string orbit_id;
  int period_steps = 0;
  double length_a = 0;
  double length_b = 0;  // optional second system
  double ratio = 0;
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
};

inline std::string orbit_id_of(const PeriodicOrbit& o) {
  const RatPt& r = o.representative();
  return std::to_string(o.period) + ":" + std::to_string(r.n0) + "/" +
         std::to_string(r.den) + "," + std::to_string(r.n1) + "/" +
         std::to_string(r.den);
}

inline SpectrumTable marked_spectrum(const AnosovFlow& flow,
                                     const OrbitSet& orbits, int P) {
  SpectrumTable t;
  for (const auto* o : orbits.up_to(P)) {
    SpectrumRow row;
    row.orbit_id = orbit_id_of(*o);
    row.period_steps = o->period;
    row.length_a = orbit_flow_period(flow, *o);
    row.length_b = row.length_a;
    row.ratio = 1.0;
    if (row.length_a <= 0)
      throw ConfigError("marked_spectrum: nonpositive orbit length");
    t.rows.push_back(row);
  }
  return t;
}

inline SpectrumTable marked_spectrum_pair(const AnosovFlow& fa,
                                          const AnosovFlow& fb,
                                          const OrbitSet& orbits, int P) {
  SpectrumTable t;
  for (const auto* o : orbits.up_to(P)) {
    SpectrumRow row;
    row.orbit_id = orbit_id_of(*o);
    row.period_steps = o->period;
    row.length_a = orbit_flow_period(fa, *o);
    row.length_b = orbit_flow_period(fb, *o);
    row.ratio = row.length_b / row.length_a;
    t.rows.push_back(row);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Words in the Bolza group
// ---------------------------------------------------------------------------

// Letters 0..7 index FuchsianGroup::gens; i and inverse_index(i) cancel.
struct WordClass {
  std::vector<int> word;  // cyclically reduced, canonical rotation
  double trace = 0;
  double length = 0;
};

inline std::vector<int> cyclic_reduce(std::vector<int> w) {
  // free reduction
  std::vector<int> r;
  for (int g : w) {
    if (!r.empty() && r.back() == FuchsianGroup::inverse_index(g))
      r.pop_back();
    else
      r.push_back(g);
  }
  // cyclic reduction
  while (r.size() >= 2 && r.front() == FuchsianGroup::inverse_index(r.back())) {
    r.erase(r.begin());
    r.pop_back();
  }
  return r;
}

inline std::vector<int> canonical_rotation(const std::vector<int>& w) {
  if (w.empty()) return w;
  std::vector<int> best = w;
  std::vector<int> cur = w;
  for (size_t i = 1; i < w.size(); ++i) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

// Canonical key: minimal rotation among the word and its inverse.
inline std::vector<int> canonical_word(std::vector<int> w) {
  w = cyclic_reduce(std::move(w));
  std::vector<int> inv(w.rbegin(), w.rend());
  for (int& g : inv) g = FuchsianGroup::inverse_index(g);
  auto a = canonical_rotation(w), b = canonical_rotation(inv);
  return a < b ? a : b;
}

inline Mat2 word_matrix(const FuchsianGroup& g, const std::vector<int>& w) {
  Mat2 p = Mat2::identity();
  for (int idx : w) p = p.mul(g.gen(idx));
  return p;
}

inline double geodesic_length_word(const FuchsianGroup& g,
                                   const std::vector<int>& w) {
  if (w.empty()) throw ConfigError("geodesic_length_word: empty word");
  auto red = cyclic_reduce(w);
  if (red.empty())
    throw ConfigError("geodesic_length_word: word reduces to identity");
  Mat2 m = word_matrix(g, red);
  double tr = std::abs(m.trace());
  if (tr <= 2.0 + 1e-12)
    throw ConfigError("geodesic_length_word: elliptic or parabolic word");
  return 2.0 * std::acosh(tr / 2.0);
}

inline WordClass word_class(const FuchsianGroup& g, std::vector<int> w) {
  WordClass c;
  c.word = canonical_word(std::move(w));
  Mat2 m = word_matrix(g, c.word);
  c.trace = m.trace();
  c.length = geodesic_length_word(g, c.word);
  return c;
}

}  // namespace anosov
