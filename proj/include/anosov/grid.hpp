// Periodic scalar fields on T^2 and on the cat-map mapping torus, with dual
// real-space / Fourier representations kept in sync lazily.
//
// Conventions, used everywhere downstream:
//   * lattice points x_{ij} = (i/n, j/n), values stored row-major, index
//     i (first coordinate) slow, j fast;
//   * coefficients c_k with f(x) = sum_k c_k e^{2 pi i <k,x>}, k stored in
//     FFT order (k = idx for idx < n/2, idx - n otherwise);
//   * the frequency used by multipliers is xi = 2 pi k.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "anosov/core.hpp"

namespace anosov {

struct GridSpec {
  int n_side = 64;  // grid points per torus dimension; power of two, >= 8
  int n_s = 16;     // slices in the suspension direction, >= 4

  void validate() const {
    if (n_side < 8 || !detail::is_pow2(size_t(n_side)))
      throw ConfigError("GridSpec: n_side must be a power of two >= 8");
    if (n_s < 4) throw ConfigError("GridSpec: n_s must be >= 4");
  }
  bool operator==(const GridSpec& o) const {
    return n_side == o.n_side && n_s == o.n_s;
  }
};

inline int fft_index_to_k(int idx, int n) { return idx < n / 2 ? idx : idx - n; }
inline int k_to_fft_index(int k, int n) {
  int r = k % n;
  if (r < 0) r += n;
  return r;
}

// Sparse trigonometric polynomial on T^2: exact off-lattice evaluation and
// exact derivatives. Used for perturbations, weights and analytic test data.
struct TrigPoly2 {
  struct Mode {
    int k0, k1;
    cplx c;
  };
  std::vector<Mode> modes;

  cplx eval(double x, double y) const {
    cplx s = 0;
    for (const auto& m : modes)
      s += m.c * std::polar(1.0, kTwoPi * (m.k0 * x + m.k1 * y));
    return s;
  }
  double eval_real(double x, double y) const { return eval(x, y).real(); }
  // gradient of the real part
  Vec2 grad_real(double x, double y) const {
    cplx gx = 0, gy = 0;
    for (const auto& m : modes) {
      cplx e = m.c * std::polar(1.0, kTwoPi * (m.k0 * x + m.k1 * y));
      gx += e * cplx(0, kTwoPi * m.k0);
      gy += e * cplx(0, kTwoPi * m.k1);
    }
    return {gx.real(), gy.real()};
  }
  // add c * e^{2 pi i <k,x>} + conj for a real cosine/sine pair
  void add_real_cos(int k0, int k1, double amp, double phase = 0) {
    modes.push_back({k0, k1, 0.5 * std::polar(amp, phase)});
    modes.push_back({-k0, -k1, 0.5 * std::polar(amp, -phase)});
  }
};

class Grid2Field {
 public:
  Grid2Field() = default;
  explicit Grid2Field(GridSpec spec) : spec_(spec) {
    spec_.validate();
    values_.assign(size_t(spec_.n_side) * spec_.n_side, cplx(0));
    has_values_ = true;
  }

  static Grid2Field from_values(GridSpec spec, std::vector<cplx> v) {
    Grid2Field f(spec);
    if (v.size() != f.values_.size())
      throw ConfigError("Grid2Field: value size mismatch");
    f.values_ = std::move(v);
    f.has_values_ = true;
    f.has_coeffs_ = false;
    return f;
  }

  static Grid2Field from_function(GridSpec spec,
                                  const std::function<cplx(double, double)>& g) {
    Grid2Field f(spec);
    int n = spec.n_side;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        f.values_[size_t(i) * n + j] = g(double(i) / n, double(j) / n);
    f.has_values_ = true;
    f.has_coeffs_ = false;
    return f;
  }

  static Grid2Field from_trig(GridSpec spec, const TrigPoly2& p) {
    Grid2Field f(spec);
    f.ensure_coeffs();
    std::fill(f.coeffs_.begin(), f.coeffs_.end(), cplx(0));
    int n = spec.n_side;
    for (const auto& m : p.modes) {
      if (std::abs(m.k0) >= n / 2 || std::abs(m.k1) >= n / 2)
        throw ConfigError("Grid2Field: trig mode beyond grid Nyquist");
      f.coeffs_[size_t(k_to_fft_index(m.k0, n)) * n + k_to_fft_index(m.k1, n)] +=
          m.c;
    }
    f.has_coeffs_ = true;
    f.has_values_ = false;
    return f;
  }

  static Grid2Field mode(GridSpec spec, int k0, int k1, cplx amp = 1.0) {
    TrigPoly2 p;
    p.modes.push_back({k0, k1, amp});
    return from_trig(spec, p);
  }

  const GridSpec& spec() const { return spec_; }
  int n() const { return spec_.n_side; }

  const std::vector<cplx>& values() const {
    ensure_values();
    return values_;
  }
  const std::vector<cplx>& coeffs() const {
    ensure_coeffs();
    return coeffs_;
  }
  std::vector<cplx>& mutable_values() {
    ensure_values();
    has_coeffs_ = false;
    return values_;
  }
  std::vector<cplx>& mutable_coeffs() {
    ensure_coeffs();
    has_values_ = false;
    return coeffs_;
  }

  cplx value_at(int i, int j) const {
    ensure_values();
    int n = spec_.n_side;
    i %= n;
    if (i < 0) i += n;
    j %= n;
    if (j < 0) j += n;
    return values_[size_t(i) * n + j];
  }

  cplx coeff(int k0, int k1) const {
    ensure_coeffs();
    int n = spec_.n_side;
    if (std::abs(k0) > n / 2 || std::abs(k1) > n / 2) return 0;
    return coeffs_[size_t(k_to_fft_index(k0, n)) * n + k_to_fft_index(k1, n)];
  }

  // Exact spectral evaluation off the lattice (cost: #nonzero coefficients).
  cplx eval(double x, double y, double drop_tol = 0.0) const {
    ensure_coeffs();
    int n = spec_.n_side;
    cplx s = 0;
    for (int ik = 0; ik < n; ++ik) {
      int k0 = fft_index_to_k(ik, n);
      for (int jk = 0; jk < n; ++jk) {
        cplx c = coeffs_[size_t(ik) * n + jk];
        if (std::abs(c) <= drop_tol) continue;
        int k1 = fft_index_to_k(jk, n);
        s += c * std::polar(1.0, kTwoPi * (k0 * x + k1 * y));
      }
    }
    return s;
  }

  // Sparse view of nonzero coefficients (for orbit sums on band-limited data).
  TrigPoly2 sparse_modes(double tol = 1e-15) const {
    ensure_coeffs();
    TrigPoly2 p;
    int n = spec_.n_side;
    for (int ik = 0; ik < n; ++ik)
      for (int jk = 0; jk < n; ++jk) {
        cplx c = coeffs_[size_t(ik) * n + jk];
        if (std::abs(c) > tol)
          p.modes.push_back({fft_index_to_k(ik, n), fft_index_to_k(jk, n), c});
      }
    return p;
  }

  double max_abs() const {
    ensure_values();
    double m = 0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  double max_imag() const {
    ensure_values();
    double m = 0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
  }
  double l2() const {
    ensure_values();
    double s = 0;
    for (const auto& v : values_) s += std::norm(v);
    return std::sqrt(s / double(values_.size()));
  }
  cplx mean() const { return coeff(0, 0); }

  Grid2Field& operator+=(const Grid2Field& o) {
    check_same(o);
    ensure_values();
    o.ensure_values();
    for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    has_coeffs_ = false;
    return *this;
  }
  Grid2Field& operator-=(const Grid2Field& o) {
    check_same(o);
    ensure_values();
    o.ensure_values();
    for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    has_coeffs_ = false;
    return *this;
  }
  Grid2Field& operator*=(cplx c) {
    ensure_values();
    for (auto& v : values_) v *= c;
    has_coeffs_ = false;
    return *this;
  }
  friend Grid2Field operator+(Grid2Field a, const Grid2Field& b) { return a += b; }
  friend Grid2Field operator-(Grid2Field a, const Grid2Field& b) { return a -= b; }
  friend Grid2Field operator*(Grid2Field a, cplx c) { return a *= c; }

  // f(x) -> f(M x) for an integer unimodular M: exact lattice permutation.
  Grid2Field compose_int(const IMat2& m) const {
    ensure_values();
    int n = spec_.n_side;
    Grid2Field out(spec_);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        long long i2 = RatPt::mod(m.a * i + m.b * j, n);
        long long j2 = RatPt::mod(m.c * i + m.d * j, n);
        out.values_[size_t(i) * n + j] = values_[size_t(i2) * n + j2];
      }
    out.has_values_ = true;
    out.has_coeffs_ = false;
    return out;
  }

  // Apply a frequency multiplier m(k0, k1).
  Grid2Field multiplier(const std::function<double(int, int)>& m) const {
    ensure_coeffs();
    int n = spec_.n_side;
    Grid2Field out(spec_);
    out.coeffs_.assign(values_.size(), cplx(0));
    for (int ik = 0; ik < n; ++ik) {
      int k0 = fft_index_to_k(ik, n);
      for (int jk = 0; jk < n; ++jk) {
        int k1 = fft_index_to_k(jk, n);
        out.coeffs_[size_t(ik) * n + jk] =
            coeffs_[size_t(ik) * n + jk] * m(k0, k1);
      }
    }
    out.has_coeffs_ = true;
    out.has_values_ = false;
    return out;
  }

  // Pointwise product (exact on the grid; aliasing is the caller's concern).
  Grid2Field pointwise(const Grid2Field& o) const {
    check_same(o);
    ensure_values();
    o.ensure_values();
    Grid2Field out(spec_);
    for (size_t i = 0; i < values_.size(); ++i)
      out.values_[i] = values_[i] * o.values_[i];
    out.has_values_ = true;
    out.has_coeffs_ = false;
    return out;
  }

  double roundtrip_error() const {
    // relative value->coeff->value discrepancy
    ensure_values();
    Grid2Field copy = *this;
    copy.ensure_coeffs();
    copy.has_values_ = false;
    copy.ensure_values();
    double num = 0, den = 0;
    for (size_t i = 0; i < values_.size(); ++i) {
      num = std::max(num, std::abs(copy.values_[i] - values_[i]));
      den = std::max(den, std::abs(values_[i]));
    }
    return den > 0 ? num / den : num;
  }

 private:
  void check_same(const Grid2Field& o) const {
    if (!(spec_ == o.spec_)) throw ConfigError("Grid2Field: spec mismatch");
  }
  void ensure_values() const {
    if (has_values_) return;
    auto* self = const_cast<Grid2Field*>(this);
    self->values_ = coeffs_;
    int n = spec_.n_side;
    fft_axis(self->values_, n, n, 1, true);   // rows (axis 0)
    fft_axis(self->values_, n, 1, n, true);   // cols (axis 1)
    self->has_values_ = true;
  }
  void ensure_coeffs() const {
    if (has_coeffs_) return;
    auto* self = const_cast<Grid2Field*>(this);
    self->coeffs_ = values_;
    int n = spec_.n_side;
    fft_axis(self->coeffs_, n, n, 1, false);
    fft_axis(self->coeffs_, n, 1, n, false);
    double norm = 1.0 / (double(n) * double(n));
    for (auto& c : self->coeffs_) c *= norm;
    self->has_coeffs_ = true;
  }

  GridSpec spec_;
  mutable std::vector<cplx> values_, coeffs_;
  mutable bool has_values_ = false, has_coeffs_ = false;
};

// Field on the mapping torus T^2 x [0,1] / (x,1) ~ (A x, 0). Slice j lives at
// height s = j / n_s. The twist matrix A must map the lattice to itself.
class MappingTorusField {
 public:
  MappingTorusField() = default;
  MappingTorusField(GridSpec spec, IMat2 twist)
      : spec_(spec), twist_(twist) {
    spec_.validate();
    slices_.assign(spec_.n_s, Grid2Field(spec_));
  }

  static MappingTorusField from_function(
      GridSpec spec, IMat2 twist,
      const std::function<cplx(double, double, double)>& g) {
    MappingTorusField f(spec, twist);
    for (int j = 0; j < spec.n_s; ++j) {
      double s = double(j) / spec.n_s;
      f.slices_[j] = Grid2Field::from_function(
          spec, [&](double x, double y) { return g(x, y, s); });
    }
    return f;
  }

  const GridSpec& spec() const { return spec_; }
  const IMat2& twist() const { return twist_; }
  int n_s() const { return spec_.n_s; }

  Grid2Field& slice(int j) { return slices_[j]; }
  const Grid2Field& slice(int j) const { return slices_[j]; }

  // Slice at arbitrary integer index, unrolling the twisted periodicity:
  // slice(j + n_s) = slice(j) composed with A.
  Grid2Field twisted_slice(int j) const {
    int ns = spec_.n_s;
    int wrap = j >= 0 ? j / ns : -((-j + ns - 1) / ns);
    int base = j - wrap * ns;  // in [0, ns)
    if (wrap == 0) return slices_[base];
    IMat2 p = wrap > 0 ? twist_.pow(wrap)
                       : twist_.inverse_unimodular().pow(-wrap);
    return slices_[base].compose_int(p);
  }

  double max_abs() const {
    double m = 0;
    for (const auto& s : slices_) m = std::max(m, s.max_abs());
    return m;
  }

  MappingTorusField& operator+=(const MappingTorusField& o) {
    for (int j = 0; j < n_s(); ++j) slices_[j] += o.slices_[j];
    return *this;
  }
  MappingTorusField& operator-=(const MappingTorusField& o) {
    for (int j = 0; j < n_s(); ++j) slices_[j] -= o.slices_[j];
    return *this;
  }
  MappingTorusField& operator*=(cplx c) {
    for (auto& s : slices_) s *= c;
    return *this;
  }
  friend MappingTorusField operator+(MappingTorusField a,
                                     const MappingTorusField& b) {
    return a += b;
  }
  friend MappingTorusField operator-(MappingTorusField a,
                                     const MappingTorusField& b) {
    return a -= b;
  }

  double linf_distance(const MappingTorusField& o) const {
    double m = 0;
    for (int j = 0; j < n_s(); ++j)
      m = std::max(m, (slices_[j] - o.slices_[j]).max_abs());
    return m;
  }

 private:
  GridSpec spec_;
  IMat2 twist_;
  std::vector<Grid2Field> slices_;
};

}  // namespace anosov
