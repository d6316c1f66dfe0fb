// Core numerics: deterministic RNG, FFTs, 2x2 integer/real linear algebra,
// exact rational points on the torus, least-squares fits.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace anosov {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// RNG: splitmix64. One 64-bit seed per run, split deterministically per task.
// ---------------------------------------------------------------------------

struct Rng {
  uint64_t state = 0x9e3779b97f4a7c15ULL;

  explicit Rng(uint64_t seed = 1) : state(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Deterministic child stream for a labelled subtask.
  Rng split(uint64_t task) const {
    Rng r(state ^ (0x632be59bd9b4e019ULL + task * 0x9e3779b97f4a7c15ULL));
    r.next_u64();
    return r;
  }

  double uniform() {  // [0,1)
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    // Box-Muller; two uniforms per call, no cached spare (determinism).
    double u1 = std::max(uniform(), 0x1.0p-60), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + int(next_u64() % uint64_t(hi - lo + 1));
  }
};

// ---------------------------------------------------------------------------
// FFT. Iterative radix-2 for powers of two, Bluestein otherwise.
// Forward transform uses e^{-2 pi i jk/n}; no normalization (callers decide).
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_pow2(size_t n) { return n && !(n & (n - 1)); }

inline const std::vector<cplx>& twiddles(size_t n) {
  static std::map<size_t, std::vector<cplx>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> tw(n / 2);
  for (size_t i = 0; i < n / 2; ++i) {
    double ang = -kTwoPi * double(i) / double(n);
    tw[i] = cplx(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(n, std::move(tw)).first->second;
}

inline void fft_pow2(cplx* a, size_t n, bool inverse) {
  if (n < 2) return;
  // bit reversal
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& tw = twiddles(n);
  for (size_t len = 2; len <= n; len <<= 1) {
    size_t step = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        cplx w = tw[k * step];
        if (inverse) w = std::conj(w);
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

// Bluestein's algorithm for arbitrary length (used for odd slice counts).
inline void fft_bluestein(cplx* a, size_t n, bool inverse) {
  size_t m = 1;
  while (m < 2 * n + 1) m <<= 1;
  std::vector<cplx> w(n);
  for (size_t k = 0; k < n; ++k) {
    // e^{-i pi k^2 / n}, sign flipped for inverse
    double ang = kPi * double((unsigned long long)(k) * k % (2 * n)) / double(n);
    if (inverse) ang = -ang;
    w[k] = cplx(std::cos(-ang), std::sin(-ang));
  }
  std::vector<cplx> x(m, cplx(0)), y(m, cplx(0));
  for (size_t k = 0; k < n; ++k) x[k] = a[k] * w[k];
  for (size_t k = 0; k < n; ++k) {
    y[k] = std::conj(w[k]);
    if (k) y[m - k] = std::conj(w[k]);
  }
  fft_pow2(x.data(), m, false);
  fft_pow2(y.data(), m, false);
  for (size_t k = 0; k < m; ++k) x[k] *= y[k];
  fft_pow2(x.data(), m, true);
  for (size_t k = 0; k < n; ++k) a[k] = x[k] * w[k] / double(m);
}

}  // namespace detail

inline void fft(cplx* a, size_t n, bool inverse) {
  if (detail::is_pow2(n))
    detail::fft_pow2(a, n, inverse);
  else
    detail::fft_bluestein(a, n, inverse);
}

// In-place transform along the middle axis of data laid out as
// [outer][len][inner] (contiguous, row-major).
inline void fft_axis(std::vector<cplx>& data, size_t len, size_t inner,
                     size_t outer, bool inverse) {
  std::vector<cplx> buf(len);
  for (size_t o = 0; o < outer; ++o) {
    for (size_t i = 0; i < inner; ++i) {
      size_t off = o * (len * inner) + i;
      for (size_t k = 0; k < len; ++k) buf[k] = data[off + k * inner];
      fft(buf.data(), len, inverse);
      for (size_t k = 0; k < len; ++k) data[off + k * inner] = buf[k];
    }
  }
}

// ---------------------------------------------------------------------------
// Small linear algebra
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0, y = 0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {x * c, y * c}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    double n = norm();
    return {x / n, y / n};
  }
  Vec2 perp() const { return {-y, x}; }
};

struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;  // [[a,b],[c,d]]
  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 mul(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
  }
  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  Mat2 inverse() const {
    double dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  Mat2 transpose() const { return {a, c, b, d}; }
  double op_norm() const {  // spectral norm via 2x2 singular values
    double a2 = a * a + c * c, b2 = b * b + d * d, ab = a * b + c * d;
    double tr = a2 + b2, dd = std::sqrt((a2 - b2) * (a2 - b2) + 4 * ab * ab);
    return std::sqrt(0.5 * (tr + dd));
  }
  static Mat2 identity() { return {1, 0, 0, 1}; }
};

struct IMat2 {
  long long a = 1, b = 0, c = 0, d = 1;
  long long det() const { return a * d - b * c; }
  long long trace() const { return a + d; }
  IMat2 mul(const IMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
  }
  IMat2 pow(int n) const {
    IMat2 r{1, 0, 0, 1}, base = *this;
    for (; n > 0; n >>= 1) {
      if (n & 1) r = r.mul(base);
      base = base.mul(base);
    }
    return r;
  }
  // inverse for |det| = 1
  IMat2 inverse_unimodular() const {
    long long dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  IMat2 transpose() const { return {a, c, b, d}; }
  Mat2 to_real() const { return {double(a), double(b), double(c), double(d)}; }
};

// ---------------------------------------------------------------------------
// Exact rational points on T^2 with a common denominator (periodic orbits of
// unimodular integer maps). Stored reduced modulo 1: 0 <= num < den.
// ---------------------------------------------------------------------------

struct RatPt {
  long long n0 = 0, n1 = 0;  // numerators
  long long den = 1;

  static long long mod(long long v, long long m) {
    long long r = v % m;
    return r < 0 ? r + m : r;
  }
  static RatPt make(long long n0, long long n1, long long den) {
    return RatPt{mod(n0, den), mod(n1, den), den};
  }
  bool operator==(const RatPt& o) const {
    return n0 == o.n0 && n1 == o.n1 && den == o.den;
  }
  bool operator<(const RatPt& o) const {
    return std::tie(n0, n1) < std::tie(o.n0, o.n1);
  }
  double x() const { return double(n0) / double(den); }
  double y() const { return double(n1) / double(den); }
  RatPt apply(const IMat2& m) const {
    // A maps (1/den)Z^2 to itself; reduce mod den
    long long r0 = mod(m.a * n0 + m.b * n1, den);
    long long r1 = mod(m.c * n0 + m.d * n1, den);
    return RatPt{r0, r1, den};
  }
};

// ---------------------------------------------------------------------------
// Least squares y ~ a + b x
// ---------------------------------------------------------------------------

struct LinFit {
  double intercept = 0, slope = 0, residual_rms = 0;
  int n = 0;
};

inline LinFit linear_fit(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  LinFit f;
  f.n = int(xs.size());
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double n = double(xs.size());
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300)
    throw std::invalid_argument("linear_fit: degenerate abscissae");
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / n);
  return f;
}

// ---------------------------------------------------------------------------
// Deterministic parallel map: results land in index-order slots, so the
// outcome does not depend on scheduling. jobs <= 1 runs inline.
// ---------------------------------------------------------------------------

template <typename F>
void parallel_for(size_t count, int jobs, F&& body) {
  if (jobs <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  size_t next = 0;
  int nw = std::min<size_t>(jobs, count);
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= count) return;
          i = next++;
        }
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace anosov
