#include "lumen/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace lumen::simd {
namespace {

// Two float64x2_t registers hold lanes {0,1} and {2,3}.
double combine(float64x2_t lo, float64x2_t hi) {
  const double l0 = vgetq_lane_f64(lo, 0), l1 = vgetq_lane_f64(lo, 1);
  const double l2 = vgetq_lane_f64(hi, 0), l3 = vgetq_lane_f64(hi, 1);
  return (l0 + l1) + (l2 + l3);
}

double sum(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  double total = combine(lo, hi);
  for (std::size_t i = body; i < n; ++i) total += x[i];
  return total;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    // Separate multiply and add: vfmaq would round differently from the scalar path.
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  double total = combine(lo, hi);
  for (std::size_t i = body; i < n; ++i) {
    const double d = a[i] - b[i];
    const double sq = d * d;
    total += sq;
  }
  return total;
}

void affine(const double* x, double scale, double offset, double* out, std::size_t n) {
  const float64x2_t s = vdupq_n_f64(scale), o = vdupq_n_f64(offset);
  const std::size_t body = n - n % 2;
  for (std::size_t i = 0; i < body; i += 2) vst1q_f64(out + i, vaddq_f64(o, vmulq_f64(s, vld1q_f64(x + i))));
  for (std::size_t i = body; i < n; ++i) {
    const double scaled = scale * x[i];
    out[i] = offset + scaled;
  }
}

void clamp(const double* x, double lo, double hi, double* out, std::size_t n) {
  const float64x2_t l = vdupq_n_f64(lo), h = vdupq_n_f64(hi);
  const std::size_t body = n - n % 2;
  for (std::size_t i = 0; i < body; i += 2) vst1q_f64(out + i, vminq_f64(h, vmaxq_f64(l, vld1q_f64(x + i))));
  for (std::size_t i = body; i < n; ++i) {
    const double v = x[i] < lo ? lo : x[i];
    out[i] = hi < v ? hi : v;
  }
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable t{Backend::Neon, &sum, &squared_distance, &affine, &clamp};
  return &t;
}

}  // namespace lumen::simd

#else

namespace lumen::simd {
const KernelTable* neon_table() { return nullptr; }
}  // namespace lumen::simd

#endif
