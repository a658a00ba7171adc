// Compiled with -mavx2 (no -mfma); only entered after a runtime CPU check.
#include "lumen/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

namespace lumen::simd {
namespace {

double combine(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double total = combine(acc);
  for (std::size_t i = body; i < n; ++i) total += x[i];
  return total;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = combine(acc);
  for (std::size_t i = body; i < n; ++i) {
    const double d = a[i] - b[i];
    const double sq = d * d;
    total += sq;
  }
  return total;
}

void affine(const double* x, double scale, double offset, double* out, std::size_t n) {
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d o = _mm256_set1_pd(offset);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(o, _mm256_mul_pd(s, _mm256_loadu_pd(x + i))));
  for (std::size_t i = body; i < n; ++i) {
    const double scaled = scale * x[i];
    out[i] = offset + scaled;
  }
}

void clamp(const double* x, double lo, double hi, double* out, std::size_t n) {
  const __m256d l = _mm256_set1_pd(lo);
  const __m256d h = _mm256_set1_pd(hi);
  const std::size_t body = n - n % 4;
  // max(lo, x) then min(hi, .) matches std::min(hi, std::max(lo, x)) for finite inputs.
  for (std::size_t i = 0; i < body; i += 4)
    _mm256_storeu_pd(out + i, _mm256_min_pd(h, _mm256_max_pd(l, _mm256_loadu_pd(x + i))));
  for (std::size_t i = body; i < n; ++i) {
    const double v = x[i] < lo ? lo : x[i];
    out[i] = hi < v ? hi : v;
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable t{Backend::Avx2, &sum, &squared_distance, &affine, &clamp};
  return &t;
}

}  // namespace lumen::simd

#else

namespace lumen::simd {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace lumen::simd

#endif
