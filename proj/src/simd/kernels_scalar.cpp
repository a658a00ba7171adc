#include "lumen/simd/kernels.hpp"

#include <algorithm>

namespace lumen::simd::scalar {
namespace {

double sum(const double* x, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    lane[0] += x[i];
    lane[1] += x[i + 1];
    lane[2] += x[i + 2];
    lane[3] += x[i + 3];
  }
  double acc = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) acc += x[i];
  return acc;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double d = a[i + k] - b[i + k];
      const double sq = d * d;
      lane[k] += sq;
    }
  }
  double acc = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) {
    const double d = a[i] - b[i];
    const double sq = d * d;
    acc += sq;
  }
  return acc;
}

void affine(const double* x, double scale, double offset, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = scale * x[i];
    out[i] = offset + scaled;
  }
}

void clamp(const double* x, double lo, double hi, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::min(hi, std::max(lo, x[i]));
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Backend::Scalar, &sum, &squared_distance, &affine, &clamp};
  return t;
}

}  // namespace lumen::simd::scalar
