#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lumen/simd/kernels.hpp"

namespace lumen::simd {

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

namespace {

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar: return &scalar::table();
    case Backend::Avx2: return avx2_table();
    case Backend::Neon: return neon_table();
  }
  return nullptr;
}

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* select_initial() {
  if (const char* env = std::getenv("LUMEN_SIMD")) {
    const std::string want{env};
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (want == backend_name(b) && backend_available(b)) return table_for(b);
    }
  }
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (backend_available(b)) return table_for(b);
  }
  return &scalar::table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{select_initial()};
  return current;
}

}  // namespace

bool backend_available(Backend b) { return table_for(b) != nullptr && cpu_supports(b); }

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void force_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("SIMD backend not available: " + std::string(backend_name(b)));
  slot().store(table_for(b), std::memory_order_release);
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double mean(std::span<const double> x) { return sum(x) / static_cast<double>(x.size()); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("squared_distance: length mismatch");
  return active().squared_distance(a.data(), b.data(), a.size());
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

void affine(std::span<const double> x, double scale, double offset, std::span<double> out) {
  if (out.size() != x.size()) throw std::invalid_argument("affine: length mismatch");
  active().affine(x.data(), scale, offset, out.data(), x.size());
}

void clamp(std::span<const double> x, double lo, double hi, std::span<double> out) {
  if (out.size() != x.size()) throw std::invalid_argument("clamp: length mismatch");
  active().clamp(x.data(), lo, hi, out.data(), x.size());
}

}  // namespace lumen::simd
