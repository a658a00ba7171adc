#pragma once

// Data-parallel kernels over trait vectors.
//
// Every backend accumulates in four interleaved lanes (element i goes to lane
// i % 4 for the blocked body), combines the lanes as (l0 + l1) + (l2 + l3) and
// then adds the tail sequentially. No fused multiply-add is used. Under this
// contract all backends are bitwise identical, so run artifacts do not depend
// on which instruction set the host supports.

#include <cstddef>
#include <span>
#include <string_view>

namespace lumen::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

struct KernelTable {
  Backend backend;
  double (*sum)(const double* x, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out[i] = offset + scale * x[i]
  void (*affine)(const double* x, double scale, double offset, double* out, std::size_t n);
  // out[i] = min(hi, max(lo, x[i]))
  void (*clamp)(const double* x, double lo, double hi, double* out, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}

// Null when the backend was not compiled in for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// True when the backend is compiled in and the running CPU supports it.
bool backend_available(Backend b);

/// The table in use. Chosen once at first call: the best available backend,
/// unless LUMEN_SIMD=scalar|avx2|neon selects one explicitly.
const KernelTable& active();

/// Overrides the active backend. Throws std::invalid_argument if unavailable.
void force_backend(Backend b);

// Convenience wrappers over active().
double sum(std::span<const double> x);
double mean(std::span<const double> x);
double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);
void affine(std::span<const double> x, double scale, double offset, std::span<double> out);
void clamp(std::span<const double> x, double lo, double hi, std::span<double> out);

}  // namespace lumen::simd
