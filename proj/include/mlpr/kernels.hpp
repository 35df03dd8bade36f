#pragma once

// Data-parallel inner loops shared by the tensor contractions and the GTH
// elimination. Every kernel has a portable scalar reference implementation
// and optional SIMD variants (AVX2 on x86-64, NEON on AArch64) selected once
// at runtime.
//
// All variants are required to produce bit-identical results: the kernels are
// either elementwise (one multiply and one add per lane, never fused) or
// order-independent reductions (max). This keeps solver output deterministic
// regardless of which instruction set is active.

#include <cstddef>
#include <string_view>

namespace mlpr::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  // y[i] += a * x[i] for i < n
  void (*axpy)(double* y, const double* x, double a, std::size_t n);
  // y[i] += a * x[i] * w[i] for i < n, evaluated as (a * x[i]) * w[i]
  void (*axpy_mul)(double* y, const double* x, const double* w, double a, std::size_t n);
  // max |x[i]|, 0 for n == 0
  double (*max_abs)(const double* x, std::size_t n);
};

std::string_view isa_name(Isa isa);

// True if the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

const KernelTable& table_for(Isa isa);

// The table used by the library. Chosen on first use: the widest available
// ISA, unless the environment variable MLPR_SIMD names another one
// ("scalar", "avx2", "neon").
const KernelTable& active();

// Overrides the active table (tests and benchmarks). Throws if unavailable.
void set_active(Isa isa);

namespace detail {
extern const KernelTable scalar_table;
#if defined(MLPR_HAVE_AVX2_TU)
extern const KernelTable avx2_table;
#endif
#if defined(MLPR_HAVE_NEON_TU)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace mlpr::kernels
