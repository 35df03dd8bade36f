#include "mlpr/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// Compiled for AVX2 via function attributes so the rest of the library keeps
// the baseline ISA; only reached after a runtime CPU check.
#define MLPR_AVX2 __attribute__((target("avx2")))

namespace mlpr::kernels::detail {
namespace {

MLPR_AVX2 void axpy_avx2(double* y, const double* x, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
  }
  for (; i < n; ++i) {
    const double t = a * x[i];
    y[i] = y[i] + t;
  }
}

MLPR_AVX2 void axpy_mul_avx2(double* y, const double* x, const double* w, double a,
                             std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d t = _mm256_mul_pd(ax, _mm256_loadu_pd(w + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
  }
  for (; i < n; ++i) {
    const double t = (a * x[i]) * w[i];
    y[i] = y[i] + t;
  }
}

MLPR_AVX2 double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  __m256d vnan = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i));
    vnan = _mm256_or_pd(vnan, _mm256_cmp_pd(v, v, _CMP_UNORD_Q));
    vmax = _mm256_max_pd(vmax, v);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l) m = lanes[l] > m ? lanes[l] : m;
  const bool any_nan = _mm256_movemask_pd(vnan) != 0;
  for (; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (std::isnan(v)) return v;
    if (v > m) m = v;
  }
  return any_nan ? std::nan("") : m;
}

}  // namespace

const KernelTable avx2_table{Isa::Avx2, &axpy_avx2, &axpy_mul_avx2, &max_abs_avx2};

}  // namespace mlpr::kernels::detail
