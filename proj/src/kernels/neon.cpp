#include "mlpr/kernels.hpp"

#include <arm_neon.h>
#include <cmath>

namespace mlpr::kernels::detail {
namespace {

void axpy_neon(double* y, const double* x, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), t));
  }
  for (; i < n; ++i) {
    const double t = a * x[i];
    y[i] = y[i] + t;
  }
}

void axpy_mul_neon(double* y, const double* x, const double* w, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ax = vmulq_f64(va, vld1q_f64(x + i));
    const float64x2_t t = vmulq_f64(ax, vld1q_f64(w + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), t));
  }
  for (; i < n; ++i) {
    const double t = (a * x[i]) * w[i];
    y[i] = y[i] + t;
  }
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t vmax = vdupq_n_f64(0.0);
  std::size_t i = 0;
  bool any_nan = false;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vabsq_f64(vld1q_f64(x + i));
    any_nan = any_nan || std::isnan(vgetq_lane_f64(v, 0)) || std::isnan(vgetq_lane_f64(v, 1));
    vmax = vmaxnmq_f64(vmax, v);
  }
  double m = vmaxvq_f64(vmax);
  for (; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (std::isnan(v)) return v;
    if (v > m) m = v;
  }
  return any_nan ? std::nan("") : m;
}

}  // namespace

const KernelTable neon_table{Isa::Neon, &axpy_neon, &axpy_mul_neon, &max_abs_neon};

}  // namespace mlpr::kernels::detail
