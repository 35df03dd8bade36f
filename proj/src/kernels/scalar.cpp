#include "mlpr/kernels.hpp"

#include <cmath>

namespace mlpr::kernels::detail {
namespace {

void axpy_scalar(double* y, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a * x[i];
    y[i] = y[i] + t;
  }
}

void axpy_mul_scalar(double* y, const double* x, const double* w, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (a * x[i]) * w[i];
    y[i] = y[i] + t;
  }
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (v > m || std::isnan(v)) m = v;
  }
  return m;
}

}  // namespace

const KernelTable scalar_table{Isa::Scalar, &axpy_scalar, &axpy_mul_scalar, &max_abs_scalar};

}  // namespace mlpr::kernels::detail
