#pragma once

// Componentwise relative distance d(xt, x) = max |xt_i - x_i| / |x_i| with
// 0/0 = 0 and b/0 = inf. Not symmetric.

#include <cstddef>
#include <span>

#include "mlpr/matrix.hpp"

namespace mlpr {

struct CwDistance {
  double value = 0.0;
  std::size_t argmax = 0;  // flat index of the maximizing entry
};

CwDistance cw_distance(std::span<const double> xt, std::span<const double> x);
CwDistance cw_distance(const DenseMatrix& at, const DenseMatrix& a);

}  // namespace mlpr
