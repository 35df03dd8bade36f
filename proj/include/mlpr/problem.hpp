#pragma once

#include <cstddef>
#include <optional>

#include "mlpr/matrix.hpp"
#include "mlpr/tensor.hpp"

namespace mlpr {

// x = (1 - alpha) v + alpha P x^2
struct PageRankData {
  Vec v;
  Tensor3 P;
  double alpha = 0.0;
  // 1 - 2 alpha, possibly supplied more accurately than the binary64 alpha
  // allows (near alpha = 1/2 this drives every GTH triplet).
  double one_minus_two_alpha = 0.0;
};

// x = a + B x^2
struct Problem {
  Vec a;
  Tensor3 B;
  std::optional<PageRankData> pr;

  std::size_t dim() const noexcept { return a.size(); }
  bool is_pagerank() const noexcept { return pr.has_value(); }

  static Problem general(Vec a, Tensor3 b);

  // Checks 1^T v = 1 within 1e-14, P column-stochastic within 1e-13 and
  // alpha in (0, 1). When `one_minus_two_alpha` is given it must agree with
  // alpha to within 1e-12.
  static Problem pagerank(Vec v, Tensor3 p, double alpha,
                          std::optional<double> one_minus_two_alpha = std::nullopt);

  void validate() const;
};

}  // namespace mlpr
