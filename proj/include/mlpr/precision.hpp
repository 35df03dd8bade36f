#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlpr/problem.hpp"
#include "mlpr/xscalar.hpp"

namespace mlpr {

using XVec = std::vector<XScalar>;

enum class ReferenceMode { Minimal, Stochastic };

struct ReferenceSolution {
  XVec x;
  Vec x_double;
  double residual = 0.0;  // ||a + B x^2 - x||_inf evaluated in double-double
  std::size_t iterations = 0;
  bool converged = false;
};

struct ReferenceOptions {
  double tol = 1e-28;
  std::size_t maxit = 200;
};

// Newton's method in double-double.
//
// Minimal: started from 0. PageRank problems run the GTH variant on a
// Col triplet with sums z (updated by the subtraction-free recurrence);
// general problems use partial-pivoting LU. Stochastic: started from v with
// partial-pivoting LU. The PageRank data is rebuilt in double-double from
// (v, P, alpha): v and the columns of P are renormalized, and alpha is taken
// as (1 - (1 - 2 alpha)) / 2 so a supplied exact 1 - 2 alpha is honoured.
ReferenceSolution reference_solution(const Problem& p, ReferenceMode mode, ReferenceOptions opts = {});

// a + B x^2 - x in double-double from binary64 data.
XVec residual_x(const Problem& p, std::span<const XScalar> x);

XVec to_xvec(std::span<const double> v);
Vec to_vec(std::span<const XScalar> v);

}  // namespace mlpr
