#include "mlpr/problem.hpp"

#include <cmath>
#include <string>

#include "mlpr/errors.hpp"

namespace mlpr {

Problem Problem::general(Vec a, Tensor3 b) {
  Problem p;
  p.a = std::move(a);
  p.B = std::move(b);
  p.validate();
  return p;
}

Problem Problem::pagerank(Vec v, Tensor3 pt, double alpha, std::optional<double> one_minus_two_alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (v.size() != pt.dim()) throw DimensionError("v and P dimensions differ");
  double s = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("v must be nonnegative");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-14) throw DomainError("v is not stochastic (sum " + std::to_string(s) + ")");
  const auto rep = check_stochastic(pt, 1.0, 1e-13);
  if (!rep.ok)
    throw DomainError("P is not column-stochastic: column (" + std::to_string(rep.worst_j + 1) + "," +
                      std::to_string(rep.worst_k + 1) + ") deviates by " + std::to_string(rep.max_deviation));
  double w = 1.0 - 2.0 * alpha;
  if (one_minus_two_alpha) {
    if (std::fabs(*one_minus_two_alpha - w) > 1e-12)
      throw DomainError("one_minus_two_alpha is inconsistent with alpha");
    w = *one_minus_two_alpha;
  }
  Problem p;
  p.a.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p.a[i] = (1.0 - alpha) * v[i];
  p.B = pt.scaled(alpha);
  p.pr = PageRankData{std::move(v), std::move(pt), alpha, w};
  return p;
}

void Problem::validate() const {
  if (a.empty()) throw DimensionError("problem dimension must be positive");
  if (B.dim() != a.size()) throw DimensionError("a and B dimensions differ");
  for (double x : a)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("a must be nonnegative");
  if (pr) {
    if (pr->v.size() != a.size() || pr->P.dim() != a.size()) throw DimensionError("PageRank data dimension");
    if (!(pr->alpha > 0.0 && pr->alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  }
}

}  // namespace mlpr
