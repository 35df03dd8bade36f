#include "mlpr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mlpr/errors.hpp"
#include "mlpr/mmatrix.hpp"
#include "mlpr/precision.hpp"

namespace mlpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double xt, double x) {
  if (x == 0.0) return xt == 0.0 ? 0.0 : kInf;
  return std::fabs(xt - x) / std::fabs(x);
}

DenseMatrix coupling(const Tensor3& b, std::span<const double> x) {
  const std::size_t n = b.dim();
  DenseMatrix c(n, n);
  for (const auto& e : b.entries()) {
    c(e.i, e.k) += e.value * x[e.j];
    c(e.i, e.j) += e.value * x[e.k];
  }
  return c;
}

// Column sums of R = I - C, or nullopt if some are negative (then R has no
// usable Col triplet with v = 1).
std::optional<Vec> r_colsums(const Problem& p, const DenseMatrix& c) {
  const std::size_t n = p.dim();
  Vec s(n);
  if (p.is_pagerank()) {
    s.assign(n, std::fabs(p.pr->one_minus_two_alpha));
    return s;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += c(i, j);
    s[j] = 1.0 - t;
    if (s[j] < 0.0) return std::nullopt;
  }
  return s;
}

DenseMatrix without_diagonal(DenseMatrix c) {
  for (std::size_t i = 0; i < c.rows(); ++i) c(i, i) = 0.0;
  return c;
}

}  // namespace

CwDistance cw_distance(std::span<const double> xt, std::span<const double> x) {
  if (xt.size() != x.size()) throw DimensionError("cw_distance: dimension mismatch");
  CwDistance d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = rel(xt[i], x[i]);
    if (r > d.value || std::isnan(r)) {
      d.value = r;
      d.argmax = i;
    }
  }
  return d;
}

CwDistance cw_distance(const DenseMatrix& at, const DenseMatrix& a) {
  if (at.rows() != a.rows() || at.cols() != a.cols()) throw DimensionError("cw_distance: dimension mismatch");
  return cw_distance(at.data(), a.data());
}

CwDistance cw_distance(const Tensor3& bt, const Tensor3& b) {
  if (bt.dim() != b.dim()) throw DimensionError("cw_distance: dimension mismatch");
  const std::size_t n = b.dim();
  // Both entry lists are sorted by (i, column); merge them.
  auto flat = [n](const TensorEntry& e) { return e.i * n * n + e.j + e.k * n; };
  const auto ea = bt.entries();
  const auto eb = b.entries();
  CwDistance d;
  std::size_t p = 0, q = 0;
  auto take = [&](double r, std::size_t idx) {
    if (r > d.value || std::isnan(r)) {
      d.value = r;
      d.argmax = idx;
    }
  };
  while (p < ea.size() || q < eb.size()) {
    if (q == eb.size() || (p < ea.size() && flat(ea[p]) < flat(eb[q]))) {
      take(rel(ea[p].value, 0.0), flat(ea[p]));
      ++p;
    } else if (p == ea.size() || flat(eb[q]) < flat(ea[p])) {
      take(rel(0.0, eb[q].value), flat(eb[q]));
      ++q;
    } else {
      take(rel(ea[p].value, eb[q].value), flat(eb[q]));
      ++p;
      ++q;
    }
  }
  return d;
}

double norm_error(std::span<const double> xt, std::span<const double> x) {
  if (xt.size() != x.size()) throw DimensionError("norm_error: dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - xt[i]) * (x[i] - xt[i]);
    den += x[i] * x[i];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return std::sqrt(num) / std::sqrt(den);
}

Vec compute_y(const Problem& p, std::span<const double> m) {
  if (m.size() != p.dim()) throw DimensionError("compute_y: dimension mismatch");
  const DenseMatrix c = coupling(p.B, m);
  if (const auto sums = r_colsums(p, c)) {
    const GTHFactors f = gth_factor(TripletMMatrix{without_diagonal(c), *sums, Orientation::Col});
    return gth_solve(f, p.a);
  }
  return plain_lu_solve(jacobian_complement(p.B, m), p.a);
}

YCheck check_y(std::span<const double> m, std::span<const double> y, double tol) {
  if (m.size() != y.size()) throw DimensionError("check_y: dimension mismatch");
  YCheck c;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (y[i] < m[i] - tol) c.dominates = false;
    if ((y[i] == 0.0) != (m[i] == 0.0)) c.same_pattern = false;
  }
  return c;
}

double kappa(std::span<const double> m, std::span<const double> y) {
  if (m.size() != y.size()) throw DimensionError("kappa: dimension mismatch");
  double k = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0.0) continue;
    k = any ? std::max(k, y[i] / m[i]) : y[i] / m[i];
    any = true;
  }
  if (!any) throw DomainError("kappa: m is zero");
  return k;
}

double omega(const Problem& p, std::span<const double> m) {
  const std::size_t n = p.dim();
  if (m.size() != n) throw DimensionError("omega: dimension mismatch");
  const DenseMatrix c = coupling(p.B, m);
  const auto sums = r_colsums(p, c);
  if (!sums) throw DomainError("omega: R_m has negative column sums");
  // Row triplet of R_m^T: its row sums are the column sums of R_m.
  const PartialInverse pi = partial_inverse(TripletMMatrix{without_diagonal(c.transposed()), *sums, Orientation::Row});
  double w = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i] == 0.0) continue;
    double zi = 0.0;
    for (std::size_t k = 0; k < n; ++k) zi += pi.S(k, i) * m[k];
    w = any ? std::max(w, zi / m[i]) : zi / m[i];
    any = true;
  }
  if (!any) throw DomainError("omega: m is zero");
  return w;
}

double coupling_spectral_radius(const Problem& p, std::span<const double> m) {
  if (!p.is_pagerank()) throw DomainError("coupling_spectral_radius: PageRank problem required");
  double s = 0.0;
  for (double v : m) s += v;
  return 2.0 * p.pr->alpha * s;
}

double gamma_factor(double eps, std::size_t n) {
  return std::pow(1.0 + eps, static_cast<double>(n) - 1.0) / std::pow(1.0 - eps, static_cast<double>(n));
}

BoundReport bound_kappa(double eps, double kappa_value, std::size_t n, double rho) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("bound_kappa: eps must lie in [0, 1)");
  BoundReport r;
  r.epsilon = eps;
  r.gamma = gamma_factor(eps, n);
  r.condition = kappa_value;
  r.rho = rho;
  r.bound = 2.0 * eps * (2.0 * kappa_value - 1.0) * r.gamma;
  r.spectral_ok = (1.0 + eps) * rho < 1.0;
  const double denom = 4.0 * r.gamma * r.gamma * (2.0 * kappa_value - 1.0) * (kappa_value - 1.0);
  r.discriminant_ok = denom <= 0.0 || eps + eps * eps < 1.0 / denom;
  r.applicable = r.spectral_ok && r.discriminant_ok;
  return r;
}

BoundReport bound_omega(double eps, double omega_value, std::size_t n, double rho) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("bound_omega: eps must lie in [0, 1)");
  BoundReport r;
  r.epsilon = eps;
  r.gamma = gamma_factor(eps, n);
  r.condition = omega_value;
  r.rho = rho;
  r.bound = 2.0 * omega_value * r.gamma * eps;
  r.spectral_ok = rho < 1.0;
  const double denom = 4.0 * r.gamma * r.gamma * omega_value * omega_value;
  r.discriminant_ok = denom <= 0.0 || eps + eps * eps < 1.0 / denom;
  r.applicable = r.spectral_ok && r.discriminant_ok;
  return r;
}

PerturbedProblem zero_sum_perturb(const Problem& p, double eps, std::uint64_t seed, PerturbMode mode) {
  if (!p.is_pagerank()) throw DomainError("zero_sum_perturb: PageRank problem required");
  if (!(eps >= 0.0)) throw DomainError("zero_sum_perturb: eps must be nonnegative");
  const PageRankData& pr = *p.pr;
  const std::size_t n = p.dim();
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(ss);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Vec v = pr.v;
  DenseMatrix u = pr.P.unfolding();  // n x n^2
  const std::size_t cols = n * n;

  auto normalize = [](double* x, std::size_t len, std::size_t stride) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i * stride];
    if (s > 0.0)
      for (std::size_t i = 0; i < len; ++i) x[i * stride] /= s;
  };

  if (eps > 0.0) {
    if (mode == PerturbMode::Multiplicative) {
      auto perturb = [&](double* x, std::size_t len, std::size_t stride) {
        Vec r(len);
        double mean = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
          r[i] = unif(rng);
          mean += x[i * stride] * r[i];
        }
        for (std::size_t i = 0; i < len; ++i) x[i * stride] *= 1.0 + eps * (r[i] - mean);
        normalize(x, len, stride);
      };
      perturb(v.data(), n, 1);
      for (std::size_t c = 0; c < cols; ++c) perturb(u.data().data() + c, n, cols);
    } else {
      auto perturb = [&](double* x, std::size_t len, std::size_t stride) {
        Vec r(len);
        double mean = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
          r[i] = unif(rng);
          mean += r[i];
        }
        mean /= static_cast<double>(len);
        for (std::size_t i = 0; i < len; ++i) x[i * stride] = std::max(0.0, x[i * stride] + eps * (r[i] - mean));
        normalize(x, len, stride);
      };
      perturb(v.data(), n, 1);
      for (std::size_t c = 0; c < cols; ++c) perturb(u.data().data() + c, n, cols);
    }
  }

  PerturbedProblem out;
  Tensor3 pt = Tensor3::from_unfolding(u);
  out.epsilon_realized = std::max(cw_distance(v, pr.v).value, cw_distance(pt, pr.P).value);
  out.problem = Problem::pagerank(std::move(v), std::move(pt), pr.alpha, pr.one_minus_two_alpha);
  return out;
}

PerturbExperiment run_perturbation_experiment(const Problem& p, double eps, std::size_t trials,
                                              std::uint64_t seed, PerturbMode mode) {
  PerturbExperiment ex;
  const std::size_t n = p.dim();
  const ReferenceSolution ref = reference_solution(p, ReferenceMode::Minimal);
  if (!ref.converged) throw Error("perturbation experiment: reference solve did not converge");
  ex.m = ref.x_double;
  ex.kappa = kappa(ex.m, compute_y(p, ex.m));
  ex.omega = omega(p, ex.m);
  ex.rho = coupling_spectral_radius(p, ex.m);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t s = seed * 1000003ull + t;
    const PerturbedProblem pp = zero_sum_perturb(p, eps, s, mode);
    PerturbTrial tr;
    tr.trial = t;
    tr.epsilon_realized = pp.epsilon_realized;
    const ReferenceSolution rt = reference_solution(pp.problem, ReferenceMode::Minimal);
    tr.observed_dcw = rt.converged ? cw_distance(rt.x_double, ex.m).value : kInf;
    const double e = std::min(pp.epsilon_realized, 0.999);
    tr.omega_bound = bound_omega(e, ex.omega, n, ex.rho);
    tr.kappa_bound = bound_kappa(e, ex.kappa, n, ex.rho);
    if (!std::isfinite(pp.epsilon_realized)) {
      tr.omega_bound.applicable = false;
      tr.kappa_bound.applicable = false;
    }
    if (tr.omega_bound.applicable) {
      const double ratio = tr.omega_bound.bound > 0.0 ? tr.observed_dcw / tr.omega_bound.bound
                                                      : (tr.observed_dcw > 0.0 ? kInf : 0.0);
      ex.max_ratio = std::max(ex.max_ratio, ratio);
      if (tr.observed_dcw > tr.omega_bound.bound) ex.all_within = false;
    }
    ex.trials.push_back(tr);
  }
  return ex;
}

LimitingAccuracy limiting_accuracy_predictors(const Problem& p, std::span<const double> x_star) {
  if (x_star.size() != p.dim()) throw DimensionError("limiting_accuracy_predictors: dimension mismatch");
  const DenseMatrix r = jacobian_complement(p.B, x_star);
  const DenseMatrix ri = plain_inverse(r);
  const std::size_t n = p.dim();
  LimitingAccuracy la;
  double xn = 0.0;
  for (double v : x_star) xn = std::max(xn, std::fabs(v));
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::fabs(ri(i, j)) * std::fabs(x_star[j]);
    la.abs_inverse_times_x = std::max(la.abs_inverse_times_x, s);
  }
  la.inverse_norm_times_x = norm_inf(ri) * xn;
  la.condition = norm_inf(r) * norm_inf(ri);
  return la;
}

double gamma_tilde(std::size_t m) {
  const double u = std::ldexp(1.0, -53);
  const double mu = static_cast<double>(m) * u;
  return mu / (1.0 - mu);
}

}  // namespace mlpr
