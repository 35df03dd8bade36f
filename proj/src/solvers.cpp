#include "mlpr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlpr/cw.hpp"
#include "mlpr/errors.hpp"
#include "mlpr/gth.hpp"
#include "mlpr/kernels.hpp"
#include "mlpr/mmatrix.hpp"
#include "mlpr/tensor.hpp"

namespace mlpr {

namespace {

double inf_norm(const Vec& v) { return kernels::active().max_abs(v.data(), v.size()); }

// C = B x: + B :x, accumulated entry by entry.
DenseMatrix coupling(const Tensor3& b, std::span<const double> x) {
  const std::size_t n = b.dim();
  DenseMatrix c(n, n);
  for (const auto& e : b.entries()) {
    c(e.i, e.k) += e.value * x[e.j];
    c(e.i, e.j) += e.value * x[e.k];
  }
  return c;
}

Vec start_vector(const Problem& p, const SolverOptions& o) {
  const std::size_t n = p.dim();
  switch (o.start) {
    case Start::Zero:
      return Vec(n, 0.0);
    case Start::V:
      if (!p.is_pagerank()) throw DomainError("start = V needs a PageRank problem");
      return p.pr->v;
    case Start::Custom:
      if (o.x0.size() != n) throw DimensionError("custom start vector has wrong dimension");
      return o.x0;
  }
  return Vec(n, 0.0);
}

void check_options(const SolverOptions& o) {
  if (!(o.tol > 0.0)) throw DomainError("tol must be positive");
}

// Shared bookkeeping: history, stopping test, divergence guard.
class Run {
 public:
  Run(const SolverOptions& o, Method m) : o_(o) { rep_.method = m; }

  // Records iterate k; returns true when the iteration should stop.
  bool record(const Vec& x, double rnorm, double z = std::numeric_limits<double>::quiet_NaN()) {
    rep_.residual_history.push_back(rnorm);
    if (o_.record_history) rep_.iterate_history.push_back(x);
    if (!std::isnan(z)) rep_.z_history.push_back(z);
    rep_.x = x;
    if (rnorm <= o_.tol) return finish(Termination::TolReached, "");
    if (!std::isfinite(rnorm) || inf_norm(x) > o_.divergence_limit)
      return finish(Termination::Diverged, "iterate left the bounded region");
    if (rep_.iterations >= o_.maxit) return finish(Termination::MaxIt, "");
    return false;
  }

  void step_done() { ++rep_.iterations; }

  void singular(const std::exception& e) { finish(Termination::SingularPivot, e.what()); }
  void stop(Termination t, std::string msg) { finish(t, std::move(msg)); }

  SolveReport take() { return std::move(rep_); }

 private:
  bool finish(Termination t, std::string msg) {
    rep_.termination = t;
    rep_.message = std::move(msg);
    return true;
  }

  const SolverOptions& o_;
  SolveReport rep_;
};

struct Block {
  std::size_t begin, end;
};

std::vector<Block> make_blocks(std::span<const std::size_t> sizes, std::size_t n) {
  std::vector<Block> out;
  std::size_t s = 0;
  for (std::size_t b : normalize_blocks(sizes, n)) {
    out.push_back({s, s + b});
    s += b;
  }
  return out;
}

std::vector<std::size_t> block_of(const std::vector<Block>& blocks, std::size_t n) {
  std::vector<std::size_t> id(n);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i) id[i] = b;
  return id;
}

// Column sums of the off-block part of C.
Vec offblock_colsums(const DenseMatrix& c, const std::vector<std::size_t>& id) {
  const std::size_t n = c.rows();
  Vec s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (id[i] != id[j]) s[j] += c(i, j);
  return s;
}

Vec offblock_apply(const DenseMatrix& c, const std::vector<std::size_t>& id, const Vec& h) {
  const std::size_t n = c.rows();
  Vec y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (id[i] != id[j]) s += c(i, j) * h[j];
    y[i] = s;
  }
  return y;
}

// Col triplet for the diagonal block [b.begin, b.end) of I - C with the given
// column sums.
TripletMMatrix block_triplet(const DenseMatrix& c, const Block& b, const Vec& colsum_off, double shift) {
  const std::size_t m = b.end - b.begin;
  TripletMMatrix t;
  t.offdiag = DenseMatrix(m, m);
  t.sums.resize(m);
  t.orientation = Orientation::Col;
  for (std::size_t i = 0; i < m; ++i) {
    t.sums[i] = colsum_off[b.begin + i] + shift;
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) t.offdiag(i, j) = c(b.begin + i, b.begin + j);
  }
  return t;
}

void require_pagerank(const Problem& p, const char* who) {
  if (!p.is_pagerank()) throw DomainError(std::string(who) + " needs a PageRank problem");
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::FixedPoint: return "fixed-point";
    case Method::Newton: return "newton";
    case Method::NewtonGth: return "newton-gth";
    case Method::BlockJacobi: return "block-jacobi";
    case Method::BlockJacobiGthVariant: return "bjgv";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::FixedPoint, Method::Newton, Method::NewtonGth, Method::BlockJacobi,
                   Method::BlockJacobiGthVariant})
    if (s == method_name(m)) return m;
  return std::nullopt;
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::TolReached: return "TOL_REACHED";
    case Termination::MaxIt: return "MAXIT";
    case Termination::SingularPivot: return "SINGULAR_PIVOT";
    case Termination::Diverged: return "DIVERGED";
  }
  return "?";
}

std::vector<std::size_t> normalize_blocks(std::span<const std::size_t> sizes, std::size_t n) {
  if (sizes.empty()) return {n};
  std::size_t s = 0;
  for (std::size_t b : sizes) {
    if (b == 0) throw DomainError("block sizes must be positive");
    s += b;
  }
  if (s != n) throw DomainError("block sizes sum to " + std::to_string(s) + ", expected " + std::to_string(n));
  return {sizes.begin(), sizes.end()};
}

Vec residual(const Problem& p, std::span<const double> x) {
  if (x.size() != p.dim()) throw DimensionError("residual: dimension mismatch");
  Vec r = apply_quadratic(p.B, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (p.a[i] + r[i]) - x[i];
  return r;
}

SolveReport fixed_point(const Problem& p, const SolverOptions& o) {
  check_options(o);
  Run run(o, Method::FixedPoint);
  Vec x = start_vector(p, o);
  const std::size_t n = p.dim();
  while (true) {
    const Vec q = apply_quadratic(p.B, x);
    Vec next(n);
    double rn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = p.a[i] + q[i];
      rn = std::max(rn, std::fabs(next[i] - x[i]));
      if (std::isnan(next[i])) rn = next[i];
    }
    if (run.record(x, rn)) break;
    x = std::move(next);
    run.step_done();
  }
  return run.take();
}

SolveReport newton(const Problem& p, const SolverOptions& o) {
  check_options(o);
  Run run(o, Method::Newton);
  Vec x = start_vector(p, o);
  while (true) {
    const Vec r = residual(p, x);
    if (run.record(x, inf_norm(r))) break;
    Vec h;
    try {
      h = plain_lu_solve(jacobian_complement(p.B, x), r);
    } catch (const SingularError& e) {
      run.singular(e);
      break;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += h[i];
    run.step_done();
  }
  return run.take();
}

SolveReport newton_gth(const Problem& p, const SolverOptions& o) {
  check_options(o);
  require_pagerank(p, "newton_gth");
  if (o.start != Start::Zero) throw DomainError("newton_gth starts from zero");
  Run run(o, Method::NewtonGth);
  const std::size_t n = p.dim();
  const double w = p.pr->one_minus_two_alpha;
  const double w2 = w * w;
  Vec x(n, 0.0);
  Vec r = p.a;
  double z = 1.0;
  while (true) {
    if (run.record(x, inf_norm(r), z)) break;
    if (z == 0.0) {
      run.singular(SingularError("z underflowed to zero"));
      break;
    }
    DenseMatrix c = coupling(p.B, x);
    for (std::size_t i = 0; i < n; ++i) c(i, i) = 0.0;
    Vec h;
    try {
      const GTHFactors f = gth_factor(TripletMMatrix{std::move(c), Vec(n, z), Orientation::Col});
      h = gth_solve(f, r);
    } catch (const SingularError& e) {
      run.singular(e);
      break;
    } catch (const ReducibleError& e) {
      run.singular(e);
      break;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] += h[i];
    z = (w2 + z * z) / (2.0 * z);
    // r_{k+1} = B h^2: the new residual without forming a + B x^2 - x.
    r = apply_quadratic(p.B, h);
    run.step_done();
  }
  return run.take();
}

SolveReport block_jacobi(const Problem& p, const SolverOptions& o) {
  check_options(o);
  if (o.start != Start::Zero) throw DomainError("block_jacobi starts from zero");
  const std::size_t n = p.dim();
  const auto blocks = make_blocks(o.block_sizes, n);
  const auto id = block_of(blocks, n);
  Run run(o, Method::BlockJacobi);
  Vec x(n, 0.0);

  if (o.jacobi_inner == JacobiInner::Lu) {
    while (true) {
      const Vec r = residual(p, x);
      if (run.record(x, inf_norm(r))) break;
      const DenseMatrix c = coupling(p.B, x);
      Vec h(n, 0.0);
      try {
        for (const auto& b : blocks) {
          const std::size_t m = b.end - b.begin;
          DenseMatrix mb(m, m);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
              mb(i, j) = (i == j ? 1.0 : 0.0) - c(b.begin + i, b.begin + j);
          const Vec hb = plain_lu_solve(mb, std::span<const double>(r).subspan(b.begin, m));
          std::copy(hb.begin(), hb.end(), h.begin() + static_cast<std::ptrdiff_t>(b.begin));
        }
      } catch (const SingularError& e) {
        run.singular(e);
        break;
      }
      for (std::size_t i = 0; i < n; ++i) x[i] += h[i];
      run.step_done();
    }
    return run.take();
  }

  require_pagerank(p, "block_jacobi with GTH blocks");
  const double alpha = p.pr->alpha;
  const double w = p.pr->one_minus_two_alpha;
  const double w2 = w * w;
  Vec r = p.a;
  double u = 1.0;
  while (true) {
    if (run.record(x, inf_norm(r), u)) break;
    const DenseMatrix c = coupling(p.B, x);
    const Vec cs = offblock_colsums(c, id);
    Vec h(n, 0.0);
    try {
      for (const auto& b : blocks) {
        const std::size_t m = b.end - b.begin;
        const GTHFactors f = gth_factor(block_triplet(c, b, cs, u));
        const Vec hb = gth_solve(f, std::span<const double>(r).subspan(b.begin, m));
        std::copy(hb.begin(), hb.end(), h.begin() + static_cast<std::ptrdiff_t>(b.begin));
      }
    } catch (const SingularError& e) {
      run.singular(e);
      break;
    } catch (const ReducibleError& e) {
      run.singular(e);
      break;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] += h[i];
    const Vec nh = offblock_apply(c, id, h);
    double s = 0.0;
    for (double v : nh) s += v;
    u = (u * u + w2 + 4.0 * alpha * s) / (2.0 * u);
    // F(x_{k+1}) = B h^2 + N h
    r = apply_quadratic(p.B, h);
    for (std::size_t i = 0; i < n; ++i) r[i] += nh[i];
    run.step_done();
  }
  return run.take();
}

SolveReport block_jacobi_gth_variant(const Problem& p, const SolverOptions& o) {
  check_options(o);
  require_pagerank(p, "block_jacobi_gth_variant");
  if (o.start != Start::Zero) throw DomainError("block_jacobi_gth_variant starts from zero");
  const std::size_t n = p.dim();
  const auto blocks = make_blocks(o.block_sizes, n);
  const auto id = block_of(blocks, n);
  Run run(o, Method::BlockJacobiGthVariant);
  const double w = p.pr->one_minus_two_alpha;
  const double w2 = w * w;
  Vec x(n, 0.0);
  double z = 1.0;
  // T x_new = N x + a - B x^2 with T = M - ((1 - 2 alpha 1^T x) - z) I. The
  // residual is recomputed from x: no subtraction-free update exists since the
  // increment solves T h = F(x) + ((1 - 2 alpha 1^T x) - z) x.
  while (true) {
    const Vec q = apply_quadratic(p.B, x);
    Vec r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = (p.a[i] + q[i]) - x[i];
    if (run.record(x, inf_norm(r), z)) break;
    // Not monotone: an overshoot can leave the nonnegative orthant, where the
    // block triplets stop being M-matrix representations.
    if (std::any_of(x.begin(), x.end(), [](double v) { return v < 0.0; })) {
      run.stop(Termination::Diverged, "iterate left the nonnegative orthant");
      break;
    }
    const DenseMatrix c = coupling(p.B, x);
    const Vec cs = offblock_colsums(c, id);
    const Vec nx = offblock_apply(c, id, x);
    Vec rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = nx[i] + (p.a[i] - q[i]);
    Vec next(n, 0.0);
    try {
      for (const auto& b : blocks) {
        const std::size_t m = b.end - b.begin;
        const GTHFactors f = gth_factor(block_triplet(c, b, cs, z));
        const Vec xb = gth_solve(f, std::span<const double>(rhs).subspan(b.begin, m));
        std::copy(xb.begin(), xb.end(), next.begin() + static_cast<std::ptrdiff_t>(b.begin));
      }
    } catch (const SingularError& e) {
      run.singular(e);
      break;
    } catch (const ReducibleError& e) {
      run.singular(e);
      break;
    }
    x = std::move(next);
    z = (w2 + z * z) / (2.0 * z);
    run.step_done();
  }
  return run.take();
}

SolveReport solve(const Problem& p, const SolverOptions& o, std::optional<Vec> reference) {
  p.validate();
  SolverOptions opts = o;
  if (reference) {
    if (reference->size() != p.dim()) throw DimensionError("reference has wrong dimension");
    opts.record_history = true;
  }
  SolveReport rep;
  switch (opts.method) {
    case Method::FixedPoint: rep = fixed_point(p, opts); break;
    case Method::Newton: rep = newton(p, opts); break;
    case Method::NewtonGth: rep = newton_gth(p, opts); break;
    case Method::BlockJacobi: rep = block_jacobi(p, opts); break;
    case Method::BlockJacobiGthVariant: rep = block_jacobi_gth_variant(p, opts); break;
  }
  if (reference) {
    const Vec& ref = *reference;
    double nref = 0.0;
    for (double v : ref) nref += v * v;
    nref = std::sqrt(nref);
    for (const Vec& x : rep.iterate_history) {
      rep.ecw_history.push_back(cw_distance(x, ref).value);
      double d = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - ref[i]) * (x[i] - ref[i]);
      rep.enorm_history.push_back(std::sqrt(d) / nref);
      for (std::size_t i = 0; i < x.size(); ++i)
        if (ref[i] > 0.0) rep.max_overshoot = std::max(rep.max_overshoot, (x[i] - ref[i]) / ref[i]);
    }
    if (!o.record_history) rep.iterate_history.clear();
  }
  return rep;
}

}  // namespace mlpr
