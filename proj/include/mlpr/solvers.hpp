#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlpr/problem.hpp"

namespace mlpr {

enum class Method { FixedPoint, Newton, NewtonGth, BlockJacobi, BlockJacobiGthVariant };
enum class Start { Zero, V, Custom };
enum class Termination { TolReached, MaxIt, SingularPivot, Diverged };
// Inner solver for the diagonal blocks of block Jacobi. Lu is the
// conventional baseline (partial pivoting, direct residual).
enum class JacobiInner { Gth, Lu };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view s);
std::string_view termination_name(Termination t);

struct SolverOptions {
  Method method = Method::NewtonGth;
  double tol = 1e-15;
  std::size_t maxit = 500;
  std::vector<std::size_t> block_sizes;  // empty: one block
  Start start = Start::Zero;
  Vec x0;                                // for Start::Custom
  bool record_history = true;
  JacobiInner jacobi_inner = JacobiInner::Gth;
  double divergence_limit = 1e6;
};

struct SolveReport {
  Method method = Method::NewtonGth;
  Vec x;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIt;
  std::string message;
  Vec residual_history;            // ||r_k||_inf, k = 0..iterations
  std::vector<Vec> iterate_history;  // x_k, k = 0..iterations (record_history)
  Vec z_history;                   // scalar triplet parameter per iterate (GTH methods)
  Vec ecw_history;                 // filled by solve() when a reference is given
  Vec enorm_history;
  // Block Jacobi-GTH variant only: largest (x_k - ref)_i / ref_i seen, when a
  // reference is known. Positive means the iterate overshot.
  double max_overshoot = 0.0;
};

// a + B x^2 - x
Vec residual(const Problem& p, std::span<const double> x);

SolveReport fixed_point(const Problem& p, const SolverOptions& o);
SolveReport newton(const Problem& p, const SolverOptions& o);
SolveReport newton_gth(const Problem& p, const SolverOptions& o);
SolveReport block_jacobi(const Problem& p, const SolverOptions& o);
SolveReport block_jacobi_gth_variant(const Problem& p, const SolverOptions& o);

// Dispatches on o.method. With a reference solution, fills ecw_history and
// enorm_history (recording iterates internally if needed) and max_overshoot.
SolveReport solve(const Problem& p, const SolverOptions& o, std::optional<Vec> reference = std::nullopt);

// Validates a block partition of n; empty input yields {n}.
std::vector<std::size_t> normalize_blocks(std::span<const std::size_t> sizes, std::size_t n);

}  // namespace mlpr
