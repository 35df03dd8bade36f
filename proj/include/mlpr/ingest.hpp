#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlpr/problem.hpp"
#include "mlpr/tensor.hpp"

namespace mlpr {

// Directed 0/1 graph; (i, j) is an edge i -> j. Sorted, no duplicates.
struct Adjacency {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  bool has_edge(std::size_t i, std::size_t j) const;
  void normalize();  // sort and drop duplicates
};

// Coordinate Matrix Market (pattern, real or integer; general or symmetric).
// Symmetric files are mirrored, all stored entries become edges.
Adjacency read_matrix_market(std::istream& in);
Adjacency read_matrix_market_file(const std::string& path);

// C_ijk = 1 iff i -> j, j -> k and k -> i are edges (i, j, k distinct).
Tensor3 three_cycle_tensor(const Adjacency& a);

// Unfolding columns scaled to sum 1; zero columns stay zero.
Tensor3 column_normalize_substochastic(const Tensor3& c);

// P_(1) = nu (S + v dangling(S)) + (1 - nu) (M + v dangling(M)) (x) 1^T with
// S from the three-cycle tensor, M = A^T D^+ and dangling(X) = 1^T - 1^T X.
// The Kronecker factor gives P_ijk = M'_ik.
Tensor3 build_pagerank_tensor(const Adjacency& a, std::span<const double> v, double nu);

// rand .* exp(9 randn), normalized to sum 1.
Vec heavy_tailed_vector(std::size_t n, std::uint64_t seed);

enum class Builtin { Intro, Ex1, Ex2 };

Builtin parse_builtin(std::string_view name);  // "intro", "ex1", "ex2"; DomainError otherwise
std::string_view builtin_name(Builtin b);

struct BuiltinData {
  Tensor3 P;
  Vec v;      // used for solving: stochastic, entries other than the largest are multiples of 2^-53
  Vec v_raw;  // as printed
};

// `delta` is only used by Intro.
BuiltinData builtin_data(Builtin b, double delta = 1e-6);

// PageRank problem for a builtin; `one_minus_two_alpha` as in Problem::pagerank.
Problem builtin(Builtin b, double alpha, double delta = 1e-6,
                std::optional<double> one_minus_two_alpha = std::nullopt);

// Rounds all entries but the largest to multiples of 2^-53 and sets the
// largest to 1 minus the rest, so that the sum is exactly 1.
Vec snap_stochastic(std::span<const double> v);

}  // namespace mlpr
