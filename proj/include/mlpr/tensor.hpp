#pragma once

// Sparse nonnegative order-3 tensors and the contractions used by the
// quadratic vector equation x = a + B x^2.
//
// Indices are 0-based in the API and 1-based in the text format. The first
// mode unfolding B_(1) is the n x n^2 matrix with B_(1)[i, j + k*n] = b_ijk;
// "column" below always refers to that unfolding column.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlpr/matrix.hpp"

namespace mlpr {

struct TensorEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  double value = 0.0;
};

class Tensor3 {
 public:
  // Tensors up to this dimension also keep a dense column-major copy of the
  // unfolding, which the SIMD contraction kernels stream through.
  static constexpr std::size_t kDenseLimit = 64;

  Tensor3() = default;
  explicit Tensor3(std::size_t n);  // zero tensor

  // Validates indices, nonnegativity and uniqueness; duplicates are rejected
  // rather than summed.
  static Tensor3 from_entries(std::size_t n, std::vector<TensorEntry> entries);

  // Builds from a dense unfolding (n x n^2), keeping the nonzero entries.
  static Tensor3 from_unfolding(const DenseMatrix& unfolding);

  std::size_t dim() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  std::size_t column_index(std::size_t j, std::size_t k) const noexcept { return j + k * n_; }

  // Sorted by (i, unfolding column).
  std::span<const TensorEntry> entries() const noexcept { return entries_; }
  std::span<const TensorEntry> row(std::size_t i) const;

  double operator()(std::size_t i, std::size_t j, std::size_t k) const;

  bool has_dense() const noexcept { return !dense_.empty(); }
  // Column `col` of the unfolding (length n); requires has_dense().
  const double* dense_column(std::size_t col) const { return dense_.data() + col * n_; }

  DenseMatrix unfolding() const;

  // s * B, s >= 0.
  Tensor3 scaled(double s) const;

  friend bool operator==(const Tensor3& a, const Tensor3& b);

 private:
  void build_index();

  std::size_t n_ = 0;
  std::vector<TensorEntry> entries_;
  std::vector<std::size_t> row_ptr_;  // size n+1
  std::vector<double> dense_;         // column-major unfolding, n x n^2
};

// (B x^2)_i = sum_jk b_ijk x_j x_k
Vec apply_quadratic(const Tensor3& b, std::span<const double> x);

// (B x y)_i = sum_jk b_ijk x_j y_k; apply_bilinear(b, x, x) == apply_quadratic(b, x) bitwise.
Vec apply_bilinear(const Tensor3& b, std::span<const double> x, std::span<const double> y);

// Matrix of y -> B x y:  (B x:)_{ik} = sum_j b_ijk x_j
DenseMatrix contract_left(const Tensor3& b, std::span<const double> x);

// Matrix of y -> B y x:  (B :x)_{ij} = sum_k b_ijk x_k
DenseMatrix contract_right(const Tensor3& b, std::span<const double> x);

// I - (B x:) - (B :x), the negative Jacobian of x -> a + B x^2 - x.
DenseMatrix jacobian_complement(const Tensor3& b, std::span<const double> x);

struct StochasticityReport {
  double max_deviation = 0.0;
  std::size_t worst_j = 0;
  std::size_t worst_k = 0;
  bool ok = true;
};

// Checks that every unfolding column sums to `target` within `tol`.
StochasticityReport check_stochastic(const Tensor3& b, double target, double tol);

// Column sums of the unfolding (length n^2), accumulated in row order.
Vec unfolding_column_sums(const Tensor3& b);

// Text format: "n nnz" header, then "i j k value" per entry, 1-based.
Tensor3 read_tensor(std::istream& in);
Tensor3 read_tensor_file(const std::string& path);
void write_tensor(std::ostream& out, const Tensor3& b);
void write_tensor_file(const std::string& path, const Tensor3& b);

// Whitespace-separated list of values, optionally preceded by a count line.
Vec read_vector(std::istream& in);
Vec read_vector_file(const std::string& path);

}  // namespace mlpr
