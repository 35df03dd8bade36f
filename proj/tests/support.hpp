#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mlpr/gth.hpp"
#include "mlpr/matrix.hpp"
#include "mlpr/problem.hpp"
#include "mlpr/tensor.hpp"

namespace testing {

inline Eigen::MatrixXd to_eigen(const mlpr::DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  Eigen::VectorXd e(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) e(i) = v[i];
  return e;
}

inline double rel_err(double got, double want) {
  if (want == 0.0) return std::fabs(got);
  return std::fabs(got - want) / std::fabs(want);
}

// Random column-stochastic P with roughly `density` nonzeros per column
// (at least one) and a strictly positive v.
inline mlpr::Problem random_pagerank(std::size_t n, double alpha, std::uint64_t seed, double density = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<mlpr::TensorEntry> e;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> col(n, 0.0);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (u(rng) < density) {
          col[i] = u(rng) + 0.05;
          s += col[i];
        }
      if (s == 0.0) {
        col[static_cast<std::size_t>(u(rng) * n) % n] = 1.0;
        s = 1.0;
      }
      for (std::size_t i = 0; i < n; ++i)
        if (col[i] != 0.0) e.push_back({i, j, k, col[i] / s});
    }
  mlpr::Vec v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = u(rng) + 0.01;
    s += x;
  }
  for (auto& x : v) x /= s;
  return mlpr::Problem::pagerank(v, mlpr::Tensor3::from_entries(n, std::move(e)), alpha);
}

// Dense positive offdiagonal (irreducible) triplet.
inline mlpr::TripletMMatrix random_triplet(std::size_t n, std::uint64_t seed, mlpr::Orientation o,
                                           double sum_scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  mlpr::TripletMMatrix t;
  t.offdiag = mlpr::DenseMatrix(n, n);
  t.sums.resize(n);
  t.orientation = o;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) t.offdiag(i, j) = u(rng);
    t.sums[i] = sum_scale * u(rng);
  }
  return t;
}

}  // namespace testing
