#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mlpr/errors.hpp"
#include "mlpr/gth.hpp"
#include "mlpr/mmatrix.hpp"
#include "support.hpp"

using namespace mlpr;

namespace {

TripletMMatrix two_by_two(double a, double s) {
  TripletMMatrix t;
  t.offdiag = DenseMatrix(2, 2);
  t.offdiag(0, 1) = a;
  t.offdiag(1, 0) = a;
  t.sums = {s, s};
  t.orientation = Orientation::Row;
  return t;
}

double max_rel(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, testing::rel_err(a.data()[i], b.data()[i]));
  return m;
}

}  // namespace

TEST_SUITE("gth") {
  TEST_CASE("2x2 hand elimination") {
    const TripletMMatrix t = two_by_two(1.0, 1.0);
    const GTHFactors f = gth_factor(t);
    CHECK(f.pivots[0] == 2.0);
    CHECK(f.pivots[1] == 1.5);
    const DenseMatrix lu = matmul(f.L(), f.U());
    CHECK(lu == t.dense());
    const Vec x = gth_solve(f, Vec{1, 1});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("n = 1") {
    TripletMMatrix t{DenseMatrix(1, 1), {3.0}, Orientation::Row};
    const GTHFactors f = gth_factor(t);
    CHECK(f.L()(0, 0) == 1.0);
    CHECK(f.U()(0, 0) == 3.0);
    CHECK(gth_solve(f, Vec{6.0})[0] == 2.0);
  }

  TEST_CASE("identity triplet solves to b") {
    TripletMMatrix t{DenseMatrix(4, 4), Vec(4, 1.0), Orientation::Col};
    const Vec b{1, -2, 3.5, 0};
    CHECK(gth_solve(gth_factor(t), b) == b);
  }

  TEST_CASE("only the last sum positive, both orientations, against Eigen") {
    for (auto o : {Orientation::Row, Orientation::Col}) {
      TripletMMatrix t = testing::random_triplet(5, 21, o);
      std::fill(t.sums.begin(), t.sums.end(), 0.0);
      t.sums[4] = 0.7;
      const GTHFactors f = gth_factor(t);
      for (double d : f.pivots) CHECK(d > 0.0);
      const Vec b{1, 2, 3, 4, 5};
      const Vec x = gth_solve(f, b);
      const Eigen::VectorXd want = testing::to_eigen(t.dense()).partialPivLu().solve(testing::to_eigen(b));
      for (int i = 0; i < 5; ++i) CHECK(testing::rel_err(x[i], want(i)) <= 1e-11);
    }
  }

  TEST_CASE("LU reconstruction on random triplets") {
    for (std::uint64_t s = 0; s < 30; ++s) {
      const std::size_t n = 2 + s % 9;
      const TripletMMatrix t = testing::random_triplet(n, s, s % 2 ? Orientation::Col : Orientation::Row);
      const GTHFactors f = gth_factor(t);
      const DenseMatrix m = t.dense();
      DenseMatrix d = matmul(f.L(), f.U());
      for (std::size_t i = 0; i < d.data().size(); ++i) d.data()[i] -= m.data()[i];
      CHECK(norm_inf(d) <= 4.0 * n * std::ldexp(1.0, -53) * norm_inf(m));
    }
  }

  TEST_CASE("Col factorization equals Row factorization of the transpose") {
    const TripletMMatrix t = testing::random_triplet(6, 4, Orientation::Col);
    const Vec b{1, 0.5, 2, 0.25, 3, 1};
    const Vec x = gth_solve(gth_factor(t), b);
    const Eigen::VectorXd want = testing::to_eigen(t.dense()).partialPivLu().solve(testing::to_eigen(b));
    for (int i = 0; i < 6; ++i) CHECK(testing::rel_err(x[i], want(i)) <= 1e-13);
    CHECK(t.transposed().dense() == t.dense().transposed());
  }

  TEST_CASE("ill-conditioned triplet matches the double-double oracle") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      TripletMMatrix t = testing::random_triplet(8, 700 + s, Orientation::Row);
      std::fill(t.sums.begin(), t.sums.end(), 1e-13);
      Vec b(8);
      std::mt19937_64 rng(s);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& v : b) v = u(rng);
      const Vec x = gth_solve(gth_factor(t), b);
      const auto fx = gth_factor_x(t);
      std::vector<XScalar> bx(b.begin(), b.end());
      const auto xx = gth_solve_t(fx, bx);
      for (std::size_t i = 0; i < 8; ++i) CHECK(testing::rel_err(x[i], xx[i].to_double()) <= 1e-12);
    }
  }

  TEST_CASE("reducible and singular inputs") {
    // Node 1 only feeds itself: it cannot reach the positive sum of node 0.
    TripletMMatrix t{DenseMatrix(3, 3), {1.0, 0.0, 0.0}, Orientation::Row};
    t.offdiag(2, 0) = 1.0;
    try {
      gth_factor(t);
      FAIL("expected ReducibleError");
    } catch (const ReducibleError& e) {
      CHECK(e.indices() == std::vector<std::size_t>{1});
    }
    TripletMMatrix z = testing::random_triplet(3, 1, Orientation::Row);
    std::fill(z.sums.begin(), z.sums.end(), 0.0);
    CHECK_THROWS_AS(gth_factor(z), ReducibleError);
    TripletMMatrix neg = two_by_two(-1.0, 1.0);
    CHECK_THROWS_AS(gth_factor(neg), DomainError);
  }

  TEST_CASE("nonnegativity assertions run when enabled") {
    set_gth_assert_override(1);
    const std::size_t before = gth_assert_check_count();
    gth_factor(testing::random_triplet(5, 3, Orientation::Row));
    CHECK(gth_assert_check_count() > before);
    set_gth_assert_override(-1);
  }

  TEST_CASE("null vectors") {
    TripletMMatrix a{DenseMatrix(2, 2), {0, 0}, Orientation::Row};
    a.offdiag(0, 1) = 1;
    a.offdiag(1, 0) = 1;
    Vec t = null_vector(a);
    CHECK(t[0] / t[1] == doctest::Approx(1.0));
    a.offdiag(1, 0) = 2;
    t = null_vector(a);
    CHECK(t[0] / t[1] == doctest::Approx(2.0));

    TripletMMatrix r = testing::random_triplet(5, 8, Orientation::Row);
    std::fill(r.sums.begin(), r.sums.end(), 0.0);
    t = null_vector(r);
    const DenseMatrix l = r.dense();
    double res = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < 5; ++i) s += t[i] * l(i, j);
      res = std::max(res, std::fabs(s));
    }
    CHECK(res / norm_inf(t) <= 1e-14);
    for (double v : t) CHECK(v > 0.0);
  }

  TEST_CASE("partial inverse of the 2x2 example") {
    const TripletMMatrix t = two_by_two(1.0, 0.5);
    const PartialInverse p = partial_inverse(t);
    CHECK(p.inverse(0, 0) == doctest::Approx(1.2));
    CHECK(p.inverse(0, 1) == doctest::Approx(0.8));
    CHECK(p.z[0] == doctest::Approx(0.8));
    CHECK(p.z[1] == doctest::Approx(0.8));
    CHECK(p.S(0, 0) == doctest::Approx(0.4));
    CHECK(std::fabs(p.S(0, 1)) <= 1e-15);
    // v^T M^-1 = v^T S for v = [1, -1]
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(p.inverse(0, j) - p.inverse(1, j) == doctest::Approx(p.S(0, j) - p.S(1, j)));
  }

  TEST_CASE("partial inverse preconditions") {
    TripletMMatrix d{DenseMatrix(3, 3), {1, 2, 3}, Orientation::Row};
    CHECK_THROWS_AS(partial_inverse(d), ReducibleError);
    TripletMMatrix z = testing::random_triplet(3, 2, Orientation::Row);
    std::fill(z.sums.begin(), z.sums.end(), 0.0);
    CHECK_THROWS_AS(partial_inverse(z), SingularError);
    CHECK_THROWS(partial_inverse(testing::random_triplet(3, 2, Orientation::Col)));
  }

  TEST_CASE("partial inverse structure") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const std::size_t n = 3 + s % 5;
      const TripletMMatrix t = testing::random_triplet(n, 40 + s, Orientation::Row);
      const PartialInverse p = partial_inverse(t);
      const Eigen::MatrixXd inv = testing::to_eigen(t.dense()).inverse();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          CHECK(testing::rel_err(p.z[j] + p.S(i, j), inv(i, j)) <= 1e-12);
          CHECK(p.S(i, j) >= -1e-15);
        }
      for (double v : p.z) CHECK(v >= 0.0);
      // zero-sum rows: e_i - e_{i+1}
      for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double lhs = p.inverse(i, j) - p.inverse(i + 1, j);
          const double rhs = p.S(i, j) - p.S(i + 1, j);
          CHECK(std::fabs(lhs - rhs) <= 1e-11 * std::max(1.0, std::fabs(rhs)));
        }
    }
  }

  TEST_CASE("S stays bounded as the sums vanish") {
    // sigma_0 well below the offdiagonal weights: S(sigma) - S(0) = O(sigma).
    const TripletMMatrix base = testing::random_triplet(5, 77, Orientation::Row, 1e-3);
    const PartialInverse p0 = partial_inverse(base);
    double s0 = 0.0;
    for (double v : p0.S.data()) s0 = std::max(s0, v);
    for (int k = 1; k <= 12; ++k) {
      TripletMMatrix t = base;
      for (auto& v : t.sums) v *= std::pow(10.0, -k);
      const PartialInverse p = partial_inverse(t);
      double sk = 0.0;
      for (double v : p.S.data()) sk = std::max(sk, v);
      CHECK(std::fabs(sk - s0) <= 0.01 * s0);
      CHECK(norm_inf(p.inverse) >= 0.5 * std::pow(10.0, k) * norm_inf(p0.inverse));
    }
  }

  TEST_CASE("componentwise inverse perturbation bound") {
    const TripletMMatrix m = testing::random_triplet(3, 5, Orientation::Row);
    CHECK(inverse_cw_bound_check(m, m, 1e-8).observed == 0.0);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      TripletMMatrix mt = m;
      for (auto& v : mt.offdiag.data()) v *= 1.0 + 1e-8 * u(rng);
      for (auto& v : mt.sums) v *= 1.0 + 1e-8 * u(rng);
      const auto rep = inverse_cw_bound_check(m, mt, 1e-8);
      CHECK(rep.bound == doctest::Approx(5e-8));
      CHECK(rep.within);
      CHECK(rep.observed <= 5e-8);
    }
    TripletMMatrix bad = m;
    bad.offdiag(0, 1) = 0.0;
    const auto rep = inverse_cw_bound_check(m, bad, 1e-8);
    CHECK(!rep.pattern_ok);
    CHECK(rep.observed == std::numeric_limits<double>::infinity());
    CHECK(!rep.within);
  }

  TEST_CASE("gth_inverse and plain LU agree with Eigen") {
    const TripletMMatrix t = testing::random_triplet(6, 12, Orientation::Col);
    const DenseMatrix gi = gth_inverse(t);
    const DenseMatrix pi = plain_inverse(t.dense());
    const Eigen::MatrixXd e = testing::to_eigen(t.dense()).inverse();
    DenseMatrix ed(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) ed(i, j) = e(i, j);
    CHECK(max_rel(gi, ed) <= 1e-13);
    CHECK(max_rel(pi, ed) <= 1e-12);
    DenseMatrix sing(2, 2);
    sing(0, 0) = 1;
    sing(0, 1) = 2;
    sing(1, 0) = 2;
    sing(1, 1) = 4;
    CHECK_THROWS_AS(plain_lu_solve(sing, Vec{1, 1}), SingularError);
  }
}
