#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <tuple>
#include <random>
#include <sstream>

#include "mlpr/errors.hpp"
#include "mlpr/tensor.hpp"
#include "support.hpp"

using namespace mlpr;

namespace {

Tensor3 intro_tensor(double alpha) {
  DenseMatrix u(2, 4);
  const double rows[2][4] = {{1, 0.5, 0.5, 0}, {0, 0.5, 0.5, 1}};
  for (int i = 0; i < 2; ++i)
    for (int c = 0; c < 4; ++c) u(i, c) = alpha * rows[i][c];
  return Tensor3::from_unfolding(u);
}

Tensor3 random_tensor(std::size_t n, std::uint64_t seed, double density = 0.4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TensorEntry> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (u(rng) < density) e.push_back({i, j, k, u(rng)});
  return Tensor3::from_entries(n, e);
}

Vec triple_loop(const Tensor3& b, const Vec& x, const Vec& y) {
  const std::size_t n = b.dim();
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i] += b(i, j, k) * x[j] * y[k];
  return out;
}

Vec random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_SUITE("tensor") {
  TEST_CASE("construction validates entries") {
    CHECK_THROWS_AS(Tensor3::from_entries(2, {{0, 0, 2, 1.0}}), DimensionError);
    CHECK_THROWS_AS(Tensor3::from_entries(2, {{0, 0, 0, -1.0}}), DomainError);
    CHECK_THROWS_AS(Tensor3::from_entries(2, {{0, 1, 0, 1.0}, {0, 1, 0, 2.0}}), DomainError);
    const Tensor3 t = Tensor3::from_entries(2, {{1, 1, 0, 2.0}, {0, 1, 1, 0.0}, {0, 0, 1, 3.0}});
    CHECK(t.nnz() == 2);
    CHECK(t(1, 1, 0) == 2.0);
    CHECK(t(0, 0, 1) == 3.0);
    CHECK(t(0, 1, 1) == 0.0);
    CHECK(t.entries()[0].i == 0);
  }

  TEST_CASE("zero tensor gives zero quadratic form") {
    const Tensor3 z(3);
    const Vec q = apply_quadratic(z, Vec{1, 2, 3});
    for (double v : q) CHECK(v == 0.0);
  }

  TEST_CASE("intro tensor maps x to alpha x (1^T x)") {
    const double alpha = 0.3, delta = 1e-6;
    const Tensor3 b = intro_tensor(alpha);
    const Vec x{1 - delta, delta};
    const Vec q = apply_quadratic(b, x);
    CHECK(q[0] == doctest::Approx(alpha * x[0]).epsilon(1e-15));
    CHECK(q[1] == doctest::Approx(alpha * x[1]).epsilon(1e-15));
    const Vec e = apply_bilinear(b, Vec{1, 0}, Vec{0, 1});
    CHECK(e[0] == doctest::Approx(0.5 * alpha));
    CHECK(e[1] == doctest::Approx(0.5 * alpha));
  }

  TEST_CASE("quadratic matches a triple loop; bilinear(x, x) is bitwise quadratic") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const std::size_t n = 3 + s % 6;
      const Tensor3 b = random_tensor(n, s);
      const Vec x = random_vec(n, s + 100), y = random_vec(n, s + 200);
      const Vec q = apply_quadratic(b, x);
      const Vec want = triple_loop(b, x, x);
      for (std::size_t i = 0; i < n; ++i) CHECK(testing::rel_err(q[i], want[i]) <= 1e-14);
      const Vec bxx = apply_bilinear(b, x, x);
      CHECK(std::memcmp(bxx.data(), q.data(), n * sizeof(double)) == 0);
      const Vec bxy = apply_bilinear(b, x, y);
      const Vec want_xy = triple_loop(b, x, y);
      for (std::size_t i = 0; i < n; ++i) CHECK(testing::rel_err(bxy[i], want_xy[i]) <= 1e-14);
      for (double v : apply_bilinear(b, x, Vec(n, 0.0))) CHECK(v == 0.0);
    }
  }

  TEST_CASE("sparse and dense storage give identical contractions") {
    // n above the dense limit exercises the sparse path on the same data.
    const std::size_t n = Tensor3::kDenseLimit + 1;
    std::vector<TensorEntry> e;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 4000; ++t) {
      const std::size_t i = rng() % 8, j = rng() % 8, k = rng() % 8;
      e.push_back({i, j, k, u(rng)});
    }
    std::sort(e.begin(), e.end(), [](auto& a, auto& b) { return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k); });
    e.erase(std::unique(e.begin(), e.end(), [](auto& a, auto& b) { return a.i == b.i && a.j == b.j && a.k == b.k; }),
            e.end());
    const Tensor3 big = Tensor3::from_entries(n, e);
    const Tensor3 small = Tensor3::from_entries(8, e);
    CHECK(!big.has_dense());
    CHECK(small.has_dense());
    const Vec xs = random_vec(8, 9);
    Vec xb(n, 0.0);
    std::copy(xs.begin(), xs.end(), xb.begin());
    const Vec qs = apply_quadratic(small, xs), qb = apply_quadratic(big, xb);
    for (std::size_t i = 0; i < 8; ++i) CHECK(qs[i] == qb[i]);
  }

  TEST_CASE("contractions reproduce the bilinear form") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const std::size_t n = 4 + s % 4;
      const Tensor3 b = random_tensor(n, s + 50);
      const Vec x = random_vec(n, s), y = random_vec(n, s + 7);
      const Vec l = matvec(contract_left(b, x), y);
      const Vec r = matvec(contract_right(b, x), y);
      const Vec bxy = apply_bilinear(b, x, y), byx = apply_bilinear(b, y, x);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(testing::rel_err(l[i], bxy[i]) <= 1e-14);
        CHECK(testing::rel_err(r[i], byx[i]) <= 1e-14);
      }
    }
    const DenseMatrix z = contract_left(random_tensor(3, 1), Vec(3, 0.0));
    for (double v : z.data()) CHECK(v == 0.0);
  }

  TEST_CASE("column sums of the coupling equal 2 alpha 1^T x") {
    const double alpha = 0.3;
    const Tensor3 b = intro_tensor(alpha);
    const Vec x{1, 0};
    const DenseMatrix c0 = contract_left(b, x), c1 = contract_right(b, x);
    for (std::size_t j = 0; j < 2; ++j) CHECK(c0(0, j) + c0(1, j) + c1(0, j) + c1(1, j) == doctest::Approx(2 * alpha));

    const Problem p = testing::random_pagerank(7, 0.4, 17);
    const Vec y = random_vec(7, 4);
    const DenseMatrix r = jacobian_complement(p.B, y);
    const double w = 1.0 - 2.0 * 0.4 * sum(y);
    for (std::size_t j = 0; j < 7; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < 7; ++i) s += r(i, j);
      CHECK(std::fabs(s - w) <= 1e-13);
    }
  }

  TEST_CASE("check_stochastic reports the worst column") {
    const auto rep = check_stochastic(intro_tensor(0.3), 0.3, 0.0);
    CHECK(rep.ok);
    CHECK(rep.max_deviation <= 1e-16);
    CHECK(check_stochastic(Tensor3(3), 0.0, 0.0).ok);
    const Tensor3 bad = Tensor3::from_entries(2, {{0, 0, 0, 1.0}, {1, 1, 0, 0.5}, {0, 0, 1, 1.0}, {0, 1, 1, 1.0}});
    const auto r2 = check_stochastic(bad, 1.0, 1e-13);
    CHECK(!r2.ok);
    CHECK(r2.worst_j == 1);
    CHECK(r2.worst_k == 0);
    CHECK(r2.max_deviation == doctest::Approx(0.5));
  }

  TEST_CASE("text format round trip and errors") {
    const Tensor3 b = random_tensor(5, 8);
    std::stringstream ss;
    write_tensor(ss, b);
    const Tensor3 back = read_tensor(ss);
    CHECK(back == b);

    std::istringstream neg("# comment\n2 1\n1 1 1 -0.5\n");
    try {
      read_tensor(neg);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    std::istringstream range("2 1\n1 3 1 0.5\n");
    CHECK_THROWS_AS(read_tensor(range), ParseError);
    std::istringstream count("2 2\n1 1 1 0.5\n");
    CHECK_THROWS_AS(read_tensor(count), ParseError);
    std::istringstream junk("2 1\n1 1 1 abc\n");
    CHECK_THROWS_AS(read_tensor(junk), ParseError);
  }

  TEST_CASE("vector reader accepts an optional count") {
    std::istringstream a("3\n0.2 0.3\n0.5\n");
    CHECK(read_vector(a) == Vec{0.2, 0.3, 0.5});
    std::istringstream b("0.25 0.75");
    CHECK(read_vector(b) == Vec{0.25, 0.75});
  }

  TEST_CASE("dimension mismatches throw") {
    const Tensor3 b = random_tensor(3, 2);
    CHECK_THROWS_AS(apply_quadratic(b, Vec{1, 2}), DimensionError);
    CHECK_THROWS_AS(apply_bilinear(b, Vec{1, 2, 3}, Vec{1}), DimensionError);
    CHECK_THROWS_AS(contract_left(b, Vec{1}), DimensionError);
  }
}
