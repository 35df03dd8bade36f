#include <doctest.h>

#include <cmath>
#include <limits>

#include "mlpr/analysis.hpp"
#include "mlpr/errors.hpp"
#include "mlpr/ingest.hpp"
#include "mlpr/mmatrix.hpp"
#include "mlpr/precision.hpp"
#include "support.hpp"

using namespace mlpr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec minimal(const Problem& p) { return reference_solution(p, ReferenceMode::Minimal).x_double; }

Eigen::MatrixXd coupling_eigen(const Problem& p, const Vec& m) {
  const std::size_t n = p.dim();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : p.B.entries()) {
    c(e.i, e.k) += e.value * m[e.j];
    c(e.i, e.j) += e.value * m[e.k];
  }
  return c;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("componentwise distance") {
    CHECK(cw_distance(Vec{1.001, 2.0}, Vec{1.0, 2.0}).value == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(cw_distance(Vec{1.0, 1e-30}, Vec{1.0, 0.0}).value == kInf);
    CHECK(cw_distance(Vec{0.0, 2.0}, Vec{0.0, 2.0}).value == 0.0);
    const CwDistance d = cw_distance(Vec{1.0, 2.2, 3.0}, Vec{1.0, 2.0, 3.0});
    CHECK(d.argmax == 1);
    CHECK_THROWS_AS(cw_distance(Vec{1.0}, Vec{1.0, 2.0}), DimensionError);

    DenseMatrix a(2, 2), b(2, 2);
    a(0, 1) = 1.0;
    b(0, 1) = 1.5;
    CHECK(cw_distance(b, a).value == doctest::Approx(0.5));

    const Tensor3 t = Tensor3::from_entries(2, {{0, 1, 1, 2.0}, {1, 0, 0, 4.0}});
    const Tensor3 u = Tensor3::from_entries(2, {{0, 1, 1, 2.0}, {1, 0, 0, 5.0}});
    const CwDistance dt = cw_distance(u, t);
    CHECK(dt.value == doctest::Approx(0.25));
    CHECK(dt.argmax == 4);  // i n^2 + j + k n
    const Tensor3 w = Tensor3::from_entries(2, {{0, 1, 1, 2.0}, {1, 0, 0, 4.0}, {0, 0, 0, 1e-20}});
    CHECK(cw_distance(w, t).value == kInf);
    CHECK(cw_distance(t, w).value == 1.0);
  }

  TEST_CASE("normwise error") {
    CHECK(norm_error(Vec{1.0 + 1e-9, 1e-9}, Vec{1.0, 0.0}) == doctest::Approx(std::sqrt(2.0) * 1e-9).epsilon(1e-6));
  }

  TEST_CASE("y with B = 0 is a and kappa is 1") {
    const Vec a{0.2, 0.3, 0.5};
    const Problem p = Problem::general(a, Tensor3(3));
    const Vec y = compute_y(p, a);
    for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(a[i]).epsilon(1e-15));
    CHECK(kappa(a, y) == doctest::Approx(1.0));
    const BoundReport b = bound_kappa(1e-3, 1.0, 3, 0.0);
    CHECK(b.bound == doctest::Approx(2e-3 * gamma_factor(1e-3, 3)));
    CHECK(b.discriminant_ok);
  }

  TEST_CASE("y against a dense solve") {
    for (double alpha : {0.3, 0.45}) {
      for (Builtin bi : {Builtin::Intro, Builtin::Ex1, Builtin::Ex2}) {
        const Problem p = builtin(bi, alpha);
        const Vec m = minimal(p);
        const Vec y = compute_y(p, m);
        const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p.dim(), p.dim()) - coupling_eigen(p, m);
        const Eigen::VectorXd ye = r.partialPivLu().solve(testing::to_eigen(p.a));
        for (std::size_t i = 0; i < p.dim(); ++i) CHECK(testing::rel_err(y[i], ye(i)) <= 1e-10);
        const YCheck c = check_y(m, y);
        CHECK(c.dominates);
        CHECK(c.same_pattern);
        CHECK(kappa(m, y) >= 1.0);
      }
    }
    const Problem g = Problem::general(Vec{0.1, 0.2}, Tensor3::from_entries(2, {{0, 0, 1, 0.3}, {1, 1, 1, 0.2}}));
    const Vec m = minimal(g);
    const Vec y = compute_y(g, m);
    for (std::size_t i = 0; i < 2; ++i) CHECK(y[i] >= m[i]);
  }

  TEST_CASE("kappa examples") {
    CHECK(kappa(Vec{1.0, 2.0}, Vec{2.0, 2.0}) == 2.0);
    CHECK(kappa(Vec{0.0, 2.0}, Vec{5.0, 3.0}) == 1.5);
    CHECK_THROWS_AS(kappa(Vec{0.0}, Vec{1.0}), DomainError);
    const YCheck c = check_y(Vec{0.0, 1.0}, Vec{0.1, 0.5});
    CHECK(!c.dominates);
    CHECK(!c.same_pattern);
  }

  TEST_CASE("omega of a scalar problem is S") {
    const Problem p = Problem::general(Vec{0.3}, Tensor3::from_entries(1, {{0, 0, 0, 0.5}}));
    const Vec m = minimal(p);
    const double c = 2.0 * 0.5 * m[0];
    DenseMatrix off(1, 1);
    const PartialInverse pi = partial_inverse(TripletMMatrix{off, Vec{1.0 - c}, Orientation::Row});
    CHECK(omega(p, m) == doctest::Approx(pi.S(0, 0)));
  }

  TEST_CASE("omega against the tree oracle") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Problem p = testing::random_pagerank(4, 0.3 + 0.04 * s, 500 + s, 1.0);
      const Vec m = minimal(p);
      const Eigen::MatrixXd c = coupling_eigen(p, m);
      TreeWeights w(5, std::vector<double>(5, 0.0));
      for (std::size_t i = 0; i < 4; ++i) {
        w[i + 1][0] = p.pr->one_minus_two_alpha;
        for (std::size_t j = 0; j < 4; ++j)
          if (i != j) w[i + 1][j + 1] = c(j, i);
      }
      const PartialInverse rs = tree_oracle_RS(w);
      double want = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        double z = 0.0;
        for (std::size_t k = 0; k < 4; ++k) z += rs.S(k, i) * m[k];
        want = std::max(want, z / m[i]);
      }
      CHECK(testing::rel_err(omega(p, m), want) <= 1e-10);
      CHECK(omega(p, m) > 0.0);
    }
  }

  TEST_CASE("omega stays bounded while kappa grows") {
    const Problem p0 = builtin(Builtin::Ex1, 0.3);
    const Vec m0 = minimal(p0);
    const double w0 = omega(p0, m0), k0 = kappa(m0, compute_y(p0, m0));
    for (double alpha : {0.49, 0.499999}) {
      const Problem p = builtin(Builtin::Ex1, alpha);
      const Vec m = minimal(p);
      const double w = omega(p, m), k = kappa(m, compute_y(p, m));
      CAPTURE(alpha);
      CHECK(w / w0 < 10.0);
      CHECK(w0 / w < 10.0);
      const double growth = k / k0, expect = (1.0 - 0.6) / (1.0 - 2.0 * alpha);
      CHECK(growth > 0.1 * expect);
      CHECK(growth < 10.0 * expect);
    }
  }

  TEST_CASE("kappa and omega are deterministic") {
    const Problem p = builtin(Builtin::Ex2, 0.49);
    const Vec m = minimal(p);
    CHECK(omega(p, m) == omega(p, minimal(p)));
    CHECK(kappa(m, compute_y(p, m)) == kappa(m, compute_y(p, m)));
  }

  TEST_CASE("perturbation bounds") {
    CHECK(bound_kappa(0.0, 7.0, 4, 0.5).bound == 0.0);
    CHECK(bound_omega(0.0, 7.0, 4, 0.5).bound == 0.0);
    CHECK(gamma_factor(0.0, 5) == 1.0);
    CHECK(gamma_factor(0.1, 2) == doctest::Approx(1.1 / 0.81));
    const BoundReport o = bound_omega(1e-8, 3.0, 4, 0.99);
    CHECK(o.bound == doctest::Approx(2 * 3.0 * 1e-8 * gamma_factor(1e-8, 4)));
    CHECK(o.applicable);
    CHECK(!bound_omega(1e-8, 3.0, 4, 1.0).applicable);
    CHECK(!bound_omega(0.2, 3.0, 4, 0.5).discriminant_ok);
    CHECK(!bound_kappa(1e-8, 1e6, 4, 0.5).discriminant_ok);
    CHECK(!bound_kappa(0.1, 2.0, 4, 0.95).spectral_ok);
    CHECK(bound_omega(0.1, 2.0, 4, 0.95).spectral_ok);
    CHECK_THROWS_AS(bound_omega(1.0, 1.0, 2, 0.0), DomainError);
    CHECK_THROWS_AS(bound_kappa(-1e-3, 1.0, 2, 0.0), DomainError);

    // Applicability is monotone in eps.
    for (double w : {0.5, 3.0, 40.0, 1e4}) {
      bool seen_inapplicable = false;
      for (double e = 1e-12; e < 0.9; e *= 1.7) {
        const bool ok = bound_omega(e, w, 6, 0.9).applicable;
        if (seen_inapplicable) CHECK(!ok);
        if (!ok) seen_inapplicable = true;
      }
    }
  }

  TEST_CASE("zero-sum perturbations") {
    const Problem p = builtin(Builtin::Ex1, 0.3);
    const PerturbedProblem same = zero_sum_perturb(p, 0.0, 5);
    CHECK(same.epsilon_realized == 0.0);
    CHECK(same.problem.pr->v == p.pr->v);
    CHECK(cw_distance(same.problem.B, p.B).value == 0.0);

    for (PerturbMode mode : {PerturbMode::Multiplicative, PerturbMode::Additive}) {
      const PerturbedProblem q = zero_sum_perturb(p, 1e-6, 9, mode);
      CHECK(std::fabs(sum(q.problem.pr->v) - 1.0) <= 1e-15);
      for (double s : unfolding_column_sums(q.problem.pr->P)) CHECK(std::fabs(s - 1.0) <= 1e-15);
      CHECK(q.epsilon_realized > 0.0);
      const PerturbedProblem r = zero_sum_perturb(p, 1e-6, 9, mode);
      CHECK(r.problem.pr->v == q.problem.pr->v);
      CHECK(cw_distance(r.problem.B, q.problem.B).value == 0.0);
    }
    const PerturbedProblem mul = zero_sum_perturb(p, 1e-6, 9);
    CHECK(mul.epsilon_realized <= 2e-6);
    CHECK(mul.problem.pr->P.nnz() == p.pr->P.nnz());
    CHECK_THROWS_AS(zero_sum_perturb(Problem::general(Vec{0.5}, Tensor3(1)), 1e-3, 1), DomainError);
  }

  TEST_CASE("perturbation experiment on ex1") {
    const PerturbExperiment e = run_perturbation_experiment(builtin(Builtin::Ex1, 0.3), 1e-8, 20, 42);
    REQUIRE(e.trials.size() == 20);
    CHECK(e.all_within);
    CHECK(e.max_ratio <= 1.0);
    CHECK(e.rho < 1.0);
    for (const auto& t : e.trials) {
      CHECK(t.omega_bound.applicable);
      CHECK(t.observed_dcw <= t.omega_bound.bound);
      CHECK(t.epsilon_realized <= 2e-8);
    }
    const PerturbExperiment again = run_perturbation_experiment(builtin(Builtin::Ex1, 0.3), 1e-8, 20, 42);
    for (std::size_t t = 0; t < 20; ++t) CHECK(again.trials[t].observed_dcw == e.trials[t].observed_dcw);
  }

  TEST_CASE("inequalities at the minimal solution") {
    for (double alpha : {0.2, 0.4, 0.49}) {
      for (Builtin bi : {Builtin::Ex1, Builtin::Ex2}) {
        const Problem p = builtin(bi, alpha);
        const Vec m = minimal(p);
        const double k = kappa(m, compute_y(p, m));
        const std::size_t n = p.dim();
        const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n) - coupling_eigen(p, m);
        const Eigen::VectorXd me = testing::to_eigen(m);
        const Eigen::VectorXd bm2 = testing::to_eigen(apply_quadratic(p.B, m));
        const Eigen::VectorXd u = r.partialPivLu().solve(me);
        const Eigen::VectorXd v = r.partialPivLu().solve(bm2);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(u(i) <= (2 * k - 1) * m[i] + 1e-12);
          CHECK(v(i) <= (k - 1) * m[i] + 1e-12);
        }
      }
    }
  }

  TEST_CASE("limiting accuracy predictors") {
    const Vec x{0.5, 0.25, 2.0};
    const LimitingAccuracy la = limiting_accuracy_predictors(Problem::general(Vec{1, 1, 1}, Tensor3(3)), x);
    CHECK(la.abs_inverse_times_x == 2.0);
    CHECK(la.inverse_norm_times_x == 2.0);
    CHECK(la.condition == 1.0);

    const Problem p = builtin(Builtin::Ex1, 0.49);
    const Vec m = minimal(p);
    const LimitingAccuracy lm = limiting_accuracy_predictors(p, m);
    CHECK(lm.abs_inverse_times_x <= lm.inverse_norm_times_x * (1 + 1e-12));
    CHECK(lm.condition >= 1.0);
    CHECK(gamma_tilde(4) == doctest::Approx(4 * std::ldexp(1.0, -53)));
  }
}
