#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlpr/cw.hpp"
#include "mlpr/problem.hpp"
#include "mlpr/tensor.hpp"

namespace mlpr {

CwDistance cw_distance(const Tensor3& bt, const Tensor3& b);

// ||x - xt||_2 / ||x||_2
double norm_error(std::span<const double> xt, std::span<const double> x);

// y = R_m^{-1} a. PageRank problems use the Col triplet of R_m with column
// sums |1 - 2 alpha|; general problems use the computed column sums of R_m
// when they are nonnegative and fall back to partial-pivoting LU otherwise.
Vec compute_y(const Problem& p, std::span<const double> m);

struct YCheck {
  bool dominates = true;     // y >= m - tol
  bool same_pattern = true;  // y_i == 0 iff m_i == 0
};
YCheck check_y(std::span<const double> m, std::span<const double> y, double tol = 1e-14);

// max_{m_i != 0} y_i / m_i
double kappa(std::span<const double> m, std::span<const double> y);

// max_{m_i != 0} (S^T m)_i / m_i with S from the partial inverse of R_m^T.
double omega(const Problem& p, std::span<const double> m);

// Spectral radius of B m: + B :m for PageRank problems (2 alpha 1^T m).
double coupling_spectral_radius(const Problem& p, std::span<const double> m);

struct BoundReport {
  double epsilon = 0.0;
  double gamma = 1.0;
  double condition = 1.0;  // kappa or omega
  double rho = 0.0;
  double bound = 0.0;
  bool spectral_ok = true;
  bool discriminant_ok = true;
  bool applicable = true;
};

// (1+eps)^(n-1) / (1-eps)^n
double gamma_factor(double eps, std::size_t n);

// 2 eps (2 kappa - 1) gamma; needs (1+eps) rho < 1 and
// eps + eps^2 < 1 / (4 gamma^2 (2 kappa - 1)(kappa - 1)).
BoundReport bound_kappa(double eps, double kappa_value, std::size_t n, double rho);

// 2 omega gamma eps; needs eps + eps^2 < 1 / (4 gamma^2 omega^2) and rho < 1.
// Zero-sum perturbations leave the column sums of B m: + B :m, and hence its
// spectral radius, unchanged, so the (1+eps) factor is not applied here.
BoundReport bound_omega(double eps, double omega_value, std::size_t n, double rho);

enum class PerturbMode {
  Multiplicative,  // P_ijk (1 + eps E'_ijk), E' centred per column with weights P
  Additive         // P + eps (R - mean), clamped at 0 and renormalized
};

struct PerturbedProblem {
  Problem problem;
  double epsilon_realized = 0.0;  // max(d(vt, v), d(Pt, P))
};

PerturbedProblem zero_sum_perturb(const Problem& p, double eps, std::uint64_t seed,
                                  PerturbMode mode = PerturbMode::Multiplicative);

struct PerturbTrial {
  std::size_t trial = 0;
  double epsilon_realized = 0.0;
  double observed_dcw = 0.0;
  BoundReport omega_bound;
  BoundReport kappa_bound;
};

struct PerturbExperiment {
  Vec m;
  double kappa = 0.0;
  double omega = 0.0;
  double rho = 0.0;
  std::vector<PerturbTrial> trials;
  double max_ratio = 0.0;  // max observed / bound_omega over applicable trials
  bool all_within = true;
};

// Minimal solutions of the original and each perturbed problem come from the
// double-double reference solver. Trial t draws from a stream seeded by
// (seed, t).
PerturbExperiment run_perturbation_experiment(const Problem& p, double eps, std::size_t trials,
                                              std::uint64_t seed,
                                              PerturbMode mode = PerturbMode::Multiplicative);

struct LimitingAccuracy {
  double abs_inverse_times_x = 0.0;  // || |R^{-1}| x* ||_inf
  double inverse_norm_times_x = 0.0; // ||R^{-1}||_inf ||x*||_inf
  double condition = 0.0;            // cond_inf(R)
};

LimitingAccuracy limiting_accuracy_predictors(const Problem& p, std::span<const double> x_star);

// m u / (1 - m u) with unit roundoff u = 2^-53.
double gamma_tilde(std::size_t m);

}  // namespace mlpr
