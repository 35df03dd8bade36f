#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlpr/analysis.hpp"
#include "mlpr/precision.hpp"
#include "mlpr/solvers.hpp"

namespace mlpr {

// Bumped whenever a CSV column changes.
inline constexpr int kCsvSchemaVersion = 1;

// %.17g
std::string format17(double x);

nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const ReferenceSolution& r);  // 34-digit decimal strings
nlohmann::json to_json(const BoundReport& b);
nlohmann::json to_json(const PerturbExperiment& e);  // summary, no per-trial rows

// k, residual_inf[, e_cw, e_norm][, z]
void write_iteration_csv(std::ostream& out, const SolveReport& r);

// method, k, e_cw, e_norm, residual_inf
void write_compare_csv(std::ostream& out, const std::vector<SolveReport>& runs);

// trial, epsilon_realized, d_cw_observed, bound_omega, bound_kappa,
// omega_applicable, kappa_applicable
void write_perturb_csv(std::ostream& out, const PerturbExperiment& e);

}  // namespace mlpr
