#include "mlpr/report.hpp"

#include <cstdio>
#include <ostream>

namespace mlpr {

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void header(std::ostream& out, const char* kind) {
  out << "# mlpr " << kind << " csv schema " << kCsvSchemaVersion << '\n';
}

}  // namespace

nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json j;
  j["method"] = method_name(r.method);
  j["termination"] = termination_name(r.termination);
  j["iterations"] = r.iterations;
  j["message"] = r.message;
  j["x"] = r.x;
  j["residual_history"] = r.residual_history;
  if (!r.z_history.empty()) j["z_history"] = r.z_history;
  if (!r.ecw_history.empty()) {
    j["ecw_history"] = r.ecw_history;
    j["enorm_history"] = r.enorm_history;
  }
  if (r.method == Method::BlockJacobiGthVariant) j["max_overshoot"] = r.max_overshoot;
  return j;
}

nlohmann::json to_json(const ReferenceSolution& r) {
  nlohmann::json j;
  std::vector<std::string> xs;
  for (const auto& v : r.x) xs.push_back(to_string(v, 34));
  j["x"] = xs;
  j["x_double"] = r.x_double;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

nlohmann::json to_json(const BoundReport& b) {
  return {{"epsilon", b.epsilon},         {"gamma", b.gamma},
          {"condition", b.condition},     {"rho", b.rho},
          {"bound", b.bound},             {"spectral_ok", b.spectral_ok},
          {"discriminant_ok", b.discriminant_ok}, {"applicable", b.applicable}};
}

nlohmann::json to_json(const PerturbExperiment& e) {
  nlohmann::json j;
  j["m"] = e.m;
  j["kappa"] = e.kappa;
  j["omega"] = e.omega;
  j["rho"] = e.rho;
  j["trials"] = e.trials.size();
  j["max_ratio"] = e.max_ratio;
  j["all_within"] = e.all_within;
  double eps_max = 0.0, obs_max = 0.0;
  bool applicable = true;
  for (const auto& t : e.trials) {
    eps_max = std::max(eps_max, t.epsilon_realized);
    obs_max = std::max(obs_max, t.observed_dcw);
    applicable = applicable && t.omega_bound.applicable;
  }
  j["epsilon_realized"] = eps_max;
  j["observed_dcw"] = obs_max;
  if (!e.trials.empty()) {
    const auto& last = e.trials.back();
    j["gamma"] = last.omega_bound.gamma;
    j["bound"] = last.omega_bound.bound;
    j["bound_kappa"] = last.kappa_bound.bound;
  }
  j["applicable"] = applicable;
  return j;
}

void write_iteration_csv(std::ostream& out, const SolveReport& r) {
  header(out, "iterations");
  const bool err = !r.ecw_history.empty();
  const bool z = !r.z_history.empty();
  out << "k,residual_inf";
  if (err) out << ",e_cw,e_norm";
  if (z) out << ",z";
  out << '\n';
  for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
    out << k << ',' << format17(r.residual_history[k]);
    if (err) {
      out << ',' << (k < r.ecw_history.size() ? format17(r.ecw_history[k]) : "")
          << ',' << (k < r.enorm_history.size() ? format17(r.enorm_history[k]) : "");
    }
    if (z) out << ',' << (k < r.z_history.size() ? format17(r.z_history[k]) : "");
    out << '\n';
  }
}

void write_compare_csv(std::ostream& out, const std::vector<SolveReport>& runs) {
  header(out, "compare");
  out << "method,k,e_cw,e_norm,residual_inf\n";
  for (const auto& r : runs)
    for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
      out << method_name(r.method) << ',' << k << ','
          << (k < r.ecw_history.size() ? format17(r.ecw_history[k]) : "") << ','
          << (k < r.enorm_history.size() ? format17(r.enorm_history[k]) : "") << ','
          << format17(r.residual_history[k]) << '\n';
    }
}

void write_perturb_csv(std::ostream& out, const PerturbExperiment& e) {
  header(out, "perturb");
  out << "trial,epsilon_realized,d_cw_observed,bound_omega,bound_kappa,omega_applicable,kappa_applicable\n";
  for (const auto& t : e.trials)
    out << t.trial << ',' << format17(t.epsilon_realized) << ',' << format17(t.observed_dcw) << ','
        << format17(t.omega_bound.bound) << ',' << format17(t.kappa_bound.bound) << ','
        << (t.omega_bound.applicable ? 1 : 0) << ',' << (t.kappa_bound.applicable ? 1 : 0) << '\n';
}

}  // namespace mlpr
