// mlpr: solve, perturb, ingest and compare multilinear PageRank instances.
//
// Exit codes: 0 converged / ok, 2 iteration limit, 3 numerical failure,
// 64 usage or input error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mlpr/analysis.hpp"
#include "mlpr/errors.hpp"
#include "mlpr/ingest.hpp"
#include "mlpr/precision.hpp"
#include "mlpr/report.hpp"
#include "mlpr/solvers.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kMaxIt = 2;
constexpr int kNumerical = 3;
constexpr int kUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Source {
  std::string builtin;
  std::string tensor;
  std::string vfile;
  std::string mtx;
  bool general = false;
  double alpha = -1.0;
  std::optional<double> omta;
  double delta = 1e-6;
  double nu = 0.0;
  std::uint64_t v_seed = 1;
};

void add_source(CLI::App* app, Source& s) {
  auto* b = app->add_option("--builtin", s.builtin, "Built-in instance: intro, ex1, ex2");
  auto* t = app->add_option("--tensor", s.tensor, "Tensor file (i j k value, 1-based)");
  auto* m = app->add_option("--mtx", s.mtx, "Matrix Market graph for the three-cycle pipeline");
  b->excludes(t)->excludes(m);
  t->excludes(m);
  app->add_option("--v", s.vfile, "Teleportation vector file (or a, with --general)")->needs(t);
  app->add_flag("--general", s.general, "Read --tensor/--v as B and a of x = a + B x^2")->needs(t);
  app->add_option("--alpha", s.alpha, "Damping alpha in (0, 1)");
  app->add_option("--one-minus-two-alpha", s.omta, "Exact value of 1 - 2 alpha");
  app->add_option("--delta", s.delta, "Intro instance parameter");
  app->add_option("--nu", s.nu, "Three-cycle weight for --mtx, in [0, 1]");
  app->add_option("--v-seed", s.v_seed, "Seed of the heavy-tailed v for --mtx");
}

mlpr::Problem load(const Source& s) {
  if (!s.general && !(s.alpha > 0.0 && s.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (s.omta && std::fabs(*s.omta - (1.0 - 2.0 * s.alpha)) > 1e-12)
    throw UsageError("--one-minus-two-alpha is inconsistent with --alpha");
  try {
    if (!s.builtin.empty()) return mlpr::builtin(mlpr::parse_builtin(s.builtin), s.alpha, s.delta, s.omta);
    if (!s.tensor.empty()) {
      mlpr::Tensor3 t = mlpr::read_tensor_file(s.tensor);
      if (s.vfile.empty()) throw UsageError("--tensor needs --v");
      mlpr::Vec v = mlpr::read_vector_file(s.vfile);
      if (s.general) return mlpr::Problem::general(std::move(v), std::move(t));
      return mlpr::Problem::pagerank(std::move(v), std::move(t), s.alpha, s.omta);
    }
    if (!s.mtx.empty()) {
      if (!(s.nu >= 0.0 && s.nu <= 1.0)) throw UsageError("--nu must lie in [0, 1]");
      const mlpr::Adjacency a = mlpr::read_matrix_market_file(s.mtx);
      const mlpr::Vec v = mlpr::heavy_tailed_vector(a.n, s.v_seed);
      return mlpr::Problem::pagerank(v, mlpr::build_pagerank_tensor(a, v, s.nu), s.alpha, s.omta);
    }
  } catch (const mlpr::DomainError& e) {
    throw UsageError(e.what());
  } catch (const mlpr::DimensionError& e) {
    throw UsageError(e.what());
  } catch (const mlpr::ParseError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("one of --builtin, --tensor or --mtx is required");
}

struct SolveArgs {
  std::string method = "newton-gth";
  std::vector<std::string> methods;
  double tol = 1e-15;
  std::size_t maxit = 500;
  std::vector<std::size_t> blocks;
  std::string start = "zero";
  std::string inner = "gth";
  bool reference = false;
  std::string reference_mode = "minimal";
  std::string json;
  std::string csv;
};

void add_solver_flags(CLI::App* app, SolveArgs& a) {
  app->add_option("--tol", a.tol, "Residual tolerance (inf-norm)");
  app->add_option("--maxit", a.maxit, "Iteration limit");
  app->add_option("--blocks", a.blocks, "Block sizes for block Jacobi")->delimiter(',');
  app->add_option("--start", a.start, "Starting vector: zero or v");
  app->add_option("--jacobi-inner", a.inner, "Block solver for block-jacobi: gth or lu");
  app->add_option("--reference-mode", a.reference_mode, "minimal or stochastic");
  app->add_option("--json", a.json, "JSON report path");
  app->add_option("--csv", a.csv, "CSV output path");
}

mlpr::SolverOptions options(const SolveArgs& a, mlpr::Method m) {
  mlpr::SolverOptions o;
  o.method = m;
  if (!(a.tol > 0.0)) throw UsageError("--tol must be positive");
  o.tol = a.tol;
  o.maxit = a.maxit;
  o.block_sizes = a.blocks;
  if (a.start == "zero") o.start = mlpr::Start::Zero;
  else if (a.start == "v") o.start = mlpr::Start::V;
  else throw UsageError("--start must be zero or v");
  if (a.inner == "gth") o.jacobi_inner = mlpr::JacobiInner::Gth;
  else if (a.inner == "lu") o.jacobi_inner = mlpr::JacobiInner::Lu;
  else throw UsageError("--jacobi-inner must be gth or lu");
  o.record_history = false;
  return o;
}

mlpr::Method method(const std::string& s) {
  const auto m = mlpr::parse_method(s);
  if (!m) throw UsageError("unknown method '" + s + "'");
  return *m;
}

std::optional<mlpr::Vec> reference(const mlpr::Problem& p, const SolveArgs& a, nlohmann::json* j) {
  mlpr::ReferenceMode mode;
  if (a.reference_mode == "minimal") mode = mlpr::ReferenceMode::Minimal;
  else if (a.reference_mode == "stochastic") mode = mlpr::ReferenceMode::Stochastic;
  else throw UsageError("--reference-mode must be minimal or stochastic");
  const mlpr::ReferenceSolution r = mlpr::reference_solution(p, mode);
  if (j) (*j)["reference"] = mlpr::to_json(r);
  if (!r.converged) std::cerr << "warning: reference solution did not converge\n";
  return r.x_double;
}

template <class F>
void with_file(const std::string& path, F&& f) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  f(out);
}

int exit_for(mlpr::Termination t) {
  switch (t) {
    case mlpr::Termination::TolReached: return kOk;
    case mlpr::Termination::MaxIt: return kMaxIt;
    default: return kNumerical;
  }
}

int cmd_solve(const Source& src, const SolveArgs& a) {
  const mlpr::Problem p = load(src);
  const mlpr::SolverOptions o = options(a, method(a.method));
  nlohmann::json j;
  std::optional<mlpr::Vec> ref;
  if (a.reference) ref = reference(p, a, &j);
  const mlpr::SolveReport r = mlpr::solve(p, o, ref);
  j["report"] = mlpr::to_json(r);
  with_file(a.json, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  with_file(a.csv, [&](std::ostream& out) { mlpr::write_iteration_csv(out, r); });
  std::cout << "termination " << mlpr::termination_name(r.termination) << " after " << r.iterations
            << " iterations, residual " << mlpr::format17(r.residual_history.empty() ? 0.0 : r.residual_history.back())
            << '\n';
  std::cout << "x";
  for (double x : r.x) std::cout << ' ' << mlpr::format17(x);
  std::cout << '\n';
  return exit_for(r.termination);
}

int cmd_compare(const Source& src, SolveArgs a) {
  const mlpr::Problem p = load(src);
  if (a.methods.empty()) throw UsageError("--methods is required");
  std::vector<mlpr::Method> ms;
  for (const auto& s : a.methods) ms.push_back(method(s));
  nlohmann::json j;
  const auto ref = reference(p, a, &j);
  std::vector<mlpr::SolveReport> runs;
  for (auto m : ms) {
    runs.push_back(mlpr::solve(p, options(a, m), ref));
    j["runs"].push_back(mlpr::to_json(runs.back()));
    const auto& r = runs.back();
    std::cout << mlpr::method_name(m) << ": " << mlpr::termination_name(r.termination) << ", " << r.iterations
              << " iterations, final e_cw "
              << mlpr::format17(r.ecw_history.empty() ? 0.0 : r.ecw_history.back()) << '\n';
  }
  with_file(a.json, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  with_file(a.csv, [&](std::ostream& out) { mlpr::write_compare_csv(out, runs); });
  return kOk;
}

struct PerturbArgs {
  double epsilon = 1e-8;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string mode = "multiplicative";
  std::string json;
  std::string csv;
};

int cmd_perturb(const Source& src, const PerturbArgs& a) {
  const mlpr::Problem p = load(src);
  if (!p.is_pagerank()) throw UsageError("perturb needs a PageRank instance");
  if (!(a.epsilon >= 0.0 && a.epsilon < 1.0)) throw UsageError("--epsilon must lie in [0, 1)");
  mlpr::PerturbMode mode;
  if (a.mode == "multiplicative") mode = mlpr::PerturbMode::Multiplicative;
  else if (a.mode == "additive") mode = mlpr::PerturbMode::Additive;
  else throw UsageError("--mode must be multiplicative or additive");
  const mlpr::PerturbExperiment e = mlpr::run_perturbation_experiment(p, a.epsilon, a.trials, a.seed, mode);
  with_file(a.csv, [&](std::ostream& out) { mlpr::write_perturb_csv(out, e); });
  with_file(a.json, [&](std::ostream& out) { out << mlpr::to_json(e).dump(2) << '\n'; });
  std::cout << "kappa " << mlpr::format17(e.kappa) << " omega " << mlpr::format17(e.omega) << " max ratio "
            << mlpr::format17(e.max_ratio) << (e.all_within ? " (all within bound)" : " (bound exceeded)") << '\n';
  return kOk;
}

struct IngestArgs {
  std::string mtx;
  double nu = 0.0;
  std::uint64_t v_seed = 1;
  std::string out;
  std::string v_out;
  std::string json;
};

int cmd_ingest(const IngestArgs& a) {
  if (!(a.nu >= 0.0 && a.nu <= 1.0)) throw UsageError("--nu must lie in [0, 1]");
  mlpr::Adjacency g;
  try {
    g = mlpr::read_matrix_market_file(a.mtx);
  } catch (const mlpr::ParseError& e) {
    throw UsageError(std::string(e.what()));
  }
  const mlpr::Tensor3 c = mlpr::three_cycle_tensor(g);
  if (c.nnz() == 0) std::cerr << "warning: graph has no three-cycles, C is the zero tensor\n";
  const mlpr::Vec v = mlpr::heavy_tailed_vector(g.n, a.v_seed);
  const mlpr::Tensor3 p = mlpr::build_pagerank_tensor(g, v, a.nu);
  const auto rep = mlpr::check_stochastic(p, 1.0, 1e-13);
  if (!a.out.empty()) mlpr::write_tensor_file(a.out, p);
  with_file(a.v_out, [&](std::ostream& out) {
    for (double x : v) out << mlpr::format17(x) << '\n';
  });
  nlohmann::json j{{"n", g.n},
                   {"edges", g.edges.size()},
                   {"three_cycle_nnz", c.nnz()},
                   {"nnz", p.nnz()},
                   {"max_deviation", rep.max_deviation},
                   {"stochastic", rep.ok}};
  with_file(a.json, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  std::cout << j.dump() << '\n';
  return rep.ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilinear PageRank solver"};
  app.require_subcommand(1);

  Source solve_src, cmp_src, pert_src;
  SolveArgs solve_args, cmp_args;
  PerturbArgs pert_args;
  IngestArgs ingest_args;

  auto* solve = app.add_subcommand("solve", "Solve one instance");
  add_source(solve, solve_src);
  add_solver_flags(solve, solve_args);
  solve->add_option("--method", solve_args.method, "fixed-point, newton, newton-gth, block-jacobi, bjgv");
  solve->add_flag("--reference", solve_args.reference, "Track errors against the double-double reference");

  auto* compare = app.add_subcommand("compare", "Run several methods against the reference");
  add_source(compare, cmp_src);
  add_solver_flags(compare, cmp_args);
  compare->add_option("--methods", cmp_args.methods, "Comma-separated method list")->delimiter(',');

  auto* perturb = app.add_subcommand("perturb", "Zero-sum perturbation experiment");
  add_source(perturb, pert_src);
  perturb->add_option("--epsilon", pert_args.epsilon, "Perturbation size");
  perturb->add_option("--trials", pert_args.trials, "Number of trials");
  perturb->add_option("--seed", pert_args.seed, "Seed");
  perturb->add_option("--mode", pert_args.mode, "multiplicative or additive");
  perturb->add_option("--json", pert_args.json, "Summary JSON path");
  perturb->add_option("--csv", pert_args.csv, "Per-trial CSV path");

  auto* ingest = app.add_subcommand("ingest", "Build a PageRank tensor from a graph");
  ingest->add_option("--mtx", ingest_args.mtx, "Matrix Market file")->required();
  ingest->add_option("--nu", ingest_args.nu, "Three-cycle weight in [0, 1]");
  ingest->add_option("--v-seed", ingest_args.v_seed, "Seed of the heavy-tailed v");
  ingest->add_option("--out", ingest_args.out, "Tensor output path");
  ingest->add_option("--v-out", ingest_args.v_out, "Vector output path");
  ingest->add_option("--json", ingest_args.json, "Report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*solve) return cmd_solve(solve_src, solve_args);
    if (*compare) return cmd_compare(cmp_src, cmp_args);
    if (*perturb) return cmd_perturb(pert_src, pert_args);
    if (*ingest) return cmd_ingest(ingest_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mlpr::SingularError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const mlpr::ReducibleError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const mlpr::NonnegativityViolation& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const mlpr::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
