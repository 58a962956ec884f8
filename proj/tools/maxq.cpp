#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxq/experiments.hpp"

namespace {

maxq::Shape parse_shape(const std::string& s) {
  std::vector<std::int64_t> dims;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &pos);
    } catch (...) {
      throw std::invalid_argument("--shape: bad dimension '" + part + "'");
    }
    if (pos != part.size()) throw std::invalid_argument("--shape: bad dimension '" + part + "'");
    dims.push_back(v);
  }
  if (dims.empty()) throw std::invalid_argument("--shape: expected n1,n2,...");
  return maxq::Shape(dims);
}

struct CompleteArgs {
  std::string obs_path;
  std::string shape;
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 1.0;
  std::string solver = "pqn";
  std::uint64_t seed = 0;
  std::string out_path;
};

int cmd_complete(const CompleteArgs& a) {
  const maxq::Shape shape = parse_shape(a.shape);
  const maxq::ObservationSet obs = maxq::read_observations_csv(a.obs_path, shape);
  maxq::SolverParams sp;
  sp.method = maxq::method_from_string(a.solver);
  sp.seed = a.seed;
  const maxq::CompletionResult res =
      maxq::complete_with_cv(obs, shape, a.lower, a.upper, sp, a.alpha);
  maxq::write_tns(res.recovered, a.out_path);
  const nlohmann::json out = {{"chosen_R", res.chosen_R},
                              {"validation_rmse", res.validation_rmse},
                              {"iterations", res.solver_diag.iter}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct MaxqnormArgs {
  std::string input_path;
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t seed = 0;
};

int cmd_maxqnorm(const MaxqnormArgs& a) {
  const maxq::DenseTensor T = maxq::read_tns(a.input_path);
  maxq::SolverParams sp;
  sp.seed = a.seed;
  const maxq::EstimateResult est = maxq::estimate_max_qnorm(T, a.lower, a.upper, sp);
  const nlohmann::json out = {{"estimate", est.estimate}, {"resolution", est.resolution}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct GridArgs {
  std::string config_path;
  std::string out_path;
  int jobs = 1;
};

int cmd_grid(const GridArgs& a) {
  const maxq::GridConfig cfg = maxq::load_grid_config(a.config_path);
  const std::vector<maxq::GridRow> rows = maxq::run_grid(cfg, a.jobs);
  const std::vector<maxq::GridSummaryRow> summary = maxq::summarize_grid(rows);
  const std::string summary_path = maxq::summary_path_for(a.out_path);
  maxq::write_grid_csv(rows, a.out_path);
  maxq::write_grid_summary_csv(summary, summary_path);
  const nlohmann::json out = {{"detail_csv", a.out_path},
                              {"summary_csv", summary_path},
                              {"rows", rows.size()},
                              {"summary_rows", summary.size()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct NormArgs {
  std::string config_path;
  std::string out_path;
};

int cmd_norm_experiment(const NormArgs& a) {
  const maxq::NormConfig cfg = maxq::load_norm_config(a.config_path);
  const std::vector<maxq::NormRow> rows = maxq::run_norm_experiment(cfg);
  maxq::write_norm_csv(rows, a.out_path);
  const nlohmann::json out = {{"csv", a.out_path}, {"rows", rows.size()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank tensor completion with a max-qnorm budget"};
  app.require_subcommand(1);

  CompleteArgs ca;
  CLI::App* complete = app.add_subcommand(
      "complete", "recover a tensor from an observation CSV by cross-validated completion");
  complete->add_option("--obs", ca.obs_path, "observation CSV (header i1,...,id,value)")
      ->required();
  complete->add_option("--shape", ca.shape, "tensor shape, comma separated")->required();
  complete->add_option("--lower", ca.lower, "lower bound on the max-qnorm budget")->required();
  complete->add_option("--upper", ca.upper, "upper bound on the max-qnorm budget")->required();
  complete->add_option("--alpha", ca.alpha, "flatness bound (default 1)");
  complete->add_option("--solver", ca.solver, "pgd|pqn|sgd (default pqn)");
  complete->add_option("--seed", ca.seed, "random seed (default 0)");
  complete->add_option("--out", ca.out_path, "output .tns path for the recovered tensor")
      ->required();

  MaxqnormArgs ma;
  CLI::App* maxqnorm =
      app.add_subcommand("maxqnorm", "estimate the max-qnorm of a dense .tns tensor");
  maxqnorm->add_option("--input", ma.input_path, "input .tns path")->required();
  maxqnorm->add_option("--lower", ma.lower, "lower bracket for the estimate")->required();
  maxqnorm->add_option("--upper", ma.upper, "upper bracket for the estimate")->required();
  maxqnorm->add_option("--seed", ma.seed, "random seed (default 0)");

  GridArgs ga;
  CLI::App* grid =
      app.add_subcommand("grid", "run a completion experiment grid and write result CSVs");
  grid->add_option("--config", ga.config_path, "grid config JSON")->required();
  grid->add_option("--out", ga.out_path, "detail CSV path (summary CSV is written next to it)")
      ->required();
  grid->add_option("--jobs", ga.jobs, "worker count (default 1)");

  NormArgs na;
  CLI::App* norm = app.add_subcommand(
      "norm-experiment", "estimate max-qnorms of random low-rank tensors over a grid");
  norm->add_option("--config", na.config_path, "norm experiment config JSON")->required();
  norm->add_option("--out", na.out_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 2;
  }

  try {
    if (complete->parsed()) return cmd_complete(ca);
    if (maxqnorm->parsed()) return cmd_maxqnorm(ma);
    if (grid->parsed()) return cmd_grid(ga);
    if (norm->parsed()) return cmd_norm_experiment(na);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
