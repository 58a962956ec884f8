#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "completion.hpp"

namespace maxq {

// A grid method is either the tensor pipeline driven by one of the three
// solvers, or the matricized baseline (which reuses the quasi-Newton solver
// on the flattened problem). The numeric values are stable identifiers that
// enter seed derivation, so they must never be reordered.
enum class GridMethod { maxq_pgd = 0, maxq_pqn = 1, maxq_sgd = 2, matricized = 3 };

inline GridMethod grid_method_from_string(const std::string& s) {
  if (s == "maxq_pgd") return GridMethod::maxq_pgd;
  if (s == "maxq_pqn") return GridMethod::maxq_pqn;
  if (s == "maxq_sgd") return GridMethod::maxq_sgd;
  if (s == "matricized") return GridMethod::matricized;
  throw std::invalid_argument(
      "grid method: expected one of maxq_pgd|maxq_pqn|maxq_sgd|matricized, got '" + s + "'");
}

inline const char* to_string(GridMethod m) {
  switch (m) {
    case GridMethod::maxq_pgd: return "maxq_pgd";
    case GridMethod::maxq_pqn: return "maxq_pqn";
    case GridMethod::maxq_sgd: return "maxq_sgd";
    case GridMethod::matricized: return "matricized";
  }
  throw std::logic_error("grid method: unknown enum value");
}

inline Method solver_method_for(GridMethod m) {
  switch (m) {
    case GridMethod::maxq_pgd: return Method::pgd;
    case GridMethod::maxq_pqn: return Method::pqn;
    case GridMethod::maxq_sgd: return Method::sgd;
    case GridMethod::matricized: return Method::pqn;
  }
  throw std::logic_error("grid method: unknown enum value");
}

struct GridConfig {
  Shape shape;
  std::vector<int> ranks;
  std::vector<double> sample_rates;      // fraction of entries observed, in (0,1]
  std::optional<double> noise_db;        // SNR in dB; unset means noiseless
  FactorKind factor_kind = FactorKind::gaussian;
  int trials = 1;
  std::vector<GridMethod> methods;
  std::uint64_t master_seed = 0;
  SolverParams solver;                   // method and seed are overwritten per cell
  double alpha = 1.0;                    // truths are rescaled to unit infinity norm
  double lower = 0.0;                    // 0 selects the default (= alpha)
  double upper = 0.0;                    // 0 selects the rank-based default bound

  void validate() const {
    shape.validate();
    if (ranks.empty()) throw std::invalid_argument("GridConfig: ranks must be nonempty");
    for (int r : ranks)
      if (r < 1) throw std::invalid_argument("GridConfig: every rank must be >= 1");
    if (sample_rates.empty())
      throw std::invalid_argument("GridConfig: sample_rates must be nonempty");
    const std::int64_t numel = shape.numel();
    for (double p : sample_rates) {
      if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("GridConfig: sample rates must lie in (0,1]");
      if (std::llround(p * static_cast<double>(numel)) < 5)
        throw std::invalid_argument(
            "GridConfig: a sample rate draws fewer than 5 entries at this shape");
    }
    if (trials < 1) throw std::invalid_argument("GridConfig: trials must be >= 1");
    if (methods.empty()) throw std::invalid_argument("GridConfig: methods must be nonempty");
    if (!(alpha > 0.0)) throw std::invalid_argument("GridConfig: alpha must be positive");
    if (lower < 0.0 || upper < 0.0)
      throw std::invalid_argument("GridConfig: bounds must be >= 0 (0 selects the default)");
    const double lo = lower > 0.0 ? lower : alpha;
    if (lo < alpha) throw std::invalid_argument("GridConfig: lower must be >= alpha");
    if (upper > 0.0 && upper < lo)
      throw std::invalid_argument("GridConfig: upper must be >= lower");
    solver.validate();
  }
};

struct GridRow {
  int d = 0;
  std::int64_t N = 0;  // largest mode length
  int rank = 0;
  double sample_rate = 0.0;
  std::optional<double> noise_db;
  GridMethod method = GridMethod::maxq_pqn;
  int trial = 0;  // 1-based
  double rel_err_sq = 0.0;
  double chosen_R = 0.0;
  double seconds = 0.0;
};

struct GridSummaryRow {
  int d = 0;
  std::int64_t N = 0;
  int rank = 0;
  double sample_rate = 0.0;
  std::optional<double> noise_db;
  GridMethod method = GridMethod::maxq_pqn;
  int trials = 0;
  double mean_rel_err_sq = 0.0;
  double mean_chosen_R = 0.0;
  double mean_seconds = 0.0;
};

struct NormConfig {
  std::vector<int> dims;            // tensor orders
  std::vector<std::int64_t> sizes;  // edge lengths; each cell uses a cubical shape
  std::vector<int> ranks;
  FactorKind factor_kind = FactorKind::sign;
  int trials = 1;
  std::uint64_t master_seed = 0;
  SolverParams solver;  // seed is overwritten per cell
  double lower = 0.5;   // safely below 1, the smallest possible norm at unit scale
  double upper = 0.0;   // 0 selects the per-cell rank-based bound plus slack

  void validate() const {
    if (dims.empty()) throw std::invalid_argument("NormConfig: dims must be nonempty");
    for (int d : dims)
      if (d < 2) throw std::invalid_argument("NormConfig: every order must be >= 2");
    if (sizes.empty()) throw std::invalid_argument("NormConfig: sizes must be nonempty");
    for (std::int64_t n : sizes)
      if (n < 1) throw std::invalid_argument("NormConfig: every size must be >= 1");
    if (ranks.empty()) throw std::invalid_argument("NormConfig: ranks must be nonempty");
    for (int r : ranks)
      if (r < 1) throw std::invalid_argument("NormConfig: every rank must be >= 1");
    if (trials < 1) throw std::invalid_argument("NormConfig: trials must be >= 1");
    if (!(lower > 0.0)) throw std::invalid_argument("NormConfig: lower must be positive");
    if (upper > 0.0 && !(upper > lower))
      throw std::invalid_argument("NormConfig: upper must exceed lower");
    solver.validate();
  }
};

struct NormRow {
  int d = 0;
  std::int64_t N = 0;
  int rank = 0;
  FactorKind factor_kind = FactorKind::sign;
  int trial = 0;  // 1-based
  double maxqnorm_est = 0.0;
};

namespace detail {

// index-sharded worker pool; any cell's exception is rethrown after the join
template <class Fn>
inline void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs < 1) throw std::invalid_argument("parallel_for: jobs must be >= 1");
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline double grid_default_upper(const GridConfig& cfg, int order) {
  const int rmax = *std::max_element(cfg.ranks.begin(), cfg.ranks.end());
  return max_qnorm_upper_bound(rmax, order, cfg.alpha);
}

}  // namespace detail

// Runs every (rank, sample_rate, method, trial) cell of the grid. All random
// streams hash the full cell tuple (with the sample rate entering through its
// bit pattern and the method through its stable id), so cells are completely
// independent of one another and of their position in the config lists:
// running any sub-grid reproduces exactly the matching rows.
inline std::vector<GridRow> run_grid(const GridConfig& cfg, int jobs = 1) {
  cfg.validate();
  struct Cell {
    int rank;
    double rate;
    GridMethod method;
    int trial;
  };
  std::vector<Cell> cells;
  cells.reserve(cfg.ranks.size() * cfg.sample_rates.size() * cfg.methods.size() *
                static_cast<std::size_t>(cfg.trials));
  for (int rank : cfg.ranks)
    for (double rate : cfg.sample_rates)
      for (GridMethod method : cfg.methods)
        for (int trial = 1; trial <= cfg.trials; ++trial)
          cells.push_back(Cell{rank, rate, method, trial});

  const int d = cfg.shape.order();
  const std::int64_t N = cfg.shape.max_dim();
  const std::int64_t numel = cfg.shape.numel();
  std::vector<GridRow> rows(cells.size());

  auto run_cell = [&](std::size_t ci) {
    const Cell& c = cells[ci];
    const std::int64_t rate_bits = std::bit_cast<std::int64_t>(c.rate);
    const std::int64_t mid = static_cast<std::int64_t>(c.method);
    const std::initializer_list<std::int64_t> cell = {c.rank, rate_bits, mid, c.trial};

    const LowRank truth =
        random_low_rank(cfg.shape, c.rank, cfg.factor_kind,
                        derive_seed(cfg.master_seed, "grid_truth", cell));
    const std::int64_t m = std::llround(c.rate * static_cast<double>(numel));
    SamplingDistribution dist;
    dist.shape = cfg.shape;
    const std::vector<Index> slots =
        draw_indices(dist, m, derive_seed(cfg.master_seed, "grid_sample", cell));
    const double sigma =
        cfg.noise_db ? noise_level_from_db(truth.tensor, *cfg.noise_db) : 0.0;
    const ObservationSet obs =
        observe(truth.tensor, slots, sigma, derive_seed(cfg.master_seed, "grid_noise", cell));

    SolverParams sp = cfg.solver;
    sp.method = solver_method_for(c.method);
    sp.seed = derive_seed(cfg.master_seed, "grid_solver", cell);

    const int order = c.method == GridMethod::matricized ? 2 : d;
    const double lower = cfg.lower > 0.0 ? cfg.lower : cfg.alpha;
    const double upper = cfg.upper > 0.0 ? cfg.upper : detail::grid_default_upper(cfg, order);

    const auto t0 = std::chrono::steady_clock::now();
    const CompletionResult res =
        c.method == GridMethod::matricized
            ? matricized_baseline(obs, cfg.shape, (d + 1) / 2, lower, upper, sp, cfg.alpha,
                                  &truth.tensor)
            : complete_with_cv(obs, cfg.shape, lower, upper, sp, cfg.alpha, &truth.tensor);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double rel = *res.relative_error;
    rows[ci] = GridRow{d, N, c.rank, c.rate, cfg.noise_db, c.method, c.trial,
                       rel * rel, res.chosen_R, seconds};
  };
  detail::parallel_for(cells.size(), jobs, run_cell);
  return rows;
}

// per-cell means over trials, in order of first appearance
inline std::vector<GridSummaryRow> summarize_grid(const std::vector<GridRow>& rows) {
  std::vector<GridSummaryRow> out;
  for (const GridRow& r : rows) {
    GridSummaryRow* s = nullptr;
    for (GridSummaryRow& cand : out)
      if (cand.d == r.d && cand.N == r.N && cand.rank == r.rank &&
          cand.sample_rate == r.sample_rate && cand.method == r.method) {
        s = &cand;
        break;
      }
    if (!s) {
      out.push_back(GridSummaryRow{r.d, r.N, r.rank, r.sample_rate, r.noise_db, r.method,
                                   0, 0.0, 0.0, 0.0});
      s = &out.back();
    }
    s->trials += 1;
    s->mean_rel_err_sq += r.rel_err_sq;
    s->mean_chosen_R += r.chosen_R;
    s->mean_seconds += r.seconds;
  }
  for (GridSummaryRow& s : out) {
    s.mean_rel_err_sq /= s.trials;
    s.mean_chosen_R /= s.trials;
    s.mean_seconds /= s.trials;
  }
  return out;
}

inline void write_grid_csv(const std::vector<GridRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_grid_csv: cannot open '" + path + "'");
  out << "d,N,rank,sample_rate,noise_db,method,trial,rel_err_sq,chosen_R,seconds\n";
  for (const GridRow& r : rows) {
    out << r.d << ',' << r.N << ',' << r.rank << ',' << detail::fmt_g17(r.sample_rate) << ','
        << (r.noise_db ? detail::fmt_g17(*r.noise_db) : std::string()) << ','
        << to_string(r.method) << ',' << r.trial << ',' << detail::fmt_g17(r.rel_err_sq) << ','
        << detail::fmt_g17(r.chosen_R) << ',' << detail::fmt_g17(r.seconds) << '\n';
  }
  if (!out) throw std::runtime_error("write_grid_csv: write to '" + path + "' failed");
}

inline void write_grid_summary_csv(const std::vector<GridSummaryRow>& rows,
                                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_grid_summary_csv: cannot open '" + path + "'");
  out << "d,N,rank,sample_rate,noise_db,method,trials,mean_rel_err_sq,mean_chosen_R,"
         "mean_seconds\n";
  for (const GridSummaryRow& r : rows) {
    out << r.d << ',' << r.N << ',' << r.rank << ',' << detail::fmt_g17(r.sample_rate) << ','
        << (r.noise_db ? detail::fmt_g17(*r.noise_db) : std::string()) << ','
        << to_string(r.method) << ',' << r.trials << ',' << detail::fmt_g17(r.mean_rel_err_sq)
        << ',' << detail::fmt_g17(r.mean_chosen_R) << ',' << detail::fmt_g17(r.mean_seconds)
        << '\n';
  }
  if (!out)
    throw std::runtime_error("write_grid_summary_csv: write to '" + path + "' failed");
}

// companion summary file: inserts "_summary" before the extension
inline std::string summary_path_for(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "_summary";
  return path.substr(0, dot) + "_summary" + path.substr(dot);
}

// Estimates the max-qnorm of one random low-rank tensor per (order, size,
// rank, trial) cell. Seeds hash the cell values, so sub-grids reproduce the
// matching rows here as well.
inline std::vector<NormRow> run_norm_experiment(const NormConfig& cfg, int jobs = 1) {
  cfg.validate();
  struct Cell {
    int d;
    std::int64_t N;
    int rank;
    int trial;
  };
  std::vector<Cell> cells;
  cells.reserve(cfg.dims.size() * cfg.sizes.size() * cfg.ranks.size() *
                static_cast<std::size_t>(cfg.trials));
  for (int d : cfg.dims)
    for (std::int64_t N : cfg.sizes)
      for (int rank : cfg.ranks)
        for (int trial = 1; trial <= cfg.trials; ++trial)
          cells.push_back(Cell{d, N, rank, trial});

  std::vector<NormRow> rows(cells.size());
  auto run_cell = [&](std::size_t ci) {
    const Cell& c = cells[ci];
    const std::initializer_list<std::int64_t> cell = {c.d, c.N, c.rank, c.trial};
    const Shape shape(std::vector<std::int64_t>(static_cast<std::size_t>(c.d), c.N));
    const LowRank truth = random_low_rank(shape, c.rank, cfg.factor_kind,
                                          derive_seed(cfg.master_seed, "norm_truth", cell));
    SolverParams sp = cfg.solver;
    sp.seed = derive_seed(cfg.master_seed, "norm_solver", cell);
    // the proven bound for a rank-r tensor at unit infinity norm, plus slack
    // so the bisection can certify values sitting exactly on the bound
    const double upper =
        cfg.upper > 0.0 ? cfg.upper : max_qnorm_upper_bound(c.rank, c.d, 1.0) + 1.0;
    const EstimateResult est = estimate_max_qnorm(truth.tensor, cfg.lower, upper, sp);
    rows[ci] = NormRow{c.d, c.N, c.rank, cfg.factor_kind, c.trial, est.estimate};
  };
  detail::parallel_for(cells.size(), jobs, run_cell);
  return rows;
}

inline void write_norm_csv(const std::vector<NormRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_norm_csv: cannot open '" + path + "'");
  out << "d,N,rank,factor_kind,trial,maxqnorm_est\n";
  for (const NormRow& r : rows)
    out << r.d << ',' << r.N << ',' << r.rank << ',' << to_string(r.factor_kind) << ','
        << r.trial << ',' << detail::fmt_g17(r.maxqnorm_est) << '\n';
  if (!out) throw std::runtime_error("write_norm_csv: write to '" + path + "' failed");
}

namespace detail {

inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional, const char* what) {
  if (!j.is_object())
    throw std::invalid_argument(std::string(what) + ": expected a JSON object");
  for (const char* key : required)
    if (!j.contains(key))
      throw std::invalid_argument(std::string(what) + ": missing key '" + key + "'");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    bool known = false;
    for (const char* key : required) known = known || k == key;
    for (const char* key : optional) known = known || k == key;
    if (!known)
      throw std::invalid_argument(std::string(what) + ": unknown key '" + k + "'");
  }
}

// method is fixed per grid cell and seeds are always derived, so neither is
// accepted as an override unless the runner says otherwise
inline void apply_solver_overrides(SolverParams& p, const nlohmann::json& j, bool allow_method,
                                   const char* what) {
  if (!j.is_object())
    throw std::invalid_argument(std::string(what) + ": solver overrides must be an object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    const nlohmann::json& v = item.value();
    if (k == "method") {
      if (!allow_method)
        throw std::invalid_argument(std::string(what) +
                                    ": solver method is selected by the methods list");
      p.method = method_from_string(v.get<std::string>());
    } else if (k == "max_iters") {
      p.max_iters = v.get<int>();
    } else if (k == "step_init") {
      p.step_init = v.get<double>();
    } else if (k == "armijo_c") {
      p.armijo_c = v.get<double>();
    } else if (k == "armijo_shrink") {
      p.armijo_shrink = v.get<double>();
    } else if (k == "tol_rel_loss") {
      p.tol_rel_loss = v.get<double>();
    } else if (k == "batch_size") {
      p.batch_size = v.get<int>();
    } else if (k == "lbfgs_memory") {
      p.lbfgs_memory = v.get<int>();
    } else {
      throw std::invalid_argument(std::string(what) + ": unknown solver key '" + k + "'");
    }
  }
}

}  // namespace detail

inline GridConfig grid_config_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"shape", "ranks", "sample_rates", "factor_kind", "trials", "methods"},
                       {"noise_db", "master_seed", "solver", "alpha", "lower", "upper"},
                       "grid config");
  GridConfig cfg;
  cfg.shape = Shape(j.at("shape").get<std::vector<std::int64_t>>());
  cfg.ranks = j.at("ranks").get<std::vector<int>>();
  cfg.sample_rates = j.at("sample_rates").get<std::vector<double>>();
  if (j.contains("noise_db") && !j.at("noise_db").is_null())
    cfg.noise_db = j.at("noise_db").get<double>();
  cfg.factor_kind = factor_kind_from_string(j.at("factor_kind").get<std::string>());
  cfg.trials = j.at("trials").get<int>();
  for (const auto& m : j.at("methods"))
    cfg.methods.push_back(grid_method_from_string(m.get<std::string>()));
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("solver"))
    detail::apply_solver_overrides(cfg.solver, j.at("solver"), false, "grid config");
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("lower")) cfg.lower = j.at("lower").get<double>();
  if (j.contains("upper")) cfg.upper = j.at("upper").get<double>();
  cfg.validate();
  return cfg;
}

inline NormConfig norm_config_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"dims", "sizes", "ranks", "factor_kind", "trials"},
                       {"master_seed", "solver", "lower", "upper"}, "norm config");
  NormConfig cfg;
  cfg.dims = j.at("dims").get<std::vector<int>>();
  cfg.sizes = j.at("sizes").get<std::vector<std::int64_t>>();
  cfg.ranks = j.at("ranks").get<std::vector<int>>();
  cfg.factor_kind = factor_kind_from_string(j.at("factor_kind").get<std::string>());
  cfg.trials = j.at("trials").get<int>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("solver"))
    detail::apply_solver_overrides(cfg.solver, j.at("solver"), true, "norm config");
  if (j.contains("lower")) cfg.lower = j.at("lower").get<double>();
  if (j.contains("upper")) cfg.upper = j.at("upper").get<double>();
  cfg.validate();
  return cfg;
}

namespace detail {

inline nlohmann::json parse_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(what) + ": cannot open '" + path + "'");
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + path + ": " + e.what());
  }
}

}  // namespace detail

inline GridConfig load_grid_config(const std::string& path) {
  return grid_config_from_json(detail::parse_json_file(path, "grid config"));
}

inline NormConfig load_norm_config(const std::string& path) {
  return norm_config_from_json(detail::parse_json_file(path, "norm config"));
}

}  // namespace maxq
