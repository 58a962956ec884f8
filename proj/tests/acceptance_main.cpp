// Acceptance gate: one binary, eight numbered checks, one [PASS]/[FAIL] line
// each, nonzero exit when anything fails. The checks exercise the exact desk
// scales and tolerances the library is signed off at:
//   1. exact atomic-norm oracle properties (unit atoms, homogeneity,
//      triangle, rank-r sandwich, duality with the (inf,1) norm)
//   2. quasi-triangle bound for concatenated factorizations and the
//      two-spike fixture whose estimate must exceed its atomic norm
//   3. analytic gradients against central finite differences
//   4. bisection estimates of sign-factor tensors tracking sqrt(r) (d=3)
//      and r (d=4) across sizes
//   5. cross-validated recovery: threshold cells, sample-rate and rank
//      monotonicity with genuine margins, and a 10 dB noise floor
//   6. the order-2 matricized baseline losing to the tensor method
//   7. byte-identical CLI grid reruns (seconds column excluded)
//   8. feasibility of every audited final iterate from suites 3-6
#include <sys/wait.h>

#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "maxq/completion.hpp"
#include "maxq/experiments.hpp"
#include "maxq/oracle.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int number, const std::string& name, const Outcome& o, double secs) {
  std::printf("[%s] %d. %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", number, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Records the per-factor feasibility of final iterates handed back by the
// solver-driven procedures: a run at budget R must keep every factor's
// largest row norm within R^(1/order).
struct FeasibilityAudit {
  long runs = 0;
  double worst = -std::numeric_limits<double>::infinity();

  void add(const maxq::CPFactors& F, double budget) {
    if (F.U.empty() || !(budget > 0.0)) return;
    const double cap = std::pow(budget, 1.0 / F.order());
    double v = -std::numeric_limits<double>::infinity();
    for (const maxq::Matrix& U : F.U) v = std::max(v, maxq::two_inf_norm(U) - cap);
    worst = std::max(worst, v);
    ++runs;
  }
};

maxq::DenseTensor random_dense(const maxq::Shape& shape, std::uint64_t seed) {
  maxq::Rng rng = maxq::make_rng(seed, "acc_dense");
  std::normal_distribution<double> gauss(0.0, 1.0);
  maxq::DenseTensor T{shape};
  for (double& v : T.values) v = gauss(rng);
  return T;
}

maxq::CPFactors random_factors(const maxq::Shape& shape, int k, std::uint64_t seed) {
  maxq::Rng rng = maxq::make_rng(seed, "acc_factors");
  std::normal_distribution<double> gauss(0.0, 1.0);
  maxq::CPFactors F;
  for (std::int64_t n : shape.dims) {
    maxq::Matrix U(n, k);
    for (std::int64_t i = 0; i < n; ++i)
      for (int c = 0; c < k; ++c) U(i, c) = gauss(rng);
    F.U.push_back(std::move(U));
  }
  return F;
}

// the two-spike tensor: atomic norm exactly 2, best factorization 2*sqrt(2)
maxq::DenseTensor spike_tensor() {
  maxq::DenseTensor T{maxq::Shape({2, 2, 2}), 1.0};
  T.values[0] = 2.0;
  return T;
}

// ---------------------------------------------------------------------------
// 1. exact oracle properties on 2x2x2 tensors
Outcome check_oracle() {
  const maxq::Shape shape({2, 2, 2});
  const maxq::AtomBasis basis = maxq::enumerate_atoms(shape);

  double atom_dev = 0.0;
  for (const maxq::DenseTensor& atom : basis.atoms)
    atom_dev = std::max(atom_dev, std::abs(maxq::m_norm_exact(atom, basis).value - 1.0));

  double homo_dev = 0.0, tri_excess = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const maxq::DenseTensor A = random_dense(shape, 1000 + i);
    const maxq::DenseTensor B = random_dense(shape, 2000 + i);
    const double ma = maxq::m_norm_exact(A, basis).value;
    const double mb = maxq::m_norm_exact(B, basis).value;

    const double c = -3.0 + 0.061 * static_cast<double>(i);  // spans [-3, 3.04)
    maxq::DenseTensor scaled = A;
    for (double& v : scaled.values) v *= c;
    homo_dev = std::max(homo_dev,
                        std::abs(maxq::m_norm_exact(scaled, basis).value - std::abs(c) * ma));

    maxq::DenseTensor sum = A;
    for (std::size_t j = 0; j < sum.values.size(); ++j) sum.values[j] += B.values[j];
    tri_excess = std::max(tri_excess, maxq::m_norm_exact(sum, basis).value - (ma + mb));
  }

  bool sandwich_ok = true;
  double sandwich_lo = std::numeric_limits<double>::infinity();
  double sandwich_hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const int r = i % 3 + 1;
    const maxq::LowRank t =
        maxq::random_low_rank(shape, r, maxq::FactorKind::gaussian, 3000 + static_cast<std::uint64_t>(i));
    const double m = maxq::m_norm_exact(t.tensor, basis).value;
    const double hi = maxq::m_norm_upper_bound(r, 3, 1.0);
    sandwich_lo = std::min(sandwich_lo, m);
    sandwich_hi = std::max(sandwich_hi, m - hi);
    sandwich_ok = sandwich_ok && m >= 1.0 - 1e-8 && m <= hi + 1e-6;
  }

  double dual_dev = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const maxq::DenseTensor T = random_dense(shape, 4000 + i);
    double best = 0.0;
    for (const maxq::DenseTensor& atom : basis.atoms)
      best = std::max(best, maxq::inner(T, atom));
    dual_dev = std::max(dual_dev, std::abs(best - maxq::inf_one_norm_bruteforce(T)));
  }

  Outcome o;
  o.pass = atom_dev <= 1e-8 && homo_dev <= 1e-8 && tri_excess <= 1e-8 && sandwich_ok &&
           dual_dev <= 1e-10;
  o.detail = "atom_dev=" + fmt(atom_dev) + " homo_dev=" + fmt(homo_dev) +
             " tri_excess=" + fmt(tri_excess) + " sandwich_min=" + fmt(sandwich_lo) +
             " sandwich_over=" + fmt(sandwich_hi) + " dual_dev=" + fmt(dual_dev);
  return o;
}

// ---------------------------------------------------------------------------
// 2. quasi-triangle bound for concatenations; fixture estimate bracket
Outcome check_quasi_norm() {
  double excess = -std::numeric_limits<double>::infinity();
  for (int d : {3, 4}) {
    const maxq::Shape shape(std::vector<std::int64_t>(static_cast<std::size_t>(d), 3));
    for (std::uint64_t i = 0; i < 50; ++i) {
      const maxq::CPFactors A =
          maxq::balance_factors(random_factors(shape, 2, 5000 + 100 * static_cast<std::uint64_t>(d) + i));
      const maxq::CPFactors B =
          maxq::balance_factors(random_factors(shape, 2, 6000 + 100 * static_cast<std::uint64_t>(d) + i));
      const double lhs = maxq::max_qnorm_value(maxq::concat_factorizations(A, B));
      const double rhs = std::pow(2.0, static_cast<double>(d) / 2.0 - 1.0) *
                         (maxq::max_qnorm_value(A) + maxq::max_qnorm_value(B));
      excess = std::max(excess, lhs - rhs);
    }
  }

  maxq::SolverParams sp;
  sp.seed = 17;
  const maxq::EstimateResult est = maxq::estimate_max_qnorm(spike_tensor(), 1.0, 4.0, sp);

  Outcome o;
  o.pass = excess <= 1e-10 && est.estimate > 2.05 && est.estimate <= 2.0 * std::sqrt(2.0) + 0.1;
  o.detail = "concat_excess=" + fmt(excess) + " fixture_estimate=" + fmt(est.estimate);
  return o;
}

// ---------------------------------------------------------------------------
// 3. gradients vs central finite differences on 50 random instances
Outcome check_gradients() {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t seed = 7000 + static_cast<std::uint64_t>(i);
    maxq::Rng rng = maxq::make_rng(seed, "acc_fd");
    const int d = i % 2 == 0 ? 3 : 4;
    std::vector<std::int64_t> dims;
    std::uniform_int_distribution<std::int64_t> dim_pick(2, 6);
    for (int j = 0; j < d; ++j) dims.push_back(dim_pick(rng));
    const maxq::Shape shape(dims);
    std::uniform_int_distribution<int> k_pick(1, 4);
    const int k = k_pick(rng);

    maxq::SamplingDistribution dist;
    dist.shape = shape;
    const std::int64_t m = std::max<std::int64_t>(shape.numel() / 2, 5);
    const std::vector<maxq::Index> slots = maxq::draw_indices(dist, m, seed + 10000);
    const maxq::DenseTensor T = random_dense(shape, seed + 20000);
    const maxq::ObservationSet obs = maxq::observe(T, slots, 0.0, 1);
    maxq::CPFactors F = random_factors(shape, k, seed + 30000);

    const double h = 1e-6;
    for (int mode = 1; mode <= d; ++mode) {
      const maxq::Matrix G = maxq::loss_gradient(F, obs, mode);
      maxq::Matrix& U = F.U[static_cast<std::size_t>(mode - 1)];
      for (Eigen::Index r = 0; r < U.rows(); ++r) {
        for (Eigen::Index c = 0; c < U.cols(); ++c) {
          const double base = U(r, c);
          U(r, c) = base + h;
          const double fp = maxq::loss(F, obs);
          U(r, c) = base - h;
          const double fm = maxq::loss(F, obs);
          U(r, c) = base;
          const double fd = (fp - fm) / (2.0 * h);
          worst = std::max(worst, std::abs(G(r, c) - fd) / std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
  Outcome o;
  o.pass = worst <= 1e-5;
  o.detail = "max_rel_dev=" + fmt(worst);
  return o;
}

// ---------------------------------------------------------------------------
// 4. bisection estimates track sqrt(r) at d=3 and r at d=4
Outcome check_estimates(FeasibilityAudit& feas) {
  const std::uint64_t master = 41;
  const int trials = 15;

  auto cell_mean = [&](int d, std::int64_t N, int rank) {
    const maxq::Shape shape(std::vector<std::int64_t>(static_cast<std::size_t>(d), N));
    double mean = 0.0;
    for (int trial = 1; trial <= trials; ++trial) {
      const std::initializer_list<std::int64_t> cell = {d, N, rank, trial};
      const maxq::LowRank truth = maxq::random_low_rank(
          shape, rank, maxq::FactorKind::sign, maxq::derive_seed(master, "c4_truth", cell));
      maxq::SolverParams sp;
      sp.seed = maxq::derive_seed(master, "c4_solver", cell);
      const double upper = maxq::max_qnorm_upper_bound(rank, d, 1.0) + 1.0;
      const maxq::EstimateResult est = maxq::estimate_max_qnorm(truth.tensor, 0.5, upper, sp);
      feas.add(est.last_factors, est.last_budget);
      mean += est.estimate / trials;
    }
    return mean;
  };

  bool pass = true;
  std::string detail;
  std::array<std::array<double, 5>, 2> d3{};  // [size index][rank-1]
  const std::array<std::int64_t, 2> sizes = {5, 10};
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    for (int r = 1; r <= 5; ++r) {
      const double mean = cell_mean(3, sizes[si], r);
      d3[si][static_cast<std::size_t>(r - 1)] = mean;
      const double target = std::sqrt(static_cast<double>(r));
      pass = pass && std::abs(mean - target) <= 0.25 * target;
    }
  }
  detail += "d3_N5=[";
  for (int r = 0; r < 5; ++r) detail += (r ? " " : "") + fmt(d3[0][static_cast<std::size_t>(r)]);
  detail += "] d3_N10=[";
  for (int r = 0; r < 5; ++r) detail += (r ? " " : "") + fmt(d3[1][static_cast<std::size_t>(r)]);
  detail += "]";
  for (int r = 0; r < 5; ++r) {
    const double a = d3[0][static_cast<std::size_t>(r)];
    const double b = d3[1][static_cast<std::size_t>(r)];
    pass = pass && a <= 1.2 * b && b <= 1.2 * a;
  }

  detail += " d4_N5=[";
  for (int r = 1; r <= 4; ++r) {
    const double mean = cell_mean(4, 5, r);
    detail += (r > 1 ? " " : "") + fmt(mean);
    pass = pass && std::abs(mean - static_cast<double>(r)) <= 0.25 * static_cast<double>(r);
  }
  detail += "]";

  Outcome o;
  o.pass = pass;
  o.detail = detail;
  return o;
}

// ---------------------------------------------------------------------------
// 5/6. recovery grid shared state
struct RecoveryResults {
  double r2_p05 = 0.0, r2_p10 = 0.0;
  double r5_p05 = 0.0, r5_p30 = 0.0;
  double noisy_r2_p10 = 0.0, noise_floor = 0.0;
};

constexpr std::uint64_t kRecoveryMaster = 77;
constexpr int kRecoveryIters = 300;
constexpr int kRecoveryTrials = 5;

// budget bracket per true rank: the brackets are inputs in practice (the
// truth's norm scale is assumed known), and a bracket whose early candidates
// straddle the truth keeps the five-point search from certifying oversized
// budgets whose overfit models win validation by accident
double upper_for(int rank) { return rank == 2 ? 3.0 : 6.0; }

maxq::LowRank recovery_truth(int rank, double rate, int trial, const char* tag) {
  const maxq::Shape shape({20, 20, 20});
  const std::int64_t bits = std::bit_cast<std::int64_t>(rate);
  return maxq::random_low_rank(shape, rank, maxq::FactorKind::sign,
                               maxq::derive_seed(kRecoveryMaster, tag, {rank, bits, trial}));
}

maxq::ObservationSet recovery_sample(const maxq::DenseTensor& truth, int rank, double rate,
                                     int trial, const char* tag, double sigma,
                                     std::uint64_t noise_seed) {
  maxq::SamplingDistribution dist;
  dist.shape = truth.shape;
  const std::int64_t bits = std::bit_cast<std::int64_t>(rate);
  const std::vector<maxq::Index> slots =
      maxq::draw_indices(dist, std::llround(rate * 8000.0),
                         maxq::derive_seed(kRecoveryMaster, tag, {rank, bits, trial}));
  return maxq::observe(truth, slots, sigma, noise_seed);
}

maxq::SolverParams recovery_params(int rank, double rate, int trial, const char* tag) {
  maxq::SolverParams sp;
  sp.method = maxq::Method::pqn;
  sp.max_iters = kRecoveryIters;
  const std::int64_t bits = std::bit_cast<std::int64_t>(rate);
  sp.seed = maxq::derive_seed(kRecoveryMaster, tag, {rank, bits, trial});
  return sp;
}

Outcome check_recovery(FeasibilityAudit& feas) {
  const auto started = Clock::now();
  RecoveryResults res;

  // noiseless cells: a ragged grid whose neighbours all sit on opposite
  // sides of the method's recovery transition, so every ordering below is a
  // signal comparison rather than solver-noise jitter. Cells where both
  // ranks recover exactly (rank 2 at 30%, or comparing the two ranks at
  // 10%) are deliberately absent: orderings between convergence floors are
  // coin flips, not trends.
  struct Cell {
    int rank;
    double rate;
    double* slot;
  };
  const std::vector<Cell> cells = {{2, 0.05, &res.r2_p05},
                                   {2, 0.10, &res.r2_p10},
                                   {5, 0.05, &res.r5_p05},
                                   {5, 0.30, &res.r5_p30}};
  for (const Cell& c : cells) {
    double mean = 0.0;
    for (int trial = 1; trial <= kRecoveryTrials; ++trial) {
      const maxq::LowRank truth = recovery_truth(c.rank, c.rate, trial, "c5_truth");
      const maxq::ObservationSet obs =
          recovery_sample(truth.tensor, c.rank, c.rate, trial, "c5_sample", 0.0, 1);
      const maxq::SolverParams sp = recovery_params(c.rank, c.rate, trial, "c5_solver");
      const maxq::CompletionResult r = maxq::complete_with_cv(
          obs, truth.tensor.shape, 1.0, upper_for(c.rank), sp, 1.0, &truth.tensor);
      feas.add(r.factors, r.chosen_R);
      mean += (*r.relative_error) * (*r.relative_error) / kRecoveryTrials;
    }
    *c.slot = mean;
  }

  // noisy cell: rank 2 at 10% with observations at 10 dB SNR
  {
    double mean = 0.0, floor = 0.0;
    for (int trial = 1; trial <= kRecoveryTrials; ++trial) {
      const maxq::LowRank truth = recovery_truth(2, 0.10, trial, "c5_noise_truth");
      const double sigma = maxq::noise_level_from_db(truth.tensor, 10.0);
      double meansq = 0.0;
      for (double v : truth.tensor.values) meansq += v * v;
      meansq /= static_cast<double>(truth.tensor.values.size());
      floor += sigma * sigma / meansq / kRecoveryTrials;
      const maxq::ObservationSet obs = recovery_sample(
          truth.tensor, 2, 0.10, trial, "c5_noise_sample", sigma,
          maxq::derive_seed(kRecoveryMaster, "c5_noise", {trial}));
      const maxq::SolverParams sp = recovery_params(2, 0.10, trial, "c5_noise_solver");
      const maxq::CompletionResult r = maxq::complete_with_cv(
          obs, truth.tensor.shape, 1.0, upper_for(2), sp, 1.0, &truth.tensor);
      feas.add(r.factors, r.chosen_R);
      mean += (*r.relative_error) * (*r.relative_error) / kRecoveryTrials;
    }
    res.noisy_r2_p10 = mean;
    res.noise_floor = floor;
  }

  const double secs = seconds_since(started);
  const bool thresholds = res.r2_p10 <= 1e-2 && res.r5_p30 <= 1e-2;
  const bool rate_monotone = res.r2_p05 > res.r2_p10 && res.r5_p05 > res.r5_p30;
  const bool rank_monotone = res.r2_p05 < res.r5_p05;
  const bool noise_ok = res.noisy_r2_p10 <= 5.0 * res.noise_floor;
  const bool in_time = secs < 1800.0;

  Outcome o;
  o.pass = thresholds && rate_monotone && rank_monotone && noise_ok && in_time;
  o.detail = "r2=[" + fmt(res.r2_p05) + " " + fmt(res.r2_p10) + "] r5=[" + fmt(res.r5_p05) +
             " " + fmt(res.r5_p30) + "] noisy=" + fmt(res.noisy_r2_p10) +
             " floor5x=" + fmt(5.0 * res.noise_floor);
  return o;
}

// ---------------------------------------------------------------------------
// 6. matricized baseline at rank 5 / 10% against the tensor method, paired:
// both sides see the same truths and the same observed entries
Outcome check_matricized(FeasibilityAudit& feas) {
  double tensor_mean = 0.0, matricized_mean = 0.0;
  for (int trial = 1; trial <= kRecoveryTrials; ++trial) {
    const maxq::LowRank truth = recovery_truth(5, 0.10, trial, "c5_truth");
    const maxq::ObservationSet obs =
        recovery_sample(truth.tensor, 5, 0.10, trial, "c5_sample", 0.0, 1);
    {
      const maxq::SolverParams sp = recovery_params(5, 0.10, trial, "c5_solver");
      const maxq::CompletionResult r = maxq::complete_with_cv(
          obs, truth.tensor.shape, 1.0, upper_for(5), sp, 1.0, &truth.tensor);
      feas.add(r.factors, r.chosen_R);
      tensor_mean += (*r.relative_error) * (*r.relative_error) / kRecoveryTrials;
    }
    {
      const maxq::SolverParams sp = recovery_params(5, 0.10, trial, "c6_solver");
      const maxq::CompletionResult r = maxq::matricized_baseline(
          obs, truth.tensor.shape, 2, 1.0, upper_for(5), sp, 1.0, &truth.tensor);
      feas.add(r.factors, r.chosen_R);
      matricized_mean += (*r.relative_error) * (*r.relative_error) / kRecoveryTrials;
    }
  }
  Outcome o;
  o.pass = matricized_mean > tensor_mean;
  o.detail = "matricized=" + fmt(matricized_mean) + " tensor=" + fmt(tensor_mean);
  return o;
}

// ---------------------------------------------------------------------------
// 7. CLI grid reruns are byte-identical once seconds are stripped
std::string strip_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) {
      const std::size_t cut = line.rfind(',');
      if (cut != std::string::npos) line.resize(cut);
    }
    first = false;
    out += line;
    out += '\n';
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome check_cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "maxq_acceptance_grid";
  fs::create_directories(dir);
  const std::string config = (dir / "grid.json").string();
  {
    std::ofstream out(config);
    out << R"({
  "shape": [4, 4, 4],
  "ranks": [1, 2],
  "sample_rates": [0.5],
  "factor_kind": "sign",
  "trials": 2,
  "methods": ["maxq_pqn", "matricized"],
  "master_seed": 99,
  "solver": {"max_iters": 60}
})";
  }

  auto run_once = [&](const std::string& out_csv) {
    const std::string log = (dir / "cli_log").string();
    const std::string cmd = std::string("'") + MAXQ_CLI_PATH + "' grid --config '" + config +
                            "' --out '" + out_csv + "' > '" + log + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };

  const std::string first = (dir / "a.csv").string();
  const std::string second = (dir / "b.csv").string();
  Outcome o;
  if (!run_once(first) || !run_once(second)) {
    o.detail = "cli grid run failed";
    return o;
  }
  const std::string a = strip_seconds(slurp(first));
  const std::string b = strip_seconds(slurp(second));
  o.pass = !a.empty() && a == b;
  o.detail = o.pass ? "identical (" + std::to_string(a.size()) + " bytes compared)"
                    : "reruns differ";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  FeasibilityAudit feas;

  auto run = [&](int number, const std::string& name, auto&& body, double limit_secs) {
    const auto started = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(started);
    if (limit_secs > 0.0 && secs >= limit_secs) {
      o.pass = false;
      o.detail += " [over " + fmt(limit_secs) + "s budget]";
    }
    report(number, name, o, secs);
    if (!o.pass) ++failures;
  };

  run(1, "atomic-norm oracle", [] { return check_oracle(); }, 60.0);
  run(2, "quasi-norm mechanics", [] { return check_quasi_norm(); }, 0.0);
  run(3, "gradient correctness", [] { return check_gradients(); }, 60.0);
  run(4, "norm estimate scaling", [&] { return check_estimates(feas); }, 900.0);
  run(5, "recovery trends", [&] { return check_recovery(feas); }, 1800.0);
  run(6, "matricized comparison", [&] { return check_matricized(feas); }, 0.0);
  run(7, "grid determinism", [] { return check_cli_determinism(); }, 0.0);

  {
    const auto started = Clock::now();
    Outcome o;
    o.pass = feas.runs > 0 && feas.worst <= 1e-12;
    o.detail = "runs=" + std::to_string(feas.runs) + " worst_violation=" + fmt(feas.worst);
    report(8, "feasibility invariant", o, seconds_since(started));
    if (!o.pass) ++failures;
  }

  return failures == 0 ? 0 : 1;
}
