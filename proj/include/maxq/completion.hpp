#pragma once
// Top-level procedures: bisection estimation of a tensor's max-qnorm from
// full observations, tensor completion with a cross-validated five-point
// search over the norm budget, and a matricized baseline that runs the same
// pipeline on a balanced unfolding.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "maxq/norms.hpp"
#include "maxq/observation.hpp"
#include "maxq/rng.hpp"
#include "maxq/solvers.hpp"
#include "maxq/tensor.hpp"

namespace maxq {

inline double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rmse: length mismatch");
  if (a.empty()) throw std::invalid_argument("rmse: need at least one element");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return std::sqrt(total / static_cast<double>(a.size()));
}

namespace detail {

// one bisection/search sweep runs ceil(log2(upper - lower)) + 6 iterations,
// halving the interval each time; the width is measured after the internal
// normalization so the procedures are exactly scale-equivariant
inline int refinement_iterations(double lower, double upper) {
  if (!(upper > lower)) return 1;
  const int it = static_cast<int>(std::ceil(std::log2(upper - lower))) + 6;
  return std::max(it, 1);
}

inline ObservationSet full_observation(const DenseTensor& T, double scale) {
  ObservationSet obs;
  obs.shape = T.shape;
  const std::int64_t n = T.shape.numel();
  obs.indices.reserve(static_cast<std::size_t>(n));
  obs.values.reserve(static_cast<std::size_t>(n));
  Index ix(T.shape.order(), 1);
  for (std::int64_t off = 0; off < n; ++off) {
    obs.indices.push_back(ix);
    obs.values.push_back(T.values[static_cast<std::size_t>(off)] / scale);
    next_index(T.shape, ix);
  }
  return obs;
}

}  // namespace detail

struct EstimateResult {
  double estimate = 0.0;
  double resolution = 0.0;  // (upper - lower) / 2^iterations
  CPFactors last_factors;   // final iterate of the last midpoint solve that ran
  double last_budget = 0.0;  // that solve's budget; 0 when every solve failed
};

// Bisection estimate of the max-qnorm: each iteration solves the FULLY
// observed budget-constrained problem at the interval midpoint and calls the
// midpoint feasible when the fit's RMSE is at most 1e-3. Success moves the
// upper end down, failure (including a solver error) moves the lower end up.
// Solves are warm-started from the previous iteration's factors. The tensor
// is rescaled to unit infinity norm internally (the RMSE threshold assumes
// that scale) and the estimate is scaled back.
inline EstimateResult estimate_max_qnorm(const DenseTensor& T, double lower, double upper,
                                         const SolverParams& solver, Eigen::Index width = 0) {
  T.validate();
  if (!(lower > 0.0) || !(lower < upper))
    throw std::invalid_argument("estimate_max_qnorm: need 0 < lower < upper");
  if (width < 0)
    throw std::invalid_argument("estimate_max_qnorm: width must be >= 0 (0 selects the default)");

  const double inf = infinity_norm(T);
  const double scale = inf > 0.0 ? inf : 1.0;
  const ObservationSet obs = detail::full_observation(T, scale);
  const Eigen::Index k = width > 0 ? width : 2 * static_cast<Eigen::Index>(T.shape.max_dim());

  double lo = lower / scale;
  double hi = upper / scale;
  const int iters = detail::refinement_iterations(lo, hi);
  std::optional<CPFactors> warm;
  EstimateResult result;
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    bool ok = false;
    try {
      const QnormBound bound(mid, std::min(mid, 1.0), T.shape.order());
      SolverState st = solve(obs, T.shape, bound, k, solver, warm);
      warm = std::move(st.factors);
      result.last_factors = *warm;
      result.last_budget = mid;
      ok = std::sqrt(st.loss) <= 1e-3;
    } catch (const std::exception&) {
      ok = false;  // a failed solve means the budget could not be certified
    }
    (ok ? hi : lo) = mid;
  }
  result.estimate = scale * 0.5 * (lo + hi);
  result.resolution = (upper - lower) / std::pow(2.0, static_cast<double>(iters));
  if (result.last_budget > 0.0) {
    const double fscale = std::pow(scale, 1.0 / T.shape.order());
    for (Matrix& U : result.last_factors.U) U *= fscale;
    result.last_budget *= scale;
  }
  return result;
}

struct CompletionResult {
  DenseTensor recovered;
  CPFactors factors;  // factors of the winning solve (order 2 for the matricized baseline)
  double chosen_R = 0.0;
  double validation_rmse = 0.0;
  std::optional<double> relative_error;  // Frobenius ratio, set when ground truth is supplied
  SolverState solver_diag;
  std::vector<std::pair<double, double>> bounds_trace;  // interval used per outer iteration
};

namespace detail {

inline std::vector<double> predict_at(const CPFactors& F, const std::vector<Index>& indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (const Index& ix : indices) out.push_back(compose_at(F, ix));
  return out;
}

inline double relative_frobenius_error(const DenseTensor& got, const DenseTensor& truth) {
  if (got.shape != truth.shape)
    throw std::invalid_argument("relative error: shape mismatch with ground truth");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    const double d = got.values[i] - truth.values[i];
    num += d * d;
    den += truth.values[i] * truth.values[i];
  }
  if (den == 0.0) throw std::invalid_argument("relative error: ground truth is zero");
  return std::sqrt(num / den);
}

}  // namespace detail

// Completion with a cross-validated budget search: the observations are
// split 80/20 into train/validate, and each outer iteration solves the
// train problem at five equispaced budget candidates spanning the current
// interval, scores each by validation RMSE, and re-centers the interval
// around the winner (ties prefer the smaller budget). The recovery with the
// best validation score over all solves is returned. Observed values are
// normalized by their largest magnitude internally so the procedure is
// scale-equivariant; every output is scaled back.
inline CompletionResult complete_with_cv(const ObservationSet& obs, const Shape& shape,
                                         double lower, double upper, const SolverParams& solver,
                                         double alpha, const DenseTensor* truth = nullptr,
                                         Eigen::Index width = 0) {
  shape.validate();
  obs.validate();
  solver.validate();
  if (obs.shape != shape) throw std::invalid_argument("complete_with_cv: observation shape mismatch");
  if (obs.size() < 5) throw std::invalid_argument("complete_with_cv: need at least 5 observations");
  if (!(lower > 0.0)) throw std::invalid_argument("complete_with_cv: lower must be positive");
  if (!(upper >= lower)) throw std::invalid_argument("complete_with_cv: upper must be >= lower");
  if (!(alpha > 0.0) || alpha > lower)
    throw std::invalid_argument("complete_with_cv: need 0 < alpha <= lower");
  if (width < 0)
    throw std::invalid_argument("complete_with_cv: width must be >= 0 (0 selects the default)");
  if (truth && truth->shape != shape)
    throw std::invalid_argument("complete_with_cv: ground truth shape mismatch");

  double s = 0.0;
  for (double v : obs.values) s = std::max(s, std::abs(v));
  if (s == 0.0) s = 1.0;
  ObservationSet work = obs;
  for (double& v : work.values) v /= s;

  const double lo0 = lower / s;
  const double hi0 = upper / s;
  const double al = alpha / s;
  const Eigen::Index k = width > 0 ? width : 2 * static_cast<Eigen::Index>(shape.max_dim());
  const int d = shape.order();

  auto [train, val] = split_train_validate(work, 0.8, derive_seed(solver.seed, "cv_split"));

  struct Best {
    double score = std::numeric_limits<double>::infinity();
    double bound = 0.0;
    SolverState state;
  } best;
  std::vector<std::pair<double, double>> trace;

  // Every candidate solve starts from its own seed-derived point rather than
  // the previous candidate's factors: re-solves of similar bounds across
  // refinement iterations then act as independent restarts, so one bad basin
  // cannot poison the whole search. The global best keeps any success.
  auto run_candidate = [&](double bound_value, int outer, int index) {
    const QnormBound bound(bound_value, al, d);
    const CPFactors start =
        default_init(shape, k, bound, derive_seed(solver.seed, "cv_init", {outer, index}));
    SolverState st = solve(train, shape, bound, k, solver, start);
    const double score = rmse(detail::predict_at(st.factors, val.indices), val.values);
    return std::make_pair(score, std::move(st));
  };

  if (hi0 == lo0) {
    trace.emplace_back(lo0, hi0);
    auto [score, st] = run_candidate(lo0, 0, 0);
    best = {score, lo0, std::move(st)};
  } else {
    const int iters = detail::refinement_iterations(lo0, hi0);
    double lo = lo0, hi = hi0;
    for (int it = 0; it < iters; ++it) {
      trace.emplace_back(lo, hi);
      std::array<double, 5> cand;
      for (int i = 0; i < 5; ++i)
        cand[static_cast<std::size_t>(i)] =
            (static_cast<double>(i) / 4.0) * hi + (static_cast<double>(4 - i) / 4.0) * lo;
      int min_index = 0;
      double min_score = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 5; ++i) {
        auto [score, st] = run_candidate(cand[static_cast<std::size_t>(i)], it, i);
        if (score < min_score) {
          min_score = score;
          min_index = i;
        }
        if (score < best.score) best = {score, cand[static_cast<std::size_t>(i)], std::move(st)};
      }
      lo = cand[static_cast<std::size_t>(std::max(min_index - 1, 0))];
      hi = cand[static_cast<std::size_t>(std::min(min_index + 1, 4))];
    }
  }

  // scale everything back to the caller's units
  CompletionResult out;
  out.recovered = cp_compose(best.state.factors);
  for (double& v : out.recovered.values) v *= s;
  out.factors = best.state.factors;
  const double fscale = std::pow(s, 1.0 / d);
  for (Matrix& U : out.factors.U) U *= fscale;
  out.chosen_R = best.bound * s;
  out.validation_rmse = best.score * s;
  out.solver_diag = std::move(best.state);
  out.solver_diag.factors = out.factors;
  out.solver_diag.loss *= s * s;
  for (double& v : out.solver_diag.loss_trace) v *= s * s;
  out.bounds_trace.reserve(trace.size());
  for (auto [a, b] : trace) out.bounds_trace.emplace_back(a * s, b * s);
  if (truth) out.relative_error = detail::relative_frobenius_error(out.recovered, *truth);
  return out;
}

// The same pipeline run on the balanced unfolding at the given mode split:
// observation indices are mapped to matrix indices, the order-2 problem is
// cross-validated and solved, and the recovered matrix is folded back to
// the tensor shape. The result's factors have order 2.
inline CompletionResult matricized_baseline(const ObservationSet& obs, const Shape& shape,
                                            int mode_split, double lower, double upper,
                                            const SolverParams& solver, double alpha,
                                            const DenseTensor* truth = nullptr,
                                            Eigen::Index width = 0) {
  shape.validate();
  obs.validate();
  if (obs.shape != shape)
    throw std::invalid_argument("matricized_baseline: observation shape mismatch");
  const int d = shape.order();
  if (mode_split < 1 || mode_split > d - 1)
    throw std::invalid_argument("matricized_baseline: mode split out of range");
  if (truth && truth->shape != shape)
    throw std::invalid_argument("matricized_baseline: ground truth shape mismatch");

  std::int64_t rows = 1, cols = 1;
  for (int j = 1; j <= d; ++j) {
    if (j <= mode_split)
      rows *= shape.dims[static_cast<std::size_t>(j - 1)];
    else
      cols *= shape.dims[static_cast<std::size_t>(j - 1)];
  }
  const Shape mshape{{rows, cols}};

  ObservationSet mobs;
  mobs.shape = mshape;
  mobs.values = obs.values;
  mobs.indices.reserve(obs.indices.size());
  for (const Index& ix : obs.indices) {
    const auto [r, c] = balanced_row_col(shape, mode_split, ix);
    mobs.indices.push_back(Index{r, c});
  }

  // a matrix of this shape has rank at most min(rows, cols); twice that is
  // budget enough for the factor width
  const Eigen::Index k =
      width > 0 ? width : 2 * static_cast<Eigen::Index>(std::min(rows, cols));
  CompletionResult out = complete_with_cv(mobs, mshape, lower, upper, solver, alpha, nullptr, k);

  DenseTensor rec(shape);
  Index ix(d, 1);
  const std::int64_t n = shape.numel();
  for (std::int64_t off = 0; off < n; ++off) {
    const auto [r, c] = balanced_row_col(shape, mode_split, ix);
    rec.values[static_cast<std::size_t>(off)] =
        out.recovered.values[static_cast<std::size_t>(flat_index(mshape, Index{r, c}))];
    next_index(shape, ix);
  }
  out.recovered = std::move(rec);
  if (truth) out.relative_error = detail::relative_frobenius_error(out.recovered, *truth);
  return out;
}

}  // namespace maxq
