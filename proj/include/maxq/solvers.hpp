#pragma once
// Constrained first-order solvers for the observed-entry least squares
// problem over CP factors, with the per-factor row-norm budget R^(1/d)
// enforced after every update: projected gradient descent with Armijo
// backtracking (pgd), a projected quasi-Newton method that minimizes a
// compact limited-memory quadratic model with spectral projected gradient
// steps and a nonmonotone line search (pqn), and minibatch projected
// stochastic gradient descent with a 1/sqrt(t) schedule (sgd). Solvers
// touch only the observed entries; the full tensor is never materialized.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxq/norms.hpp"
#include "maxq/observation.hpp"
#include "maxq/rng.hpp"
#include "maxq/tensor.hpp"

namespace maxq {

enum class Method { pgd, pqn, sgd };

inline Method method_from_string(const std::string& s) {
  if (s == "pgd") return Method::pgd;
  if (s == "pqn") return Method::pqn;
  if (s == "sgd") return Method::sgd;
  throw std::invalid_argument("method: expected pgd, pqn or sgd, got '" + s + "'");
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::pgd: return "pgd";
    case Method::pqn: return "pqn";
    default: return "sgd";
  }
}

struct SolverParams {
  Method method = Method::pqn;
  int max_iters = 2000;        // outer iterations; epochs for sgd
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double tol_rel_loss = 1e-9;  // stop after 5 consecutive iterations below this
  int batch_size = 128;        // sgd only
  int lbfgs_memory = 10;       // pqn only
  std::uint64_t seed = 0;

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("SolverParams: max_iters must be >= 1");
    if (!(step_init > 0.0)) throw std::invalid_argument("SolverParams: step_init must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
      throw std::invalid_argument("SolverParams: armijo_c must lie in (0,1)");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0))
      throw std::invalid_argument("SolverParams: armijo_shrink must lie in (0,1)");
    if (!(tol_rel_loss >= 0.0)) throw std::invalid_argument("SolverParams: tol_rel_loss must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("SolverParams: batch_size must be >= 1");
    if (lbfgs_memory < 0) throw std::invalid_argument("SolverParams: lbfgs_memory must be >= 0");
  }
};

struct SolverState {
  CPFactors factors;
  double loss = 0.0;
  int iter = 0;
  std::vector<double> loss_trace;  // initial loss, then one entry per accepted step (per epoch for sgd)
};

namespace detail {

inline void check_problem(const CPFactors& F, const ObservationSet& obs) {
  F.validate();
  obs.validate();
  if (F.shape() != obs.shape)
    throw std::invalid_argument("solver: factor shape does not match observations");
  if (obs.size() < 1) throw std::invalid_argument("solver: need at least one observation");
}

// mean squared residual over a slot subset (all slots when none given)
inline double loss_over(const CPFactors& F, const ObservationSet& obs,
                        const std::int64_t* slots, std::int64_t count) {
  const int d = F.order();
  const Eigen::Index k = F.width();
  Eigen::RowVectorXd acc(k);
  double total = 0.0;
  for (std::int64_t t = 0; t < count; ++t) {
    const std::int64_t slot = slots ? slots[t] : t;
    const Index& ix = obs.indices[static_cast<std::size_t>(slot)];
    acc = F.U[0].row(ix[0] - 1);
    for (int j = 1; j < d; ++j)
      acc.array() *= F.U[static_cast<std::size_t>(j)].row(ix[static_cast<std::size_t>(j)] - 1).array();
    const double res = acc.sum() - obs.values[static_cast<std::size_t>(slot)];
    total += res * res;
  }
  return total / static_cast<double>(count);
}

struct LossGrad {
  double loss = 0.0;
  std::vector<Matrix> grad;  // one N_j x k block per mode
};

// one pass over the slots computing the loss and every mode's gradient via
// prefix/suffix row products: O(count * d * k) time, O(sum N_j * k) space
inline LossGrad loss_and_gradients(const CPFactors& F, const ObservationSet& obs,
                                   const std::int64_t* slots, std::int64_t count) {
  const int d = F.order();
  const Eigen::Index k = F.width();
  LossGrad out;
  out.grad.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    out.grad.emplace_back(Matrix::Zero(F.U[static_cast<std::size_t>(j)].rows(), k));

  std::vector<Eigen::RowVectorXd> pre(static_cast<std::size_t>(d) + 1),
      suf(static_cast<std::size_t>(d) + 1);
  for (auto& v : pre) v.resize(k);
  for (auto& v : suf) v.resize(k);
  pre[0].setOnes();
  suf[static_cast<std::size_t>(d)].setOnes();

  const double scale = 2.0 / static_cast<double>(count);
  for (std::int64_t t = 0; t < count; ++t) {
    const std::int64_t slot = slots ? slots[t] : t;
    const Index& ix = obs.indices[static_cast<std::size_t>(slot)];
    for (int j = 0; j < d; ++j)
      pre[static_cast<std::size_t>(j) + 1] =
          pre[static_cast<std::size_t>(j)].cwiseProduct(
              F.U[static_cast<std::size_t>(j)].row(ix[static_cast<std::size_t>(j)] - 1));
    for (int j = d - 1; j >= 0; --j)
      suf[static_cast<std::size_t>(j)] =
          suf[static_cast<std::size_t>(j) + 1].cwiseProduct(
              F.U[static_cast<std::size_t>(j)].row(ix[static_cast<std::size_t>(j)] - 1));
    const double res = pre[static_cast<std::size_t>(d)].sum() - obs.values[static_cast<std::size_t>(slot)];
    out.loss += res * res;
    const double w = scale * res;
    for (int j = 0; j < d; ++j)
      out.grad[static_cast<std::size_t>(j)].row(ix[static_cast<std::size_t>(j)] - 1) +=
          w * pre[static_cast<std::size_t>(j)].cwiseProduct(suf[static_cast<std::size_t>(j) + 1]);
  }
  out.loss /= static_cast<double>(count);
  return out;
}

}  // namespace detail

// mean squared residual of the composition against the observed values
inline double loss(const CPFactors& F, const ObservationSet& obs) {
  detail::check_problem(F, obs);
  return detail::loss_over(F, obs, nullptr, obs.size());
}

// gradient of the loss with respect to the factor of the given 1-based mode
inline Matrix loss_gradient(const CPFactors& F, const ObservationSet& obs, int mode) {
  detail::check_problem(F, obs);
  if (mode < 1 || mode > F.order()) throw std::invalid_argument("loss_gradient: mode out of range");
  return detail::loss_and_gradients(F, obs, nullptr, obs.size()).grad[static_cast<std::size_t>(mode - 1)];
}

// random feasible start: i.i.d. gaussian factors, balanced, scaled so the
// factorization's norm value sits at half the budget
inline CPFactors default_init(const Shape& shape, Eigen::Index k, const QnormBound& bound,
                              std::uint64_t seed) {
  shape.validate();
  if (k < 1) throw std::invalid_argument("default_init: width must be >= 1");
  Rng rng = make_rng(seed, "init");
  std::normal_distribution<double> gauss(0.0, 1.0);
  CPFactors F;
  F.U.reserve(shape.dims.size());
  for (std::int64_t n : shape.dims) {
    Matrix U(n, k);
    for (std::int64_t i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < k; ++c) U(i, c) = gauss(rng);
    F.U.push_back(std::move(U));
  }
  F = balance_factors(F);
  const double g = two_inf_norm(F.U[0]);
  if (g == 0.0) throw std::runtime_error("default_init: degenerate random draw");
  const double target = std::pow(bound.R / 2.0, 1.0 / shape.order());
  for (Matrix& U : F.U) U *= target / g;
  return F;
}

namespace detail {

inline CPFactors prepare_init(const ObservationSet& obs, const Shape& shape,
                              const QnormBound& bound, Eigen::Index k,
                              const SolverParams& p, const std::optional<CPFactors>& init) {
  shape.validate();
  p.validate();
  CPFactors F;
  if (init) {
    init->validate();
    if (init->shape() != shape) throw std::invalid_argument("solver: init shape mismatch");
    if (init->width() != k) throw std::invalid_argument("solver: init width mismatch");
    F = *init;
    for (Matrix& U : F.U) U = project_rows(std::move(U), bound.per_factor_bound);
  } else {
    F = default_init(shape, k, bound, p.seed);
  }
  check_problem(F, obs);
  return F;
}

// convergence rule shared by all solvers: five consecutive accepted steps
// whose relative decrease falls below the tolerance (an increase resets)
struct StallCounter {
  int count = 0;
  bool update(double prev, double cur, double tol) {
    const double rel = (prev - cur) / std::max(prev, 1e-300);
    count = (rel >= 0.0 && rel < tol) ? count + 1 : 0;
    return count >= 5;
  }
};

}  // namespace detail

// Projected gradient descent: every factor steps simultaneously against its
// gradient, rows are projected back onto the budget, and the step length
// backtracks until the projected step decreases the loss enough. The loss
// trace is nonincreasing.
inline SolverState solve_pgd(const ObservationSet& obs, const Shape& shape, const QnormBound& bound,
                             Eigen::Index k, const SolverParams& p,
                             const std::optional<CPFactors>& init = std::nullopt) {
  CPFactors F = detail::prepare_init(obs, shape, bound, k, p, init);
  const int d = F.order();

  detail::LossGrad lg = detail::loss_and_gradients(F, obs, nullptr, obs.size());
  SolverState st;
  st.loss_trace.push_back(lg.loss);
  detail::StallCounter stall;
  double gamma_start = p.step_init;

  CPFactors cand;
  cand.U.resize(static_cast<std::size_t>(d));
  for (int it = 1; it <= p.max_iters; ++it) {
    double gamma = gamma_start;
    double f_new = lg.loss;
    bool accepted = false;
    while (gamma > 1e-18) {
      double delta2 = 0.0;
      for (int j = 0; j < d; ++j) {
        cand.U[static_cast<std::size_t>(j)] =
            project_rows(F.U[static_cast<std::size_t>(j)] - gamma * lg.grad[static_cast<std::size_t>(j)],
                         bound.per_factor_bound);
        delta2 += (cand.U[static_cast<std::size_t>(j)] - F.U[static_cast<std::size_t>(j)]).squaredNorm();
      }
      f_new = detail::loss_over(cand, obs, nullptr, obs.size());
      if (f_new <= lg.loss - (p.armijo_c / gamma) * delta2) {
        accepted = true;
        break;
      }
      gamma *= p.armijo_shrink;
    }
    if (!accepted) break;  // stationary at line-search resolution

    const double f_prev = lg.loss;
    std::swap(F.U, cand.U);
    lg = detail::loss_and_gradients(F, obs, nullptr, obs.size());
    st.loss_trace.push_back(lg.loss);
    st.iter = it;
    gamma_start = std::min(gamma * 2.0, 1e6);
    if (stall.update(f_prev, f_new, p.tol_rel_loss)) break;
  }

  st.factors = std::move(F);
  st.loss = st.loss_trace.back();
  return st;
}

namespace detail {

// flat vector layout for the stacked factors: one column-major block per mode
inline Eigen::Index flat_size(const Shape& shape, Eigen::Index k) {
  Eigen::Index n = 0;
  for (std::int64_t dim : shape.dims) n += static_cast<Eigen::Index>(dim) * k;
  return n;
}

inline Vector flatten(const CPFactors& F) {
  Vector x(flat_size(F.shape(), F.width()));
  Eigen::Index off = 0;
  for (const Matrix& U : F.U) {
    x.segment(off, U.size()) = Eigen::Map<const Vector>(U.data(), U.size());
    off += U.size();
  }
  return x;
}

inline CPFactors unflatten(const Vector& x, const Shape& shape, Eigen::Index k) {
  CPFactors F;
  Eigen::Index off = 0;
  for (std::int64_t dim : shape.dims) {
    F.U.emplace_back(Eigen::Map<const Matrix>(x.data() + off, dim, k));
    off += static_cast<Eigen::Index>(dim) * k;
  }
  return F;
}

inline void project_flat(Vector& x, const Shape& shape, Eigen::Index k, double row_bound) {
  Eigen::Index off = 0;
  for (std::int64_t dim : shape.dims) {
    Eigen::Map<Matrix> U(x.data() + off, dim, k);
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      const double n = U.row(i).norm();
      if (n > row_bound) U.row(i) *= row_bound / n;
    }
    off += static_cast<Eigen::Index>(dim) * k;
  }
}

// compact limited-memory quadratic model B = sigma I - Q K^{-1} Q'
struct CompactModel {
  double sigma = 1.0;
  bool has_pairs = false;
  Eigen::MatrixXd Q;
  Eigen::FullPivLU<Eigen::MatrixXd> K;

  Vector apply(const Vector& v) const {
    if (!has_pairs) return sigma * v;
    return sigma * v - Q * K.solve(Q.transpose() * v);
  }
};

inline CompactModel build_compact_model(const std::deque<Vector>& S, const std::deque<Vector>& Y) {
  CompactModel B;
  const Eigen::Index M = static_cast<Eigen::Index>(S.size());
  if (M == 0) return B;
  const double sy = S.back().dot(Y.back());
  const double yy = Y.back().squaredNorm();
  B.sigma = std::clamp(yy / sy, 1e-10, 1e10);

  const Eigen::Index n = S.front().size();
  Eigen::MatrixXd Smat(n, M), Ymat(n, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    Smat.col(i) = S[static_cast<std::size_t>(i)];
    Ymat.col(i) = Y[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd SY = Smat.transpose() * Ymat;
  Eigen::MatrixXd L = Eigen::MatrixXd(SY.triangularView<Eigen::StrictlyLower>());
  Eigen::MatrixXd K(2 * M, 2 * M);
  K.topLeftCorner(M, M) = B.sigma * (Smat.transpose() * Smat);
  K.topRightCorner(M, M) = L;
  K.bottomLeftCorner(M, M) = L.transpose();
  K.bottomRightCorner(M, M).setZero();
  K.bottomRightCorner(M, M).diagonal() = -SY.diagonal();
  B.Q.resize(n, 2 * M);
  B.Q.leftCols(M) = B.sigma * Smat;
  B.Q.rightCols(M) = Ymat;
  B.K.compute(K);
  if (!B.K.isInvertible()) return CompactModel{};  // degenerate history: fall back to identity
  B.has_pairs = true;
  return B;
}

// minimize g'(z-x) + (z-x)'B(z-x)/2 over the feasible set with spectral
// projected gradient steps; returns a feasible point with model value <= 0
template <class Project>
inline Vector spg_quadratic(const Vector& x, const Vector& g, const CompactModel& B,
                            Project project, int max_iter) {
  Vector z = x;
  Vector delta = Vector::Zero(x.size());
  Vector Bdelta = Vector::Zero(x.size());
  double q = 0.0;
  double alpha = std::clamp(1.0 / B.sigma, 1e-10, 1e10);
  const double zero_tol = 1e-12 * std::max(1.0, x.lpNorm<Eigen::Infinity>());

  for (int it = 0; it < max_iter; ++it) {
    Vector gq = g + Bdelta;
    bool accepted = false;
    Vector z_trial, dz, Bdz;
    double q_trial = 0.0;
    for (int bt = 0; bt < 30; ++bt) {
      z_trial = z - alpha * gq;
      project(z_trial);
      dz = z_trial - z;
      if (dz.lpNorm<Eigen::Infinity>() <= zero_tol) return z;
      Bdz = B.apply(dz);
      const double decr = gq.dot(dz);
      q_trial = q + decr + 0.5 * dz.dot(Bdz);
      if (q_trial <= q + 1e-4 * decr) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return z;
    z = z_trial;
    delta += dz;
    Bdelta += Bdz;
    q = q_trial;
    const double curv = dz.dot(Bdz);
    if (curv > 0.0) alpha = std::clamp(dz.squaredNorm() / curv, 1e-10, 1e10);
  }
  return z;
}

}  // namespace detail

// Projected quasi-Newton: a compact limited-memory quadratic model is
// minimized over the feasible set by SPG to get a search direction, which a
// nonmonotone Armijo line search (window 10) then accepts. Curvature pairs
// are kept only when they certify a positive-definite update. Returns the
// best iterate seen.
inline SolverState solve_pqn(const ObservationSet& obs, const Shape& shape, const QnormBound& bound,
                             Eigen::Index k, const SolverParams& p,
                             const std::optional<CPFactors>& init = std::nullopt) {
  CPFactors F = detail::prepare_init(obs, shape, bound, k, p, init);
  const int d = shape.order();
  constexpr int kSpgIters = 15;

  auto eval_grad = [&](const Vector& x, double& f_out) {
    CPFactors G = detail::unflatten(x, shape, k);
    detail::LossGrad lg = detail::loss_and_gradients(G, obs, nullptr, obs.size());
    f_out = lg.loss;
    Vector g(x.size());
    Eigen::Index off = 0;
    for (int j = 0; j < d; ++j) {
      const Matrix& Gj = lg.grad[static_cast<std::size_t>(j)];
      g.segment(off, Gj.size()) = Eigen::Map<const Vector>(Gj.data(), Gj.size());
      off += Gj.size();
    }
    return g;
  };
  auto eval_loss = [&](const Vector& x) {
    CPFactors G = detail::unflatten(x, shape, k);
    return detail::loss_over(G, obs, nullptr, obs.size());
  };
  auto project = [&](Vector& v) { detail::project_flat(v, shape, k, bound.per_factor_bound); };

  Vector x = detail::flatten(F);
  double f = 0.0;
  Vector g = eval_grad(x, f);

  SolverState st;
  st.loss_trace.push_back(f);
  std::deque<double> fhist{f};
  std::deque<Vector> S, Y;
  Vector best_x = x;
  double best_f = f;
  detail::StallCounter stall;

  for (int it = 1; it <= p.max_iters; ++it) {
    detail::CompactModel B = detail::build_compact_model(S, Y);
    Vector z = detail::spg_quadratic(x, g, B, project, kSpgIters);
    Vector dir = z - x;
    double gd = g.dot(dir);
    if (dir.lpNorm<Eigen::Infinity>() <= 1e-13 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) break;
    if (gd >= 0.0) {
      // quadratic model gave no descent; fall back to a plain projected step
      z = x - g / B.sigma;
      project(z);
      dir = z - x;
      gd = g.dot(dir);
      if (gd >= 0.0 || dir.lpNorm<Eigen::Infinity>() <= 1e-13) break;
    }

    const double fref = *std::max_element(fhist.begin(), fhist.end());
    double lambda = 1.0;
    double ft = f;
    bool accepted = false;
    Vector xt;
    while (lambda >= 1e-13) {
      xt = x + lambda * dir;
      ft = eval_loss(xt);
      if (ft <= fref + p.armijo_c * lambda * gd) {
        accepted = true;
        break;
      }
      lambda *= p.armijo_shrink;
    }
    if (!accepted) break;

    double f_new = 0.0;
    Vector g_new = eval_grad(xt, f_new);
    if (p.lbfgs_memory > 0) {
      Vector s = xt - x;
      Vector yv = g_new - g;
      if (s.dot(yv) > 1e-10 * s.norm() * yv.norm()) {
        S.push_back(std::move(s));
        Y.push_back(std::move(yv));
        if (static_cast<int>(S.size()) > p.lbfgs_memory) {
          S.pop_front();
          Y.pop_front();
        }
      }
    }
    const double f_prev = f;
    x = std::move(xt);
    f = f_new;
    g = std::move(g_new);
    st.loss_trace.push_back(f);
    st.iter = it;
    fhist.push_back(f);
    if (fhist.size() > 10) fhist.pop_front();
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    if (stall.update(f_prev, f, p.tol_rel_loss)) break;
  }

  detail::project_flat(best_x, shape, k, bound.per_factor_bound);
  st.factors = detail::unflatten(best_x, shape, k);
  st.loss = best_f;
  return st;
}

// Minibatch projected SGD: each epoch visits every observation once in a
// fresh random order, steps with gamma_t = step_init / sqrt(t) on the batch
// gradient, and projects only the rows the batch touched. The trace records
// one loss per epoch.
inline SolverState solve_sgd(const ObservationSet& obs, const Shape& shape, const QnormBound& bound,
                             Eigen::Index k, const SolverParams& p,
                             const std::optional<CPFactors>& init = std::nullopt) {
  CPFactors F = detail::prepare_init(obs, shape, bound, k, p, init);
  const int d = shape.order();
  const std::int64_t m = obs.size();
  const std::int64_t batch = std::min<std::int64_t>(p.batch_size, m);

  SolverState st;
  st.loss_trace.push_back(detail::loss_over(F, obs, nullptr, m));
  detail::StallCounter stall;

  std::vector<std::int64_t> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<char>> touched(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    touched[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(shape.dims[static_cast<std::size_t>(j)]), 0);

  std::int64_t t_global = 0;
  for (int epoch = 1; epoch <= p.max_iters; ++epoch) {
    Rng rng = make_rng(p.seed, "sgd_epoch", {epoch});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::int64_t start = 0; start < m; start += batch) {
      const std::int64_t count = std::min(batch, m - start);
      ++t_global;
      const double gamma = p.step_init / std::sqrt(static_cast<double>(t_global));
      detail::LossGrad lg = detail::loss_and_gradients(F, obs, perm.data() + start, count);
      for (int j = 0; j < d; ++j) std::fill(touched[static_cast<std::size_t>(j)].begin(),
                                            touched[static_cast<std::size_t>(j)].end(), 0);
      for (std::int64_t t = start; t < start + count; ++t) {
        const Index& ix = obs.indices[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])];
        for (int j = 0; j < d; ++j)
          touched[static_cast<std::size_t>(j)][static_cast<std::size_t>(ix[static_cast<std::size_t>(j)] - 1)] = 1;
      }
      for (int j = 0; j < d; ++j) {
        Matrix& U = F.U[static_cast<std::size_t>(j)];
        const Matrix& G = lg.grad[static_cast<std::size_t>(j)];
        for (std::int64_t i = 0; i < U.rows(); ++i) {
          if (!touched[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) continue;
          U.row(i) -= gamma * G.row(i);
          const double n = U.row(i).norm();
          if (n > bound.per_factor_bound) U.row(i) *= bound.per_factor_bound / n;
        }
      }
    }
    const double f_prev = st.loss_trace.back();
    const double f = detail::loss_over(F, obs, nullptr, m);
    st.loss_trace.push_back(f);
    st.iter = epoch;
    if (stall.update(f_prev, f, p.tol_rel_loss)) break;
  }

  st.factors = std::move(F);
  st.loss = st.loss_trace.back();
  return st;
}

inline SolverState solve(const ObservationSet& obs, const Shape& shape, const QnormBound& bound,
                         Eigen::Index k, const SolverParams& p,
                         const std::optional<CPFactors>& init = std::nullopt) {
  switch (p.method) {
    case Method::pgd: return solve_pgd(obs, shape, bound, k, p, init);
    case Method::pqn: return solve_pqn(obs, shape, bound, k, p, init);
    default: return solve_sgd(obs, shape, bound, k, p, init);
  }
}

}  // namespace maxq
