#pragma once
// Self-contained two-phase primal simplex on a dense tableau with Bland's
// anti-cycling rule. Solves min c'x subject to A x = b, x >= 0. Sized for
// the small certification programs in oracle.hpp (tens of rows, up to a few
// thousand columns); it is not a production LP code.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace maxq {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;  // primal solution, filled when optimal
  Eigen::VectorXd y;  // row multipliers from the final basis (A'y <= c), when optimal
};

inline LpResult simplex_solve(Eigen::MatrixXd A, Eigen::VectorXd b, const Eigen::VectorXd& c,
                              std::int64_t max_pivots = 0) {
  constexpr double kEps = 1e-9;
  const Eigen::Index n = A.cols();
  const Eigen::Index m0 = A.rows();
  if (b.size() != m0 || c.size() != n)
    throw std::invalid_argument("simplex_solve: dimension mismatch");
  if (max_pivots <= 0) max_pivots = 20000 + 200 * static_cast<std::int64_t>(m0 + n);

  // normalize to b >= 0, remembering row flips for the dual
  std::vector<double> flip(static_cast<std::size_t>(m0), 1.0);
  for (Eigen::Index i = 0; i < m0; ++i)
    if (b(i) < 0.0) {
      b(i) = -b(i);
      A.row(i) *= -1.0;
      flip[static_cast<std::size_t>(i)] = -1.0;
    }

  Eigen::Index m = m0;
  Eigen::MatrixXd T(m, n + m0);
  T << A, Eigen::MatrixXd::Identity(m0, m0);
  Eigen::VectorXd rhs = b;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m0));
  for (Eigen::Index i = 0; i < m0; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  Eigen::RowVectorXd r;  // reduced costs of the running phase
  double v = 0.0;        // objective value of the running phase
  std::int64_t pivots = 0;

  auto pivot = [&](Eigen::Index e, Eigen::Index lrow) {
    rhs(lrow) /= T(lrow, e);
    T.row(lrow) /= T(lrow, e);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == lrow) continue;
      const double f = T(i, e);
      if (f != 0.0) {
        T.row(i) -= f * T.row(lrow);
        rhs(i) -= f * rhs(lrow);
      }
    }
    const double fr = r(e);
    if (fr != 0.0) {
      v += fr * rhs(lrow);
      r -= fr * T.row(lrow);
    }
    basis[static_cast<std::size_t>(lrow)] = e;
  };

  // Bland's rule: enter the smallest-index improving column, leave on the
  // smallest basis index among the minimum-ratio rows
  auto run_phase = [&](bool artificials_allowed) -> LpStatus {
    const Eigen::Index limit = artificials_allowed ? n + m0 : n;
    while (true) {
      Eigen::Index e = -1;
      for (Eigen::Index j = 0; j < limit; ++j)
        if (r(j) < -kEps) {
          e = j;
          break;
        }
      if (e < 0) return LpStatus::optimal;
      Eigen::Index lrow = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (T(i, e) > kEps) {
          const double ratio = rhs(i) / T(i, e);
          if (lrow < 0 || ratio < best - 1e-12 ||
              (std::abs(ratio - best) <= 1e-12 &&
               basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(lrow)])) {
            lrow = i;
            best = ratio;
          }
        }
      }
      if (lrow < 0) return LpStatus::unbounded;
      if (++pivots > max_pivots) throw std::logic_error("simplex_solve: pivot limit exceeded");
      pivot(e, lrow);
    }
  };

  // phase 1: drive the artificial variables to zero
  r = Eigen::RowVectorXd::Zero(n + m0);
  for (Eigen::Index j = 0; j < n; ++j) r(j) = -T.col(j).head(m).sum();
  v = rhs.sum();
  if (run_phase(true) != LpStatus::optimal)
    throw std::logic_error("simplex_solve: phase 1 cannot be unbounded");
  if (v > 1e-7 * std::max(1.0, b.lpNorm<Eigen::Infinity>())) return {LpStatus::infeasible, 0.0, {}, {}};

  // pivot leftover basic artificials onto structural columns; rows that
  // offer none are linearly dependent and get dropped
  for (Eigen::Index i = 0; i < m;) {
    if (basis[static_cast<std::size_t>(i)] < n) {
      ++i;
      continue;
    }
    Eigen::Index piv = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(T(i, j)) > kEps) {
        piv = j;
        break;
      }
    if (piv >= 0) {
      pivot(piv, i);
      ++i;
      continue;
    }
    for (Eigen::Index k = i; k + 1 < m; ++k) {
      T.row(k) = T.row(k + 1);
      rhs(k) = rhs(k + 1);
      basis[static_cast<std::size_t>(k)] = basis[static_cast<std::size_t>(k + 1)];
    }
    --m;
  }
  T.conservativeResize(m, Eigen::NoChange);
  rhs.conservativeResize(m);
  basis.resize(static_cast<std::size_t>(m));

  // phase 2 on the original objective, artificials barred from entering
  Eigen::VectorXd cb(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bi = basis[static_cast<std::size_t>(i)];
    cb(i) = bi < n ? c(bi) : 0.0;
  }
  r = Eigen::RowVectorXd::Zero(n + m0);
  r.head(n) = c.transpose();
  r -= cb.transpose() * T;
  v = cb.dot(rhs);
  const LpStatus s2 = run_phase(false);
  if (s2 == LpStatus::unbounded) return {LpStatus::unbounded, 0.0, {}, {}};

  LpResult out;
  out.status = LpStatus::optimal;
  out.objective = v;
  out.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[static_cast<std::size_t>(i)] < n) out.x(basis[static_cast<std::size_t>(i)]) = rhs(i);
  // every artificial column holds the accumulated row operations applied to
  // its original unit vector, so its reduced cost exposes that row's
  // multiplier even after redundant rows were dropped
  out.y = Eigen::VectorXd::Zero(m0);
  for (Eigen::Index i = 0; i < m0; ++i) out.y(i) = -r(n + i) * flip[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace maxq
