#pragma once
// Factor-level norm machinery: the 2,inf row norm, the max-qnorm value of a
// factorization (an upper bound on the tensor's max-qnorm, tight only at a
// minimizing factorization), row projection onto the 2,inf ball, factor
// balancing and concatenation, and the rank-based sandwich bounds that
// relate the infinity norm to the atomic and max quasi-norms.

#include <cmath>
#include <stdexcept>

#include "maxq/tensor.hpp"

namespace maxq {

// Grothendieck's constant lies in this interval; the midpoint and the
// comparison-constant ceilings below feed diagnostics and documentation
// only, never algorithmic decisions.
inline constexpr double kGrothendieckLower = 1.67;
inline constexpr double kGrothendieckUpper = 1.79;
inline constexpr double kGrothendieckMid = 1.73;
inline constexpr double kUnitBallC1Ceiling = kGrothendieckMid / 5.0;
inline constexpr double kUnitBallC2Ceiling = 2.83;

// largest euclidean row norm
inline double two_inf_norm(const Matrix& U) {
  if (U.rows() < 1 || U.cols() < 1) throw std::invalid_argument("two_inf_norm: empty matrix");
  return U.rowwise().norm().maxCoeff();
}

// product of the per-factor 2,inf norms; an upper bound on the max-qnorm of
// the composed tensor, with equality exactly at minimizing factorizations
inline double max_qnorm_value(const CPFactors& F) {
  F.validate();
  double p = 1.0;
  for (const Matrix& U : F.U) p *= two_inf_norm(U);
  return p;
}

// rescale every row with norm above the bound back onto the sphere; rows
// already inside the ball are untouched (so the map is idempotent)
inline Matrix project_rows(Matrix U, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("project_rows: bound must be positive");
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const double n = U.row(i).norm();
    if (n > bound) U.row(i) *= bound / n;
  }
  return U;
}

// rescale the factors onto a common 2,inf norm (their geometric mean)
// without changing the composition; a bundle containing an all-zero factor
// composes to zero and is returned unchanged
inline CPFactors balance_factors(CPFactors F) {
  F.validate();
  const int d = F.order();
  std::vector<double> a(static_cast<std::size_t>(d));
  double logsum = 0.0;
  for (int j = 0; j < d; ++j) {
    a[static_cast<std::size_t>(j)] = two_inf_norm(F.U[static_cast<std::size_t>(j)]);
    if (a[static_cast<std::size_t>(j)] == 0.0) return F;
    logsum += std::log(a[static_cast<std::size_t>(j)]);
  }
  const double g = std::exp(logsum / d);
  for (int j = 0; j < d; ++j) F.U[static_cast<std::size_t>(j)] *= g / a[static_cast<std::size_t>(j)];
  return F;
}

// column-concatenate two factorizations of the same shape after balancing
// each side; composes to the sum of the two compositions, and its
// max_qnorm_value obeys the 2^(d/2-1) quasi-triangle bound
inline CPFactors concat_factorizations(const CPFactors& A, const CPFactors& B) {
  A.validate();
  B.validate();
  if (A.shape() != B.shape())
    throw std::invalid_argument("concat_factorizations: shapes differ");
  CPFactors a = balance_factors(A);
  CPFactors b = balance_factors(B);
  CPFactors out;
  out.U.reserve(static_cast<std::size_t>(a.order()));
  for (int j = 0; j < a.order(); ++j) {
    const Matrix& L = a.U[static_cast<std::size_t>(j)];
    const Matrix& R = b.U[static_cast<std::size_t>(j)];
    Matrix C(L.rows(), L.cols() + R.cols());
    C << L, R;
    out.U.push_back(std::move(C));
  }
  return out;
}

// sandwich ceilings for a tensor composed from `rank` terms whose entries
// have infinity norm alpha: atomic norm <= (r sqrt r)^(d-1) alpha and
// max-qnorm <= r^((d^2-d)/2) alpha
inline double m_norm_upper_bound(int rank, int order, double alpha) {
  if (rank < 1) throw std::invalid_argument("m_norm_upper_bound: rank must be >= 1");
  if (order < 2) throw std::invalid_argument("m_norm_upper_bound: order must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("m_norm_upper_bound: alpha must be positive");
  return std::pow(static_cast<double>(rank) * std::sqrt(static_cast<double>(rank)), order - 1) * alpha;
}

inline double max_qnorm_upper_bound(int rank, int order, double alpha) {
  if (rank < 1) throw std::invalid_argument("max_qnorm_upper_bound: rank must be >= 1");
  if (order < 2) throw std::invalid_argument("max_qnorm_upper_bound: order must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("max_qnorm_upper_bound: alpha must be positive");
  return std::pow(static_cast<double>(rank), (static_cast<double>(order) * order - order) / 2.0) * alpha;
}

// feasibility budget the solvers enforce: the max-qnorm cap R, the
// infinity-norm level alpha kept for bookkeeping, and the per-factor row
// bound R^(1/d) that the row projections actually use
struct QnormBound {
  double R;
  double alpha;
  double per_factor_bound;

  QnormBound(double R_, double alpha_, int order) : R(R_), alpha(alpha_) {
    if (order < 2) throw std::invalid_argument("QnormBound: order must be >= 2");
    if (!(R_ > 0.0)) throw std::invalid_argument("QnormBound: R must be positive");
    if (!(alpha_ > 0.0)) throw std::invalid_argument("QnormBound: alpha must be positive");
    if (R_ < alpha_) throw std::invalid_argument("QnormBound: R must be >= alpha");
    per_factor_bound = std::pow(R_, 1.0 / order);
  }
};

}  // namespace maxq
