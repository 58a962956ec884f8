#pragma once
// Exact certification tools, brute force by design and guarded to shapes
// whose dimensions sum to at most 20: the dictionary of rank-one sign
// tensors (atoms), the atomic-decomposition norm computed as a linear
// program over that dictionary, membership in scaled atomic balls, and the
// (inf,1) norm by sign enumeration.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "maxq/simplex.hpp"
#include "maxq/tensor.hpp"

namespace maxq {

inline constexpr std::int64_t kAtomEnumerationLimit = 20;  // max sum of dimensions
inline constexpr double kMNormTol = 1e-8;
inline constexpr double kExactTol = 1e-10;

struct AtomBasis {
  Shape shape;
  std::vector<DenseTensor> atoms;  // every rank-one sign tensor, each exactly once
};

namespace detail {
inline std::int64_t checked_dim_sum(const Shape& shape, const char* who) {
  std::int64_t sum = 0;
  for (std::int64_t d : shape.dims) sum += d;
  if (sum > kAtomEnumerationLimit)
    throw std::invalid_argument(std::string(who) +
                                ": dimensions sum above the enumeration guard of 20");
  return sum;
}
}  // namespace detail

// number of distinct rank-one sign tensors: 2^(sum N_j - d + 1), because the
// 2^(d-1) product-preserving sign flips of the factors act freely
inline std::int64_t atom_count(const Shape& shape) {
  shape.validate();
  const std::int64_t sum = detail::checked_dim_sum(shape, "atom_count");
  return std::int64_t(1) << (sum - shape.order() + 1);
}

// Enumerates every atom exactly once by fixing the leading entry of each
// sign vector except the last mode's to +1; the free signs then label the
// atoms bijectively, and the listing is closed under negation through the
// last mode.
inline AtomBasis enumerate_atoms(const Shape& shape) {
  shape.validate();
  detail::checked_dim_sum(shape, "enumerate_atoms");
  const int d = shape.order();
  const std::int64_t n_atoms = atom_count(shape);

  AtomBasis basis;
  basis.shape = shape;
  basis.atoms.reserve(static_cast<std::size_t>(n_atoms));

  std::vector<std::vector<double>> sign(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    sign[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(shape.dims[static_cast<std::size_t>(j)]), 1.0);

  for (std::int64_t code = 0; code < n_atoms; ++code) {
    std::int64_t bits = code;
    for (int j = 0; j < d; ++j) {
      auto& s = sign[static_cast<std::size_t>(j)];
      const std::size_t first_free = j + 1 < d ? 1 : 0;  // last mode frees all entries
      for (std::size_t i = first_free; i < s.size(); ++i) {
        s[i] = (bits & 1) ? -1.0 : 1.0;
        bits >>= 1;
      }
    }
    DenseTensor atom{shape};
    Index ix(static_cast<std::size_t>(d), 1);
    for (std::int64_t off = 0; off < atom.shape.numel(); ++off) {
      double p = 1.0;
      for (int j = 0; j < d; ++j)
        p *= sign[static_cast<std::size_t>(j)][static_cast<std::size_t>(ix[static_cast<std::size_t>(j)] - 1)];
      atom.values[static_cast<std::size_t>(off)] = p;
      next_index(shape, ix);
    }
    basis.atoms.push_back(std::move(atom));
  }
  return basis;
}

struct LPSolution {
  double value = 0.0;
  Eigen::VectorXd coefficients;  // one nonnegative weight per atom
  LpStatus status = LpStatus::infeasible;
};

// Atomic-decomposition norm: the least total weight of a nonnegative
// combination of atoms reproducing T, computed exactly as an LP. The
// returned weights are audited against T before the result is trusted.
inline LPSolution m_norm_exact(const DenseTensor& T, const AtomBasis& basis) {
  T.validate();
  if (T.shape != basis.shape) throw std::invalid_argument("m_norm_exact: shape mismatch with basis");
  if (basis.atoms.empty()) throw std::invalid_argument("m_norm_exact: empty basis");
  const std::int64_t P = T.shape.numel();
  const std::int64_t n = static_cast<std::int64_t>(basis.atoms.size());

  Eigen::MatrixXd A(P, n);
  for (std::int64_t k = 0; k < n; ++k)
    A.col(k) = Eigen::Map<const Eigen::VectorXd>(basis.atoms[static_cast<std::size_t>(k)].values.data(), P);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(T.values.data(), P);

  LpResult lp = simplex_solve(A, b, Eigen::VectorXd::Ones(n));
  if (lp.status != LpStatus::optimal)
    throw std::logic_error("m_norm_exact: the atomic program must be feasible and bounded");

  // self-audit: weights reconstruct T and total to the reported value
  if ((A * lp.x - b).lpNorm<Eigen::Infinity>() > kMNormTol)
    throw std::logic_error("m_norm_exact: optimal weights fail to reconstruct the tensor");
  if (std::abs(lp.x.sum() - lp.objective) > kMNormTol)
    throw std::logic_error("m_norm_exact: objective disagrees with the weight total");

  LPSolution out;
  out.value = lp.objective;
  out.coefficients = lp.x.cwiseMax(0.0);  // clear roundoff-negative weights
  out.status = lp.status;
  return out;
}

inline bool m_ball_membership(const DenseTensor& T, double radius, const AtomBasis& basis) {
  if (radius < 0.0) throw std::invalid_argument("m_ball_membership: radius must be >= 0");
  return m_norm_exact(T, basis).value <= radius + kMNormTol;
}

// (inf,1) norm: the largest absolute multilinear action over sign vectors.
// The largest mode is handled analytically (signs aligned coordinatewise),
// the rest by enumeration.
inline double inf_one_norm_bruteforce(const DenseTensor& T) {
  T.validate();
  detail::checked_dim_sum(T.shape, "inf_one_norm_bruteforce");
  const int d = T.shape.order();

  int amode = 0;  // analytic mode, 0-based
  for (int j = 1; j < d; ++j)
    if (T.shape.dims[static_cast<std::size_t>(j)] > T.shape.dims[static_cast<std::size_t>(amode)]) amode = j;

  Matrix M = matricize_mode(T, amode + 1);
  const Eigen::Index cols = M.cols();

  // remaining modes, in their column-stride order (earliest mode fastest)
  std::vector<std::int64_t> rem_dims;
  for (int j = 0; j < d; ++j)
    if (j != amode) rem_dims.push_back(T.shape.dims[static_cast<std::size_t>(j)]);
  std::int64_t rem_sum = 0;
  for (std::int64_t v : rem_dims) rem_sum += v;

  Eigen::VectorXd cs(cols);
  double best = 0.0;
  const std::int64_t patterns = std::int64_t(1) << rem_sum;
  std::vector<std::vector<double>> sign(rem_dims.size());
  for (std::size_t j = 0; j < rem_dims.size(); ++j)
    sign[j].assign(static_cast<std::size_t>(rem_dims[j]), 1.0);

  for (std::int64_t code = 0; code < patterns; ++code) {
    std::int64_t bits = code;
    for (auto& s : sign)
      for (double& e : s) {
        e = (bits & 1) ? -1.0 : 1.0;
        bits >>= 1;
      }
    // column c decodes to remaining-mode coordinates, earliest fastest
    for (Eigen::Index col = 0; col < cols; ++col) {
      std::int64_t rest = col;
      double p = 1.0;
      for (std::size_t j = 0; j < rem_dims.size(); ++j) {
        p *= sign[j][static_cast<std::size_t>(rest % rem_dims[j])];
        rest /= rem_dims[j];
      }
      cs(col) = p;
    }
    best = std::max(best, (M * cs).lpNorm<1>());
  }
  return best;
}

}  // namespace maxq
