#pragma once
// Dense order-d tensors and CP factor bundles. Indices are 1-based
// throughout; flat storage runs with the LAST index fastest. Provides the
// two unfolding conventions used by the rest of the library (single-mode
// matricization and the balanced unfolding), random low-rank generation,
// and a small line-oriented text format for interchange.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maxq/rng.hpp"

namespace maxq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// one 1-based coordinate per mode
using Index = std::vector<std::int64_t>;

struct Shape {
  std::vector<std::int64_t> dims;

  Shape() = default;
  explicit Shape(std::vector<std::int64_t> d) : dims(std::move(d)) { validate(); }

  int order() const { return static_cast<int>(dims.size()); }

  // total entry count; rejects products that do not fit in int64
  std::int64_t numel() const {
    std::int64_t n = 1;
    for (std::int64_t d : dims)
      if (__builtin_mul_overflow(n, d, &n))
        throw std::invalid_argument("Shape: entry count overflows int64");
    return n;
  }

  void validate() const {
    if (dims.empty()) throw std::invalid_argument("Shape: need at least one mode");
    for (std::int64_t d : dims)
      if (d < 1) throw std::invalid_argument("Shape: every dimension must be >= 1");
    (void)numel();
  }

  std::int64_t max_dim() const {
    std::int64_t m = 0;
    for (std::int64_t d : dims) m = std::max(m, d);
    return m;
  }

  bool operator==(const Shape& o) const { return dims == o.dims; }
  bool operator!=(const Shape& o) const { return !(*this == o); }
};

inline std::int64_t flat_index(const Shape& s, const Index& ix) {
  if (static_cast<int>(ix.size()) != s.order())
    throw std::invalid_argument("flat_index: index order does not match shape");
  std::int64_t off = 0;
  for (int j = 0; j < s.order(); ++j) {
    if (ix[j] < 1 || ix[j] > s.dims[j])
      throw std::out_of_range("flat_index: coordinate out of range");
    off = off * s.dims[j] + (ix[j] - 1);
  }
  return off;
}

inline Index index_from_flat(const Shape& s, std::int64_t off) {
  if (off < 0 || off >= s.numel()) throw std::out_of_range("index_from_flat: offset out of range");
  Index ix(s.order());
  for (int j = s.order() - 1; j >= 0; --j) {
    ix[j] = off % s.dims[j] + 1;
    off /= s.dims[j];
  }
  return ix;
}

// advance a 1-based odometer in flat (last index fastest) order; the caller
// starts from all-ones and steps numel()-1 times
inline void next_index(const Shape& s, Index& ix) {
  for (int j = s.order() - 1; j >= 0; --j) {
    if (++ix[j] <= s.dims[j]) return;
    ix[j] = 1;
  }
}

struct DenseTensor {
  Shape shape;
  std::vector<double> values;  // flat, last index fastest

  DenseTensor() = default;
  explicit DenseTensor(Shape s, double fill = 0.0)
      : shape(std::move(s)), values(static_cast<std::size_t>(shape.numel()), fill) {}

  double& at(const Index& ix) { return values[static_cast<std::size_t>(flat_index(shape, ix))]; }
  double at(const Index& ix) const { return values[static_cast<std::size_t>(flat_index(shape, ix))]; }

  void validate() const {
    shape.validate();
    if (static_cast<std::int64_t>(values.size()) != shape.numel())
      throw std::invalid_argument("DenseTensor: value count does not match shape");
  }
};

// one N_j x k matrix per mode, all sharing the column count k
struct CPFactors {
  std::vector<Matrix> U;

  int order() const { return static_cast<int>(U.size()); }
  Eigen::Index width() const { return U.empty() ? 0 : U[0].cols(); }

  Shape shape() const {
    std::vector<std::int64_t> d;
    d.reserve(U.size());
    for (const Matrix& m : U) d.push_back(m.rows());
    return Shape(std::move(d));
  }

  void validate() const {
    if (U.empty()) throw std::invalid_argument("CPFactors: need at least one factor");
    for (const Matrix& m : U) {
      if (m.rows() < 1 || m.cols() < 1)
        throw std::invalid_argument("CPFactors: factors must be nonempty");
      if (m.cols() != width())
        throw std::invalid_argument("CPFactors: factors must share a column count");
    }
  }
};

// single entry of the composed tensor: sum over columns of the row products
inline double compose_at(const CPFactors& F, const Index& ix) {
  const Eigen::Index k = F.width();
  const int d = F.order();
  double total = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    double p = 1.0;
    for (int j = 0; j < d; ++j) p *= F.U[j](ix[j] - 1, c);
    total += p;
  }
  return total;
}

inline DenseTensor cp_compose(const CPFactors& F) {
  F.validate();
  DenseTensor T(F.shape());
  const std::int64_t n = T.shape.numel();
  Index ix(T.shape.order(), 1);
  for (std::int64_t off = 0; off < n; ++off) {
    T.values[static_cast<std::size_t>(off)] = compose_at(F, ix);
    next_index(T.shape, ix);
  }
  return T;
}

// Mode-i matricization: N_i rows; the remaining modes index the columns with
// the earliest of them varying fastest.
inline Matrix matricize_mode(const DenseTensor& T, int mode) {
  T.validate();
  const int d = T.shape.order();
  if (mode < 1 || mode > d) throw std::invalid_argument("matricize_mode: mode out of range");
  const std::int64_t rows = T.shape.dims[mode - 1];
  const std::int64_t cols = T.shape.numel() / rows;
  // column stride of mode k is the product of the dimensions of the
  // non-selected modes before it
  std::vector<std::int64_t> stride(d, 0);
  std::int64_t acc = 1;
  for (int k = 0; k < d; ++k) {
    if (k == mode - 1) continue;
    stride[k] = acc;
    acc *= T.shape.dims[k];
  }
  Matrix M(rows, cols);
  Index ix(d, 1);
  const std::int64_t n = T.shape.numel();
  for (std::int64_t off = 0; off < n; ++off) {
    std::int64_t col = 0;
    for (int k = 0; k < d; ++k)
      if (k != mode - 1) col += (ix[k] - 1) * stride[k];
    M(ix[mode - 1] - 1, col) = T.values[static_cast<std::size_t>(off)];
    next_index(T.shape, ix);
  }
  return M;
}

// Balanced unfolding: modes 1..j index the rows, modes j+1..d the columns,
// the earliest mode in each group varying fastest. For order 3 and j = 1
// this coincides with matricize_mode(T, 1).
inline std::pair<std::int64_t, std::int64_t> balanced_row_col(const Shape& s, int j,
                                                              const Index& ix) {
  const int d = s.order();
  if (d < 2 || j < 1 || j >= d) throw std::invalid_argument("balanced_row_col: split out of range");
  std::int64_t row = 0, rstride = 1;
  for (int k = 0; k < j; ++k) {
    row += (ix[k] - 1) * rstride;
    rstride *= s.dims[k];
  }
  std::int64_t col = 0, cstride = 1;
  for (int k = j; k < d; ++k) {
    col += (ix[k] - 1) * cstride;
    cstride *= s.dims[k];
  }
  return {row + 1, col + 1};
}

inline Matrix unfold_balanced(const DenseTensor& T, int j) {
  T.validate();
  const int d = T.shape.order();
  if (d < 2 || j < 1 || j >= d) throw std::invalid_argument("unfold_balanced: split out of range");
  std::int64_t rows = 1, cols = 1;
  for (int k = 0; k < j; ++k) rows *= T.shape.dims[k];
  for (int k = j; k < d; ++k) cols *= T.shape.dims[k];
  Matrix M(rows, cols);
  Index ix(d, 1);
  const std::int64_t n = T.shape.numel();
  for (std::int64_t off = 0; off < n; ++off) {
    auto [r, c] = balanced_row_col(T.shape, j, ix);
    M(r - 1, c - 1) = T.values[static_cast<std::size_t>(off)];
    next_index(T.shape, ix);
  }
  return M;
}

inline double inner(const DenseTensor& A, const DenseTensor& B) {
  if (A.shape != B.shape) throw std::invalid_argument("inner: shapes differ");
  return Eigen::Map<const Vector>(A.values.data(), A.values.size())
      .dot(Eigen::Map<const Vector>(B.values.data(), B.values.size()));
}

inline double frobenius(const DenseTensor& T) {
  return Eigen::Map<const Vector>(T.values.data(), T.values.size()).norm();
}

inline double infinity_norm(const DenseTensor& T) {
  return Eigen::Map<const Vector>(T.values.data(), T.values.size()).lpNorm<Eigen::Infinity>();
}

enum class FactorKind { gaussian, sign };

inline FactorKind factor_kind_from_string(const std::string& s) {
  if (s == "gaussian") return FactorKind::gaussian;
  if (s == "sign") return FactorKind::sign;
  throw std::invalid_argument("factor_kind: expected 'gaussian' or 'sign', got '" + s + "'");
}

inline const char* to_string(FactorKind k) {
  return k == FactorKind::gaussian ? "gaussian" : "sign";
}

struct LowRank {
  CPFactors factors;
  DenseTensor tensor;  // composed and rescaled to infinity norm exactly 1
};

// Draw width-r factors with i.i.d. gaussian or +-1 entries, compose, then
// rescale so the composed tensor has infinity norm exactly 1 (each factor
// absorbs an equal share of the scale).
inline LowRank random_low_rank(const Shape& shape, int rank, FactorKind kind,
                               std::uint64_t seed) {
  shape.validate();
  if (rank < 1) throw std::invalid_argument("random_low_rank: rank must be >= 1");
  Rng rng = make_rng(seed, "low_rank");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  CPFactors F;
  F.U.reserve(shape.dims.size());
  for (std::int64_t n : shape.dims) {
    Matrix U(n, rank);
    for (std::int64_t i = 0; i < n; ++i)
      for (int c = 0; c < rank; ++c)
        U(i, c) = kind == FactorKind::gaussian ? gauss(rng) : (coin(rng) ? 1.0 : -1.0);
    F.U.push_back(std::move(U));
  }
  DenseTensor T = cp_compose(F);
  const double s = infinity_norm(T);
  if (s == 0.0)
    throw std::runtime_error("random_low_rank: drew a tensor that is identically zero");
  for (double& v : T.values) v /= s;
  const double fscale = std::pow(s, -1.0 / shape.order());
  for (Matrix& U : F.U) U *= fscale;
  return {std::move(F), std::move(T)};
}

// Text format: line 1 the order d, line 2 the d dimensions, then one value
// per line in flat (last index fastest) order, 17 significant digits.
inline void write_tns(const DenseTensor& T, const std::string& path) {
  T.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_tns: cannot open '" + path + "' for writing");
  out << T.shape.order() << "\n";
  for (int j = 0; j < T.shape.order(); ++j)
    out << T.shape.dims[j] << (j + 1 < T.shape.order() ? " " : "\n");
  char buf[64];
  for (double v : T.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error("write_tns: write to '" + path + "' failed");
}

inline DenseTensor read_tns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_tns: cannot open '" + path + "'");
  int d = 0;
  if (!(in >> d) || d < 1) throw std::runtime_error("read_tns: bad order in '" + path + "'");
  std::vector<std::int64_t> dims(d);
  for (int j = 0; j < d; ++j)
    if (!(in >> dims[j]) || dims[j] < 1)
      throw std::runtime_error("read_tns: bad dimension in '" + path + "'");
  DenseTensor T{Shape(std::move(dims))};
  for (double& v : T.values)
    if (!(in >> v)) throw std::runtime_error("read_tns: too few values in '" + path + "'");
  double extra;
  if (in >> extra) throw std::runtime_error("read_tns: trailing values in '" + path + "'");
  return T;
}

}  // namespace maxq
