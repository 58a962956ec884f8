#pragma once
// Sampling model: index distributions over the entries of a tensor, noisy
// point observations drawn with replacement, train/validate splitting, and
// a 1-based CSV interchange format.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maxq/rng.hpp"
#include "maxq/tensor.hpp"

namespace maxq {

enum class SamplingKind { uniform, weighted };

// distribution over entry positions; weights are flat (last index fastest),
// nonnegative, and sum to 1 within 1e-12
struct SamplingDistribution {
  Shape shape;
  SamplingKind kind = SamplingKind::uniform;
  std::vector<double> weights;  // used only when kind == weighted

  void validate() const {
    shape.validate();
    if (kind == SamplingKind::uniform) {
      if (!weights.empty())
        throw std::invalid_argument("SamplingDistribution: uniform takes no weights");
      return;
    }
    if (static_cast<std::int64_t>(weights.size()) != shape.numel())
      throw std::invalid_argument("SamplingDistribution: weight count does not match shape");
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("SamplingDistribution: weights must be >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("SamplingDistribution: weights must sum to 1");
  }
};

// multiset of observed positions with one value per slot; duplicates allowed
struct ObservationSet {
  Shape shape;
  std::vector<Index> indices;
  std::vector<double> values;

  std::int64_t size() const { return static_cast<std::int64_t>(indices.size()); }

  void validate() const {
    shape.validate();
    if (indices.size() != values.size())
      throw std::invalid_argument("ObservationSet: index/value counts differ");
    for (const Index& ix : indices) (void)flat_index(shape, ix);  // throws when out of range
  }
};

// m i.i.d. draws (with replacement) from the distribution
inline std::vector<Index> draw_indices(const SamplingDistribution& dist, std::int64_t m,
                                       std::uint64_t seed) {
  dist.validate();
  if (m < 0) throw std::invalid_argument("draw_indices: m must be >= 0");
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(m));
  Rng rng = make_rng(seed, "draw_indices");
  if (dist.kind == SamplingKind::uniform) {
    std::uniform_int_distribution<std::int64_t> pick(0, dist.shape.numel() - 1);
    for (std::int64_t t = 0; t < m; ++t) out.push_back(index_from_flat(dist.shape, pick(rng)));
    return out;
  }
  // inverse CDF on the running sums; zero-weight cells are never selected
  std::vector<double> cum(dist.weights.size());
  std::partial_sum(dist.weights.begin(), dist.weights.end(), cum.begin());
  cum.back() = 1.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::int64_t t = 0; t < m; ++t) {
    double u = unit(rng);
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::int64_t flat = std::min<std::int64_t>(it - cum.begin(),
                                               static_cast<std::int64_t>(cum.size()) - 1);
    out.push_back(index_from_flat(dist.shape, flat));
  }
  return out;
}

// evaluate the tensor at each slot and add i.i.d. gaussian noise of level
// sigma; duplicate slots get independent noise
inline ObservationSet observe(const DenseTensor& T, const std::vector<Index>& indices,
                              double sigma, std::uint64_t seed) {
  T.validate();
  if (sigma < 0.0) throw std::invalid_argument("observe: sigma must be >= 0");
  ObservationSet obs;
  obs.shape = T.shape;
  obs.indices = indices;
  obs.values.reserve(indices.size());
  Rng rng = make_rng(seed, "observe");
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const Index& ix : indices) obs.values.push_back(T.at(ix) + sigma * gauss(rng));
  obs.validate();
  return obs;
}

// disjoint partition of the slots; train gets round(fraction * m) of them,
// clamped so both sides stay nonempty
inline std::pair<ObservationSet, ObservationSet> split_train_validate(const ObservationSet& obs,
                                                                      double fraction,
                                                                      std::uint64_t seed) {
  obs.validate();
  const std::int64_t m = obs.size();
  if (m < 2) throw std::invalid_argument("split_train_validate: need at least 2 observations");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split_train_validate: fraction must lie in (0,1)");
  std::int64_t n_train = std::llround(fraction * static_cast<double>(m));
  n_train = std::clamp<std::int64_t>(n_train, 1, m - 1);
  std::vector<std::int64_t> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_rng(seed, "split");
  std::shuffle(perm.begin(), perm.end(), rng);
  ObservationSet train, val;
  train.shape = val.shape = obs.shape;
  for (std::int64_t t = 0; t < m; ++t) {
    ObservationSet& side = t < n_train ? train : val;
    side.indices.push_back(obs.indices[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])]);
    side.values.push_back(obs.values[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])]);
  }
  return {std::move(train), std::move(val)};
}

// noise level giving the requested signal-to-noise ratio in dB against the
// mean square entry of the tensor
inline double noise_level_from_db(const DenseTensor& T, double snr_db) {
  T.validate();
  const double f = frobenius(T);
  const double meansq = f * f / static_cast<double>(T.shape.numel());
  if (meansq == 0.0)
    throw std::invalid_argument("noise_level_from_db: zero tensor has no signal level");
  return std::sqrt(meansq * std::pow(10.0, -snr_db / 10.0));
}

// CSV interchange: header i1,...,id,value then one 1-based row per slot
inline void write_observations_csv(const ObservationSet& obs, const std::string& path) {
  obs.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_observations_csv: cannot open '" + path + "'");
  const int d = obs.shape.order();
  for (int j = 1; j <= d; ++j) out << "i" << j << ",";
  out << "value\n";
  char buf[64];
  for (std::size_t t = 0; t < obs.indices.size(); ++t) {
    for (int j = 0; j < d; ++j) out << obs.indices[t][static_cast<std::size_t>(j)] << ",";
    std::snprintf(buf, sizeof buf, "%.17g", obs.values[t]);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error("write_observations_csv: write to '" + path + "' failed");
}

inline ObservationSet read_observations_csv(const std::string& path, const Shape& shape) {
  shape.validate();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_observations_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_observations_csv: '" + path + "' is empty");
  // header must carry exactly one index column per mode
  {
    std::ostringstream expect;
    for (int j = 1; j <= shape.order(); ++j) expect << "i" << j << ",";
    expect << "value";
    std::string got = line;
    if (!got.empty() && got.back() == '\r') got.pop_back();
    if (got != expect.str())
      throw std::runtime_error("read_observations_csv: header '" + got + "' does not match shape (want '" +
                               expect.str() + "')");
  }
  ObservationSet obs;
  obs.shape = shape;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    Index ix(shape.order());
    std::string cell;
    for (int j = 0; j < shape.order(); ++j) {
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("read_observations_csv: short row at line " + std::to_string(lineno));
      ix[static_cast<std::size_t>(j)] = std::stoll(cell);
      if (ix[static_cast<std::size_t>(j)] < 1 || ix[static_cast<std::size_t>(j)] > shape.dims[static_cast<std::size_t>(j)])
        throw std::runtime_error("read_observations_csv: index out of range at line " + std::to_string(lineno));
    }
    if (!std::getline(row, cell, ','))
      throw std::runtime_error("read_observations_csv: missing value at line " + std::to_string(lineno));
    obs.indices.push_back(std::move(ix));
    obs.values.push_back(std::stod(cell));
  }
  obs.validate();
  return obs;
}

}  // namespace maxq
