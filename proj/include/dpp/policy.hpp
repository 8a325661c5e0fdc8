#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpp/cost.hpp"
#include "dpp/errors.hpp"
#include "dpp/rng.hpp"

namespace dpp {

// Row-major |candidates| x |cost components| matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static CostMatrix column(std::span<const double> costs) {
    CostMatrix m(costs.size(), 1);
    std::copy(costs.begin(), costs.end(), m.data_.begin());
    return m;
  }

  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    CostMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw DimensionMismatch("ragged cost rows");
      std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * cols));
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values) {
    if (values.size() != cols_) throw DimensionMismatch("row width differs from matrix width");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct RationalityVector {
  std::vector<double> entries;

  RationalityVector() = default;
  explicit RationalityVector(std::vector<double> values) : entries(std::move(values)) { validate(); }

  std::size_t size() const noexcept { return entries.size(); }
  double operator[](std::size_t i) const { return entries[i]; }
  bool operator==(const RationalityVector&) const = default;

  void validate() const {
    for (double l : entries)
      if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("rationality entries must be finite and > 0");
  }
};

struct PolicyPMF {
  std::vector<double> probabilities;

  std::size_t size() const noexcept { return probabilities.size(); }
  double operator[](std::size_t i) const { return probabilities[i]; }
};

// p_r proportional to exp(-<lambda, C_r>). Exponents are shifted by their
// finite minimum before exponentiation; rows with an infinite entry get 0.
inline PolicyPMF build_joint_pmf(const CostMatrix& costs, const RationalityVector& lambda) {
  if (costs.cols() != lambda.size())
    throw DimensionMismatch("cost rows have " + std::to_string(costs.cols()) + " components, lambda has " +
                            std::to_string(lambda.size()));
  lambda.validate();

  std::vector<double> exponent(costs.rows(), kInfinity);
  double lowest = kInfinity;
  for (std::size_t r = 0; r < costs.rows(); ++r) {
    double e = 0.0;
    for (std::size_t c = 0; c < costs.cols(); ++c) {
      const double v = costs(r, c);
      if (std::isnan(v)) throw InvalidArgument("NaN cost in row " + std::to_string(r));
      if (v == kInfinity) {
        e = kInfinity;
        break;
      }
      e += lambda[c] * v;
    }
    exponent[r] = e;
    if (e < lowest) lowest = e;
  }
  if (!std::isfinite(lowest)) throw AllInfinite("every candidate has infinite cost");

  PolicyPMF pmf;
  pmf.probabilities.resize(costs.rows(), 0.0);
  // Neumaier-compensated normaliser.
  double total = 0.0;
  double carry = 0.0;
  for (std::size_t r = 0; r < costs.rows(); ++r) {
    if (!std::isfinite(exponent[r])) continue;
    const double w = std::exp(-(exponent[r] - lowest));
    pmf.probabilities[r] = w;
    const double next = total + w;
    carry += std::abs(total) >= w ? (total - next) + w : (w - next) + total;
    total = next;
  }
  total += carry;
  for (double& p : pmf.probabilities) p /= total;
  return pmf;
}

inline PolicyPMF build_pmf(std::span<const double> costs, double lambda) {
  return build_joint_pmf(CostMatrix::column(costs), RationalityVector({lambda}));
}

// Inverse-CDF draw over the stored order. The first index whose cumulative
// mass exceeds the uniform variate wins, so ties land on the lower index.
inline std::size_t sample(const PolicyPMF& pmf, Rng& rng) {
  if (pmf.probabilities.empty()) throw InvalidArgument("cannot sample an empty PMF");
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    const double p = pmf.probabilities[j];
    if (p <= 0.0) continue;
    last_positive = j;
    cumulative += p;
    if (u < cumulative) return j;
  }
  return last_positive;
}

}  // namespace dpp
