#include "dcakdd/minmax.hpp"

#include <algorithm>

#include "dcakdd/errors.hpp"

namespace dcakdd {

MinMaxScaler MinMaxScaler::fit(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw DomainError("min-max fit needs at least one row");
  MinMaxScaler scaler;
  scaler.lower_ = rows.front();
  scaler.upper_ = rows.front();
  for (const auto& row : rows) {
    if (row.size() != scaler.lower_.size()) {
      throw DomainError("min-max fit rows differ in dimension");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      scaler.lower_[j] = std::min(scaler.lower_[j], row[j]);
      scaler.upper_[j] = std::max(scaler.upper_[j], row[j]);
    }
  }
  return scaler;
}

MinMaxScaler MinMaxScaler::from_bounds(std::vector<double> lower, std::vector<double> upper) {
  if (lower.size() != upper.size()) throw DomainError("min-max bounds differ in dimension");
  MinMaxScaler scaler;
  scaler.lower_ = std::move(lower);
  scaler.upper_ = std::move(upper);
  return scaler;
}

double MinMaxScaler::scale(double value, std::size_t attribute) const {
  const double lo = lower_[attribute];
  const double hi = upper_[attribute];
  if (!(hi > lo)) return 0.0;
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<double> MinMaxScaler::transform(std::span<const double> row) const {
  if (row.size() != dimension()) throw DomainError("min-max transform dimension mismatch");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = scale(row[j], j);
  return out;
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  if (values.empty()) throw DomainError("min-max normalization of an empty attribute");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(values.size(), 0.0);
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
  return out;
}

}  // namespace dcakdd
