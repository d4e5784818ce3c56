#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcakdd {

// Per-attribute min-max scaling into [0,1].
//
// Bounds come from a training split and are applied to any split. Values
// outside the training range are clamped; a constant attribute maps to 0.
class MinMaxScaler {
 public:
  MinMaxScaler() = default;

  // rows: points of equal dimension. Needs at least one row.
  static MinMaxScaler fit(std::span<const std::vector<double>> rows);
  static MinMaxScaler from_bounds(std::vector<double> lower, std::vector<double> upper);

  std::size_t dimension() const { return lower_.size(); }
  double lower(std::size_t attribute) const { return lower_[attribute]; }
  double upper(std::size_t attribute) const { return upper_[attribute]; }

  double scale(double value, std::size_t attribute) const;
  std::vector<double> transform(std::span<const double> row) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// Fits and applies min-max scaling to one attribute's values.
std::vector<double> minmax_normalize(std::span<const double> values);

}  // namespace dcakdd
