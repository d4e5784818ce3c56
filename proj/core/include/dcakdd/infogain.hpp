#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcakdd/record.hpp"

namespace dcakdd {

// Two-class entropy in bits, with 0*log2(0) = 0. Throws DomainError unless
// both proportions are non-negative and sum to 1 within 1e-9.
double entropy2(double p1, double p2);

// Entropy of a label multiset given its class counts.
double label_entropy(std::size_t normal, std::size_t anomalous);
double label_entropy(std::span<const BinaryLabel> labels);

// Information gain of a discrete attribute: entropy of the labels minus the
// size-weighted entropy of each value's subset. codes[i] is the attribute
// value of example i.
double info_gain(std::span<const std::int64_t> codes, std::span<const BinaryLabel> labels);

// Equal-width binning over the observed range. A constant attribute lands
// in a single bin.
std::vector<std::int64_t> discretize_equal_width(std::span<const double> values,
                                                 std::size_t bins = 10);

struct AttributeGain {
  std::string attribute;
  double gain = 0.0;
};

// Gain of all 41 KDD attributes, in schema order. Nominal columns use their
// symbols as values; continuous columns use 10 equal-width bins.
std::vector<AttributeGain> kdd_attribute_gains(std::span<const ConnectionRecord> records);

// Attributes with gain >= cutoff, sorted by descending gain (ties keep the
// input order).
std::vector<std::string> select_attributes(std::span<const AttributeGain> gains, double cutoff);
std::vector<std::string> select_attributes(std::span<const ConnectionRecord> records,
                                           double cutoff);

}  // namespace dcakdd
