#include "dcakdd/infogain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "dcakdd/errors.hpp"

namespace dcakdd {

namespace {

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

struct ClassCounts {
  std::size_t normal = 0;
  std::size_t anomalous = 0;
  std::size_t total() const { return normal + anomalous; }
  void add(BinaryLabel label) {
    (label == BinaryLabel::Normal ? normal : anomalous) += 1;
  }
};

}  // namespace

double entropy2(double p1, double p2) {
  if (p1 < 0.0 || p2 < 0.0 || std::abs(p1 + p2 - 1.0) > 1e-9) {
    throw DomainError("entropy2: proportions must be non-negative and sum to 1");
  }
  return plogp(p1) + plogp(p2);
}

double label_entropy(std::size_t normal, std::size_t anomalous) {
  const std::size_t n = normal + anomalous;
  if (n == 0) return 0.0;
  const double p = static_cast<double>(normal) / static_cast<double>(n);
  return entropy2(p, 1.0 - p);
}

double label_entropy(std::span<const BinaryLabel> labels) {
  ClassCounts c;
  for (auto l : labels) c.add(l);
  return label_entropy(c.normal, c.anomalous);
}

double info_gain(std::span<const std::int64_t> codes, std::span<const BinaryLabel> labels) {
  if (codes.size() != labels.size()) {
    throw DomainError("info_gain: value and label sequences differ in length");
  }
  if (codes.empty()) throw DomainError("info_gain: no examples");

  ClassCounts all;
  std::unordered_map<std::int64_t, ClassCounts> by_value;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    all.add(labels[i]);
    by_value[codes[i]].add(labels[i]);
  }

  const double n = static_cast<double>(all.total());
  double conditional = 0.0;
  for (const auto& [value, c] : by_value) {
    conditional += static_cast<double>(c.total()) / n * label_entropy(c.normal, c.anomalous);
  }
  // Rounding can push a zero gain slightly negative.
  return std::max(0.0, label_entropy(all.normal, all.anomalous) - conditional);
}

std::vector<std::int64_t> discretize_equal_width(std::span<const double> values,
                                                 std::size_t bins) {
  if (bins == 0) throw DomainError("discretize_equal_width: zero bins");
  std::vector<std::int64_t> codes(values.size(), 0);
  if (values.empty()) return codes;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double width = (*hi_it - lo) / static_cast<double>(bins);
  if (!(width > 0.0)) return codes;
  const auto last = static_cast<std::int64_t>(bins) - 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bin = static_cast<std::int64_t>(std::floor((values[i] - lo) / width));
    codes[i] = std::clamp<std::int64_t>(bin, 0, last);
  }
  return codes;
}

std::vector<AttributeGain> kdd_attribute_gains(std::span<const ConnectionRecord> records) {
  const auto labels = binary_labels(records);
  const auto& schema = kdd_attributes();
  std::vector<AttributeGain> gains;
  gains.reserve(schema.size());

  std::vector<std::int64_t> codes(records.size());
  std::vector<double> column(records.size());
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (records.empty()) {
      gains.push_back({std::string(schema[a].name), 0.0});
      continue;
    }
    if (schema[a].kind == AttributeKind::Nominal) {
      std::map<std::string, std::int64_t> ids;
      for (std::size_t i = 0; i < records.size(); ++i) {
        auto [it, inserted] = ids.try_emplace(records[i].symbol(a),
                                              static_cast<std::int64_t>(ids.size()));
        codes[i] = it->second;
      }
    } else {
      for (std::size_t i = 0; i < records.size(); ++i) column[i] = records[i].value(a);
      codes = discretize_equal_width(column, 10);
    }
    gains.push_back({std::string(schema[a].name), info_gain(codes, labels)});
  }
  return gains;
}

std::vector<std::string> select_attributes(std::span<const AttributeGain> gains, double cutoff) {
  std::vector<AttributeGain> kept;
  for (const auto& g : gains) {
    if (g.gain >= cutoff) kept.push_back(g);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.gain > b.gain; });
  std::vector<std::string> names;
  names.reserve(kept.size());
  for (auto& g : kept) names.push_back(std::move(g.attribute));
  return names;
}

std::vector<std::string> select_attributes(std::span<const ConnectionRecord> records,
                                           double cutoff) {
  const auto gains = kdd_attribute_gains(records);
  return select_attributes(gains, cutoff);
}

}  // namespace dcakdd
