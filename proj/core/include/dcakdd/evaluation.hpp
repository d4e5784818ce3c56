#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcakdd/dca.hpp"
#include "dcakdd/record.hpp"

namespace dcakdd {

// Weighted confusion-matrix cells.
struct ConfusionCounts {
  double tp = 0.0;
  double fn = 0.0;
  double tn = 0.0;
  double fp = 0.0;

  double total() const { return tp + fn + tn + fp; }
  void add(BinaryLabel truth, BinaryLabel predicted, double weight = 1.0);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// A rate pair is empty (undefined) when its truth class has no weight.
struct ConfusionRates {
  std::optional<double> tp_rate;
  std::optional<double> tn_rate;
  std::optional<double> fp_rate;
  std::optional<double> fn_rate;

  static ConfusionRates from_counts(const ConfusionCounts& counts);

  friend bool operator==(const ConfusionRates&, const ConfusionRates&) = default;
};

// Per antigen type: anomalous instances / all instances, from the labels.
McavTable perfect_mcav(std::span<const ConnectionRecord> records);

// Number of records per antigen type.
std::map<std::string, std::uint64_t> type_instance_counts(std::span<const ConnectionRecord> records);

enum class Weighting {
  Instances,  // each type counts with its number of records
  Types,      // each type counts once
};

// Compares per-type predictions with per-type truth. Both maps must cover
// the same types; with Weighting::Instances every type also needs a weight.
ConfusionCounts confusion_counts(const std::map<std::string, BinaryLabel>& predicted,
                                 const std::map<std::string, BinaryLabel>& truth,
                                 const std::map<std::string, std::uint64_t>& weights,
                                 Weighting weighting = Weighting::Instances);

ConfusionRates confusion_rates(const std::map<std::string, BinaryLabel>& predicted,
                               const std::map<std::string, BinaryLabel>& truth,
                               const std::map<std::string, std::uint64_t>& weights,
                               Weighting weighting = Weighting::Instances);

struct RunResult {
  std::string configuration;
  std::uint64_t seed = 0;
  ConfusionRates rates;
};

// Mean of each rate across runs of one configuration. A rate undefined in
// any run stays undefined. Throws DomainError for an empty sequence or mixed
// configurations.
ConfusionRates average_runs(std::span<const RunResult> results);

// Mean of rates without the configuration check.
ConfusionRates average_rates(std::span<const ConfusionRates> rates);

}  // namespace dcakdd
