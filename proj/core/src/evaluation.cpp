#include "dcakdd/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "dcakdd/antigen.hpp"
#include "dcakdd/errors.hpp"

namespace dcakdd {

void ConfusionCounts::add(BinaryLabel truth, BinaryLabel predicted, double weight) {
  if (truth == BinaryLabel::Anomalous) {
    (predicted == BinaryLabel::Anomalous ? tp : fn) += weight;
  } else {
    (predicted == BinaryLabel::Anomalous ? fp : tn) += weight;
  }
}

ConfusionRates ConfusionRates::from_counts(const ConfusionCounts& c) {
  ConfusionRates r;
  if (const double positives = c.tp + c.fn; positives > 0.0) {
    r.tp_rate = c.tp / positives;
    r.fn_rate = c.fn / positives;
  }
  if (const double negatives = c.tn + c.fp; negatives > 0.0) {
    r.tn_rate = c.tn / negatives;
    r.fp_rate = c.fp / negatives;
  }
  return r;
}

McavTable perfect_mcav(std::span<const ConnectionRecord> records) {
  std::map<std::string, PresentationTally> tallies;
  for (const auto& r : records) {
    auto& t = tallies[derive_antigen_type(r).id];
    ++t.total;
    if (r.binary_label() == BinaryLabel::Anomalous) ++t.mature;
  }
  McavTable::Entries entries;
  for (const auto& [type, t] : tallies) {
    entries.emplace(type, McavEntry{t.total, t.mature,
                                    static_cast<double>(t.mature) / static_cast<double>(t.total)});
  }
  return McavTable(std::move(entries));
}

std::map<std::string, std::uint64_t> type_instance_counts(std::span<const ConnectionRecord> records) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& r : records) ++counts[derive_antigen_type(r).id];
  return counts;
}

ConfusionCounts confusion_counts(const std::map<std::string, BinaryLabel>& predicted,
                                 const std::map<std::string, BinaryLabel>& truth,
                                 const std::map<std::string, std::uint64_t>& weights,
                                 Weighting weighting) {
  if (predicted.size() != truth.size()) {
    throw DomainError("predicted and truth labels cover different antigen types");
  }
  ConfusionCounts counts;
  for (const auto& [type, truth_label] : truth) {
    const auto p = predicted.find(type);
    if (p == predicted.end()) {
      throw DomainError("antigen type '" + type + "' has no prediction");
    }
    double weight = 1.0;
    if (weighting == Weighting::Instances) {
      const auto w = weights.find(type);
      if (w == weights.end()) throw DomainError("antigen type '" + type + "' has no weight");
      weight = static_cast<double>(w->second);
    }
    counts.add(truth_label, p->second, weight);
  }
  return counts;
}

ConfusionRates confusion_rates(const std::map<std::string, BinaryLabel>& predicted,
                               const std::map<std::string, BinaryLabel>& truth,
                               const std::map<std::string, std::uint64_t>& weights,
                               Weighting weighting) {
  return ConfusionRates::from_counts(confusion_counts(predicted, truth, weights, weighting));
}

ConfusionRates average_rates(std::span<const ConfusionRates> rates) {
  if (rates.empty()) throw DomainError("cannot average zero runs");
  using Field = std::optional<double> ConfusionRates::*;
  constexpr Field kFields[] = {&ConfusionRates::tp_rate, &ConfusionRates::tn_rate,
                               &ConfusionRates::fp_rate, &ConfusionRates::fn_rate};
  ConfusionRates mean;
  std::vector<double> values;
  for (Field f : kFields) {
    values.clear();
    for (const auto& r : rates) {
      if (!(r.*f)) break;
      values.push_back(*(r.*f));
    }
    if (values.size() != rates.size()) continue;
    // Sorted summation makes the mean independent of run order.
    std::sort(values.begin(), values.end());
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    mean.*f = sum / static_cast<double>(values.size());
  }
  return mean;
}

ConfusionRates average_runs(std::span<const RunResult> results) {
  if (results.empty()) throw DomainError("cannot average zero runs");
  std::vector<ConfusionRates> rates;
  rates.reserve(results.size());
  for (const auto& r : results) {
    if (r.configuration != results.front().configuration) {
      throw DomainError("average_runs: results mix configurations '" +
                        results.front().configuration + "' and '" + r.configuration + "'");
    }
    rates.push_back(r.rates);
  }
  return average_rates(rates);
}

}  // namespace dcakdd
