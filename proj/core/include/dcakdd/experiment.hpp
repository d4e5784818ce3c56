#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcakdd/dca.hpp"
#include "dcakdd/evaluation.hpp"
#include "dcakdd/mann_whitney.hpp"
#include "dcakdd/nsa.hpp"
#include "dcakdd/record.hpp"
#include "dcakdd/signals.hpp"

namespace dcakdd {

std::string_view library_version();

// E1 runs all three DCA families; Custom is a single DCA configuration.
enum class ExperimentId { E1, E1_1, E1_2, E1_3, E2, Custom };

std::string_view to_string(ExperimentId id);
ExperimentId parse_experiment_id(std::string_view text);

// Reference rates of the C4.5 decision tree on the same data. Echoed in
// reports for comparison; never computed here.
inline constexpr double kC45ReferenceTpRate = 0.988;
inline constexpr double kC45ReferenceFpRate = 0.008;

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::E1_1;
  std::filesystem::path data_path;
  std::filesystem::path signal_config_path;  // empty: defaults fitted to the data
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  DcaParameters dca;
  std::vector<std::int64_t> multipliers{5, 10, 50, 100};
  std::vector<std::int64_t> windows{2, 3, 5, 7, 10, 100, 1000};

  NsaParameters nsa;
  std::vector<std::size_t> dimensions{2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t folds = 10;

  double alpha = 0.05;
  Weighting weighting = Weighting::Instances;

  // Throws ConfigError for invalid values or sweeps.
  void validate() const;

  // JSON with every field; from_json accepts any subset and rejects
  // unknown keys.
  std::string to_json() const;
  static ExperimentConfig from_json(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
};

// Averaged result of one sweep point plus its per-seed runs.
struct ConfigurationResult {
  std::string category;   // E1.1, E1.2, E1.3, E2, custom
  std::string parameter;  // multiplier, window, dimension, or "-"
  std::vector<RunResult> runs;
  ConfusionRates mean;
  std::vector<McavTable> mcav_tables;  // per seed, DCA only
  std::optional<NsaResult> nsa;
};

struct SignificanceResult {
  std::string category;
  std::string parameter;
  std::string baseline;
  MannWhitneyResult test;
};

struct ExperimentReport {
  ExperimentConfig config;
  AttributeRangeConfig signals;
  std::size_t record_count = 0;
  McavTable perfect;  // DCA experiments only
  std::vector<ConfigurationResult> configurations;
  std::vector<SignificanceResult> significance;
  std::vector<std::string> warnings;
};

using ProgressFn = std::function<void(std::string_view)>;

// Runs the configured experiment on already loaded records.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::span<const ConnectionRecord> records,
                                const ProgressFn& progress = {});

// Loads config.data_path first; unreadable data raises IoError.
ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

// Writes into `directory` (created if needed), each file atomically:
//   table.tsv         averaged rows: category, parameter, tp, tn, fp, fn
//   runs.tsv          per-seed rows (per-fold for E2)
//   roc_points.tsv    fp_rate, tp_rate, label
//   significance.tsv  Mann-Whitney comparisons, when any
//   mcav/*.tsv        perfect MCAV and per-seed DCA tables
//   signals.cfg       the signal configuration used
//   provenance.txt    timestamp, version, config echo, seeds, references
// Only provenance.txt carries a timestamp. Throws DomainError when the
// report has no results, IoError when a file cannot be written.
void emit_report(const ExperimentReport& report, const std::filesystem::path& directory);

// attribute, gain, default_signal (yes/no), sorted by descending gain.
void emit_infogain(std::span<const ConnectionRecord> records,
                   const std::filesystem::path& destination);

// Writes `content` to a temporary sibling, then renames it into place.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip text for a rate, "NA" when undefined.
std::string format_rate(const std::optional<double>& rate);

}  // namespace dcakdd
