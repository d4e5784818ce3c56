#include "dcakdd/experiment.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <system_error>

#include "dcakdd/antigen.hpp"
#include "dcakdd/errors.hpp"
#include "dcakdd/folds.hpp"
#include "dcakdd/infogain.hpp"
#include "dcakdd/window.hpp"

#ifndef DCAKDD_VERSION
#define DCAKDD_VERSION "unknown"
#endif

namespace dcakdd {

namespace {

using json = nlohmann::json;

constexpr std::string_view kBaselineCategory = "E1.1";

std::string_view weighting_name(Weighting w) {
  return w == Weighting::Instances ? "instances" : "types";
}

Weighting parse_weighting(const std::string& text) {
  if (text == "instances") return Weighting::Instances;
  if (text == "types") return Weighting::Types;
  throw ConfigError("weighting must be 'instances' or 'types', got '" + text + "'");
}

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> known,
                         std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read_if(const json& object, const char* key, T& out) {
  if (object.contains(key)) out = object.at(key).get<T>();
}

std::string number_text(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Signals and antigens shared by every DCA run of an experiment.
struct DcaInputs {
  SignalStream signals;
  AntigenStream antigens;
  std::map<std::string, BinaryLabel> truth;
  std::map<std::string, std::uint64_t> weights;
};

ConfigurationResult run_dca_point(const ExperimentConfig& config, const DcaInputs& inputs,
                                  std::span<const SignalTriple> windowed, std::string category,
                                  std::string parameter, std::int64_t multiplier,
                                  std::int64_t window, std::vector<std::string>& warnings,
                                  const ProgressFn& progress) {
  ConfigurationResult result;
  result.category = std::move(category);
  result.parameter = std::move(parameter);
  const std::string id = result.category + ":" + result.parameter;

  DcaParameters params = config.dca;
  params.multiplier = multiplier;
  params.window = window;

  for (auto seed : config.seeds) {
    if (progress) progress("running " + id + " seed " + std::to_string(seed));
    auto run = run_dca_on_streams(windowed, inputs.antigens, params, seed);

    auto predicted = classify_types(run.table, params.mcav_threshold);
    for (const auto& [type, label] : inputs.truth) {
      if (predicted.emplace(type, BinaryLabel::Normal).second) {
        warnings.push_back(id + " seed " + std::to_string(seed) + ": antigen type '" + type +
                           "' was never presented; counted as normal");
      }
    }
    result.runs.push_back(
        {id, seed, confusion_rates(predicted, inputs.truth, inputs.weights, config.weighting)});
    result.mcav_tables.push_back(std::move(run.table));
  }
  result.mean = average_runs(result.runs);
  return result;
}

std::vector<double> tp_rates(const ConfigurationResult& r) {
  std::vector<double> out;
  for (const auto& run : r.runs) {
    if (!run.rates.tp_rate) return {};
    out.push_back(*run.rates.tp_rate);
  }
  return out;
}

void compare_to_baseline(const ConfigurationResult& baseline, const ConfigurationResult& point,
                         double alpha, ExperimentReport& report) {
  const auto x = tp_rates(point);
  const auto y = tp_rates(baseline);
  if (x.empty() || y.empty()) {
    report.warnings.push_back(point.category + ":" + point.parameter +
                              ": TP rate undefined in some run; no significance test");
    return;
  }
  report.significance.push_back({point.category, point.parameter, baseline.category + ":" +
                                                                      baseline.parameter,
                                 mann_whitney_two_sided(x, y, alpha)});
}

void run_dca_experiment(const ExperimentConfig& config, std::span<const ConnectionRecord> records,
                        ExperimentReport& report, const ProgressFn& progress) {
  DcaInputs inputs;
  inputs.signals = build_signal_stream(records, report.signals);
  inputs.antigens = build_antigen_stream(records);
  report.perfect = perfect_mcav(records);
  inputs.truth = classify_types(report.perfect, config.dca.mcav_threshold);
  inputs.weights = type_instance_counts(records);

  const auto id = config.experiment;
  auto& warnings = report.warnings;

  if (id == ExperimentId::Custom) {
    const auto windowed = apply_time_window(inputs.signals, config.dca.window);
    report.configurations.push_back(run_dca_point(
        config, inputs, windowed, "custom",
        "k=" + std::to_string(config.dca.multiplier) + ",w=" + std::to_string(config.dca.window),
        config.dca.multiplier, config.dca.window, warnings, progress));
    return;
  }

  // The E1.1 base run is needed by every E1 family for the comparisons.
  auto baseline = run_dca_point(config, inputs, inputs.signals, std::string(kBaselineCategory),
                                "-", 1, 1, warnings, progress);
  const bool sweep_k = id == ExperimentId::E1 || id == ExperimentId::E1_2;
  const bool sweep_w = id == ExperimentId::E1 || id == ExperimentId::E1_3;

  std::vector<ConfigurationResult> points;
  if (sweep_k) {
    for (auto k : config.multipliers) {
      points.push_back(run_dca_point(config, inputs, inputs.signals, "E1.2", std::to_string(k), k,
                                     1, warnings, progress));
    }
  }
  if (sweep_w) {
    for (auto w : config.windows) {
      if (progress) progress("applying window " + std::to_string(w));
      const auto windowed = apply_time_window(inputs.signals, w);
      points.push_back(run_dca_point(config, inputs, windowed, "E1.3", std::to_string(w), 1, w,
                                     warnings, progress));
    }
  }
  for (const auto& p : points) compare_to_baseline(baseline, p, config.alpha, report);

  if (id == ExperimentId::E1 || id == ExperimentId::E1_1) {
    report.configurations.push_back(std::move(baseline));
  }
  for (auto& p : points) report.configurations.push_back(std::move(p));
}

void run_nsa_experiment(const ExperimentConfig& config, std::span<const ConnectionRecord> records,
                        ExperimentReport& report, const ProgressFn& progress) {
  const auto folds = kfold_split(records, config.folds, config.seeds.front());
  const auto attributes = report.signals.attributes();
  for (auto d : config.dimensions) {
    if (progress) progress("running E2 dimension " + std::to_string(d));
    auto nsa = run_nsa(records, attributes, d, folds, config.nsa, config.seeds);

    ConfigurationResult result;
    result.category = "E2";
    result.parameter = std::to_string(d);
    const std::string id = "E2:" + result.parameter;
    for (const auto& f : nsa.folds) {
      if (f.skipped) {
        report.warnings.push_back(id + " fold " + std::to_string(f.fold) +
                                  ": no normal training instances; fold skipped");
        continue;
      }
      if (f.budget_exhausted) {
        report.warnings.push_back(id + " fold " + std::to_string(f.fold) + ": generated " +
                                  std::to_string(f.detectors) + " of " +
                                  std::to_string(config.nsa.detector_count) +
                                  " detectors before the attempt budget ran out");
      }
      result.runs.push_back({id, f.seed, f.rates});
    }
    result.mean = nsa.mean;
    result.nsa = std::move(nsa);
    report.configurations.push_back(std::move(result));
  }
}

std::string rates_columns(const ConfusionRates& r) {
  return format_rate(r.tp_rate) + '\t' + format_rate(r.tn_rate) + '\t' + format_rate(r.fp_rate) +
         '\t' + format_rate(r.fn_rate);
}

std::string file_token(std::string text) {
  for (auto& c : text) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')) c = '_';
  }
  return text;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

std::string_view library_version() { return DCAKDD_VERSION; }

std::string_view to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::E1:
      return "E1";
    case ExperimentId::E1_1:
      return "E1.1";
    case ExperimentId::E1_2:
      return "E1.2";
    case ExperimentId::E1_3:
      return "E1.3";
    case ExperimentId::E2:
      return "E2";
    case ExperimentId::Custom:
      return "custom";
  }
  return "?";
}

ExperimentId parse_experiment_id(std::string_view text) {
  for (auto id : {ExperimentId::E1, ExperimentId::E1_1, ExperimentId::E1_2, ExperimentId::E1_3,
                  ExperimentId::E2, ExperimentId::Custom}) {
    if (to_string(id) == text) return id;
  }
  throw ConfigError("unknown experiment '" + std::string(text) +
                    "' (expected E1, E1.1, E1.2, E1.3, E2 or custom)");
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("the seed list is empty");
  dca.validate();
  nsa.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");

  const bool sweep_k = experiment == ExperimentId::E1 || experiment == ExperimentId::E1_2;
  const bool sweep_w = experiment == ExperimentId::E1 || experiment == ExperimentId::E1_3;
  if (sweep_k && multipliers.empty()) throw ConfigError("the multiplier sweep is empty");
  if (sweep_w && windows.empty()) throw ConfigError("the window sweep is empty");
  for (auto k : multipliers) {
    if (k < 1) throw ConfigError("sweep multiplier " + std::to_string(k) + " is below 1");
  }
  for (auto w : windows) {
    if (w < 1) throw ConfigError("sweep window " + std::to_string(w) + " is below 1");
  }
  if (experiment == ExperimentId::E2) {
    if (dimensions.empty()) throw ConfigError("the dimension sweep is empty");
    for (auto d : dimensions) {
      if (d < 1) throw ConfigError("sweep dimension must be >= 1");
    }
    if (folds < 2) throw ConfigError("E2 needs at least 2 folds");
  }
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = std::string(to_string(experiment));
  j["data"] = data_path.string();
  j["signal_config"] = signal_config_path.string();
  j["seeds"] = seeds;
  j["dca"] = {
      {"population", dca.population},
      {"threshold_range", {dca.threshold_lower, dca.threshold_upper}},
      {"cells_per_step", dca.cells_per_step},
      {"multiplier", dca.multiplier},
      {"window", dca.window},
      {"weights", dca.weights.weights},
      {"mcav_threshold", dca.mcav_threshold},
  };
  j["sweeps"] = {{"multipliers", multipliers}, {"windows", windows}, {"dimensions", dimensions}};
  j["nsa"] = {
      {"self_radius", nsa.self_radius},
      {"detector_radius", nsa.detector_radius},
      {"detector_count", nsa.detector_count},
      {"attempt_budget", nsa.effective_budget()},
  };
  j["folds"] = folds;
  j["alpha"] = alpha;
  j["weighting"] = std::string(weighting_name(weighting));
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    reject_unknown_keys(j,
                        {"experiment", "data", "signal_config", "seeds", "dca", "sweeps", "nsa",
                         "folds", "alpha", "weighting"},
                        "experiment config");
    if (j.contains("experiment")) c.experiment = parse_experiment_id(j.at("experiment").get<std::string>());
    if (j.contains("data")) c.data_path = j.at("data").get<std::string>();
    if (j.contains("signal_config")) c.signal_config_path = j.at("signal_config").get<std::string>();
    read_if(j, "seeds", c.seeds);
    read_if(j, "folds", c.folds);
    read_if(j, "alpha", c.alpha);
    if (j.contains("weighting")) c.weighting = parse_weighting(j.at("weighting").get<std::string>());

    if (j.contains("dca")) {
      const auto& d = j.at("dca");
      reject_unknown_keys(d,
                          {"population", "threshold_range", "cells_per_step", "multiplier",
                           "window", "weights", "mcav_threshold"},
                          "dca");
      read_if(d, "population", c.dca.population);
      read_if(d, "cells_per_step", c.dca.cells_per_step);
      read_if(d, "multiplier", c.dca.multiplier);
      read_if(d, "window", c.dca.window);
      read_if(d, "mcav_threshold", c.dca.mcav_threshold);
      read_if(d, "weights", c.dca.weights.weights);
      if (d.contains("threshold_range")) {
        const auto range = d.at("threshold_range").get<std::vector<double>>();
        if (range.size() != 2) throw ConfigError("dca.threshold_range needs two numbers");
        c.dca.threshold_lower = range[0];
        c.dca.threshold_upper = range[1];
      }
    }
    if (j.contains("sweeps")) {
      const auto& s = j.at("sweeps");
      reject_unknown_keys(s, {"multipliers", "windows", "dimensions"}, "sweeps");
      read_if(s, "multipliers", c.multipliers);
      read_if(s, "windows", c.windows);
      read_if(s, "dimensions", c.dimensions);
    }
    if (j.contains("nsa")) {
      const auto& n = j.at("nsa");
      reject_unknown_keys(n, {"self_radius", "detector_radius", "detector_count", "attempt_budget"},
                          "nsa");
      read_if(n, "self_radius", c.nsa.self_radius);
      read_if(n, "detector_radius", c.nsa.detector_radius);
      read_if(n, "detector_count", c.nsa.detector_count);
      read_if(n, "attempt_budget", c.nsa.attempt_budget);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open experiment config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::span<const ConnectionRecord> records,
                                const ProgressFn& progress) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.record_count = records.size();
  if (records.empty()) throw ConfigError("the data set has no records");

  report.signals = config.signal_config_path.empty()
                       ? default_signal_config(records)
                       : AttributeRangeConfig::load(config.signal_config_path);
  SignalMapper validate_signals(report.signals);

  if (config.experiment == ExperimentId::E2) {
    for (auto d : config.dimensions) {
      if (d > report.signals.entries().size()) {
        throw ConfigError("E2 dimension " + std::to_string(d) + " exceeds the " +
                          std::to_string(report.signals.entries().size()) +
                          " configured signal attributes");
      }
    }
    run_nsa_experiment(config, records, report, progress);
  } else {
    run_dca_experiment(config, records, report, progress);
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  if (progress) progress("reading " + config.data_path.string());
  const auto records = read_kdd_file(config.data_path);
  return run_experiment(config, records, progress);
}

std::string format_rate(const std::optional<double>& rate) {
  return rate ? number_text(*rate) : std::string("NA");
}

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& directory) {
  if (report.configurations.empty()) throw DomainError("report has no results");

  std::error_code ec;
  std::filesystem::create_directories(directory / "mcav", ec);
  if (ec) throw IoError("cannot create '" + directory.string() + "': " + ec.message());

  std::ostringstream table, runs, roc;
  table << "category\tparameter\ttp\ttn\tfp\tfn\n";
  runs << "category\tparameter\tseed\ttp\ttn\tfp\tfn\n";
  roc << "fp_rate\ttp_rate\tlabel\n";
  for (const auto& c : report.configurations) {
    table << c.category << '\t' << c.parameter << '\t' << rates_columns(c.mean) << '\n';
    for (const auto& r : c.runs) {
      runs << c.category << '\t' << c.parameter << '\t' << r.seed << '\t' << rates_columns(r.rates)
           << '\n';
    }
    roc << format_rate(c.mean.fp_rate) << '\t' << format_rate(c.mean.tp_rate) << '\t'
        << c.category << ':' << c.parameter << '\n';
  }
  write_file_atomically(directory / "table.tsv", table.str());
  write_file_atomically(directory / "runs.tsv", runs.str());
  write_file_atomically(directory / "roc_points.tsv", roc.str());

  if (!report.significance.empty()) {
    std::ostringstream sig;
    sig << "category\tparameter\tbaseline\tu\tp_value\texact\treject\n";
    for (const auto& s : report.significance) {
      sig << s.category << '\t' << s.parameter << '\t' << s.baseline << '\t' << number_text(s.test.u)
          << '\t' << number_text(s.test.p_value) << '\t' << (s.test.exact ? "yes" : "no") << '\t'
          << (s.test.reject ? "yes" : "no") << '\n';
    }
    write_file_atomically(directory / "significance.tsv", sig.str());
  }

  const double threshold = report.config.dca.mcav_threshold;
  if (!report.perfect.empty()) {
    std::ostringstream out;
    write_mcav_table(report.perfect, threshold, out);
    write_file_atomically(directory / "mcav" / "perfect.tsv", out.str());
  }
  for (const auto& c : report.configurations) {
    for (std::size_t i = 0; i < c.mcav_tables.size(); ++i) {
      std::ostringstream out;
      write_mcav_table(c.mcav_tables[i], threshold, out);
      const auto name = file_token(c.category) + "_" + file_token(c.parameter) + "_seed" +
                        std::to_string(c.runs[i].seed) + ".tsv";
      write_file_atomically(directory / "mcav" / name, out.str());
    }
  }

  {
    std::ostringstream out;
    report.signals.write(out);
    write_file_atomically(directory / "signals.cfg", out.str());
  }

  std::ostringstream prov;
  prov << "# generated " << timestamp_utc() << '\n';
  prov << "software dcakdd " << library_version() << '\n';
  prov << "experiment " << to_string(report.config.experiment) << '\n';
  prov << "records " << report.record_count << '\n';
  prov << "seeds";
  for (auto s : report.config.seeds) prov << ' ' << s;
  prov << '\n';
  prov << "config\n" << report.config.to_json() << '\n';
  prov << "warnings " << report.warnings.size() << '\n';
  for (const auto& w : report.warnings) prov << "  " << w << '\n';
  prov << "reference C4.5 tp_rate " << number_text(kC45ReferenceTpRate) << " fp_rate "
       << number_text(kC45ReferenceFpRate) << '\n';
  write_file_atomically(directory / "provenance.txt", prov.str());
}

void emit_infogain(std::span<const ConnectionRecord> records,
                   const std::filesystem::path& destination) {
  auto gains = kdd_attribute_gains(records);
  std::stable_sort(gains.begin(), gains.end(),
                   [](const auto& a, const auto& b) { return a.gain > b.gain; });
  const auto defaults = default_signal_attributes();
  std::ostringstream out;
  out << "attribute\tgain\tdefault_signal\n";
  for (const auto& g : gains) {
    const bool flagged = std::find(defaults.begin(), defaults.end(), g.attribute) != defaults.end();
    out << g.attribute << '\t' << number_text(g.gain) << '\t' << (flagged ? "yes" : "no") << '\n';
  }
  if (destination.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(destination.parent_path(), ec);
  }
  write_file_atomically(destination, out.str());
}

}  // namespace dcakdd
