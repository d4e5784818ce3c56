#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dcakdd/antigen.hpp"
#include "dcakdd/errors.hpp"
#include "dcakdd/experiment.hpp"
#include "dcakdd/folds.hpp"
#include "dcakdd/window.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kParse = 3, kIo = 4 };

struct CommonOptions {
  std::string data;
  std::string config;
  std::string signals;
  std::string out;
  std::vector<std::uint64_t> seeds;
  int verbosity = 0;
};

struct SweepOptions {
  std::optional<std::string> experiment;
  std::vector<std::int64_t> multipliers;
  std::vector<std::int64_t> windows;
  std::vector<std::size_t> dimensions;
  std::optional<std::size_t> folds;
  std::optional<std::size_t> detectors;
  std::optional<std::int64_t> multiplier;
  std::optional<std::int64_t> window;
  std::optional<double> mcav_threshold;
  std::optional<std::string> weighting;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_out_dir) {
  cmd->add_option("-d,--data", opt.data, "KDD 99 data file (plain or gzip)");
  cmd->add_option("-c,--config", opt.config, "experiment configuration (JSON)");
  cmd->add_option("-s,--signals", opt.signals, "signal attribute range file");
  auto* out = cmd->add_option("-o,--out", opt.out,
                              needs_out_dir ? "report directory" : "output file");
  out->required();
  cmd->add_option("--seeds", opt.seeds, "seed list, e.g. 1,2,3")->delimiter(',');
  cmd->add_flag("-v,--verbose", opt.verbosity, "progress on stderr (repeat for more)");
}

dcakdd::ExperimentConfig build_config(const CommonOptions& opt, const SweepOptions& sweep,
                                      std::optional<dcakdd::ExperimentId> id) {
  auto config = opt.config.empty() ? dcakdd::ExperimentConfig{}
                                   : dcakdd::ExperimentConfig::load(opt.config);
  if (id) config.experiment = *id;
  if (!opt.data.empty()) config.data_path = opt.data;
  if (!opt.signals.empty()) config.signal_config_path = opt.signals;
  if (!opt.seeds.empty()) config.seeds = opt.seeds;
  if (!sweep.multipliers.empty()) config.multipliers = sweep.multipliers;
  if (!sweep.windows.empty()) config.windows = sweep.windows;
  if (!sweep.dimensions.empty()) config.dimensions = sweep.dimensions;
  if (sweep.folds) config.folds = *sweep.folds;
  if (sweep.detectors) config.nsa.detector_count = *sweep.detectors;
  if (sweep.multiplier) config.dca.multiplier = *sweep.multiplier;
  if (sweep.window) config.dca.window = *sweep.window;
  if (sweep.mcav_threshold) config.dca.mcav_threshold = *sweep.mcav_threshold;
  if (sweep.weighting) {
    config.weighting =
        *sweep.weighting == "types" ? dcakdd::Weighting::Types : dcakdd::Weighting::Instances;
  }
  if (config.data_path.empty()) throw dcakdd::ConfigError("no data file given (--data)");
  return config;
}

dcakdd::ProgressFn progress_for(int verbosity) {
  if (verbosity <= 0) return {};
  return [](std::string_view message) { std::cerr << "dcakdd: " << message << '\n'; };
}

// --experiment wins; otherwise a DCA family named in the config file, else E1.
dcakdd::ExperimentId e1_family(const CommonOptions& opt, const SweepOptions& sweep) {
  if (sweep.experiment) return dcakdd::parse_experiment_id(*sweep.experiment);
  if (!opt.config.empty()) {
    const auto id = dcakdd::ExperimentConfig::load(opt.config).experiment;
    if (id != dcakdd::ExperimentId::E2 && id != dcakdd::ExperimentId::Custom) return id;
  }
  return dcakdd::ExperimentId::E1;
}

int run_report(const CommonOptions& opt, const SweepOptions& sweep,
               std::optional<dcakdd::ExperimentId> id) {
  const auto config = build_config(opt, sweep, id);
  const auto report = dcakdd::run_experiment(config, progress_for(opt.verbosity));
  dcakdd::emit_report(report, opt.out);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';

  std::cout << "category\tparameter\ttp\ttn\tfp\tfn\n";
  for (const auto& c : report.configurations) {
    std::cout << c.category << '\t' << c.parameter << '\t' << dcakdd::format_rate(c.mean.tp_rate)
              << '\t' << dcakdd::format_rate(c.mean.tn_rate) << '\t'
              << dcakdd::format_rate(c.mean.fp_rate) << '\t'
              << dcakdd::format_rate(c.mean.fn_rate) << '\n';
  }
  return kOk;
}

struct ExportOptions {
  std::string what;
  std::int64_t window = 1;
  std::size_t dimension = 2;
  std::size_t fold = 0;
};

int run_export(const CommonOptions& opt, const SweepOptions& sweep, const ExportOptions& ex) {
  auto config = build_config(opt, sweep, std::nullopt);
  const auto records = dcakdd::read_kdd_file(config.data_path);
  const auto signals = config.signal_config_path.empty()
                           ? dcakdd::default_signal_config(records)
                           : dcakdd::AttributeRangeConfig::load(config.signal_config_path);
  std::ostringstream out;
  if (ex.what == "signals") {
    const auto stream = dcakdd::build_signal_stream(records, signals);
    dcakdd::write_signal_stream(dcakdd::apply_time_window(stream, ex.window), out);
  } else if (ex.what == "antigens") {
    dcakdd::write_antigen_stream(dcakdd::build_antigen_stream(records), out);
  } else if (ex.what == "folds") {
    dcakdd::write_fold_assignment(
        dcakdd::kfold_split(records, config.folds, config.seeds.front()), out);
  } else if (ex.what == "signal-config") {
    signals.write(out);
  } else {
    const auto folds = dcakdd::kfold_split(records, config.folds, config.seeds.front());
    if (ex.fold >= folds.k()) {
      throw dcakdd::ConfigError("fold " + std::to_string(ex.fold) + " outside [0, " +
                                std::to_string(folds.k()) + ")");
    }
    config.nsa.keep_detectors = true;
    const auto attributes = signals.attributes();
    const auto nsa =
        dcakdd::run_nsa(records, attributes, ex.dimension, folds, config.nsa, config.seeds);
    const auto& fr = nsa.folds[ex.fold];
    if (!fr.detector_set) throw dcakdd::DomainError("fold has no normal training instances");
    dcakdd::write_detectors(*fr.detector_set, out);
  }
  dcakdd::write_file_atomically(opt.out, out.str());
  return kOk;
}

int run_infogain(const CommonOptions& opt) {
  if (opt.data.empty()) throw dcakdd::ConfigError("no data file given (--data)");
  const auto records = dcakdd::read_kdd_file(opt.data);
  dcakdd::emit_infogain(records, opt.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dendritic cell algorithm and negative selection experiments on KDD Cup 99"};
  app.set_version_flag("--version", std::string(dcakdd::library_version()));
  app.require_subcommand(1);

  CommonOptions opt;
  SweepOptions sweep;
  ExportOptions ex;

  auto* e1 = app.add_subcommand("e1", "DCA experiments: base run, antigen multiplier and time window sweeps");
  add_common(e1, opt, true);
  e1->add_option("-e,--experiment", sweep.experiment, "E1 (all), E1.1, E1.2 or E1.3")
      ->check(CLI::IsMember({"E1", "E1.1", "E1.2", "E1.3"}));
  e1->add_option("--multipliers", sweep.multipliers, "antigen multiplier sweep")->delimiter(',');
  e1->add_option("--windows", sweep.windows, "time window sweep")->delimiter(',');
  e1->add_option("--mcav-threshold", sweep.mcav_threshold, "MCAV anomaly threshold");
  e1->add_option("--weighting", sweep.weighting, "instances or types")
      ->check(CLI::IsMember({"instances", "types"}));

  auto* e2 = app.add_subcommand("e2", "negative selection across data dimensions");
  add_common(e2, opt, true);
  e2->add_option("--dimensions", sweep.dimensions, "dimension sweep")->delimiter(',');
  e2->add_option("--folds", sweep.folds, "cross-validation folds");
  e2->add_option("--detectors", sweep.detectors, "detectors per fold");

  auto* custom = app.add_subcommand("custom", "one DCA run with a chosen multiplier and window");
  add_common(custom, opt, true);
  custom->add_option("-k,--multiplier", sweep.multiplier, "antigen multiplier");
  custom->add_option("-w,--window", sweep.window, "time window size");
  custom->add_option("--mcav-threshold", sweep.mcav_threshold, "MCAV anomaly threshold");
  custom->add_option("--weighting", sweep.weighting, "instances or types")
      ->check(CLI::IsMember({"instances", "types"}));

  auto* infogain = app.add_subcommand("infogain", "information gain of every attribute");
  add_common(infogain, opt, false);

  auto* exp = app.add_subcommand("export", "write an intermediate artifact");
  add_common(exp, opt, false);
  exp->add_option("what", ex.what, "signals, antigens, folds, signal-config or detectors")
      ->required()
      ->check(CLI::IsMember({"signals", "antigens", "folds", "signal-config", "detectors"}));
  exp->add_option("-w,--window", ex.window, "time window applied to exported signals");
  exp->add_option("--dimension", ex.dimension, "detector dimension");
  exp->add_option("--fold", ex.fold, "fold whose detectors are exported");
  exp->add_option("--folds", sweep.folds, "cross-validation folds");
  exp->add_option("--detectors", sweep.detectors, "detectors per fold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*e1) return run_report(opt, sweep, e1_family(opt, sweep));
    if (*e2) return run_report(opt, sweep, dcakdd::ExperimentId::E2);
    if (*custom) return run_report(opt, sweep, dcakdd::ExperimentId::Custom);
    if (*infogain) return run_infogain(opt);
    return run_export(opt, sweep, ex);
  } catch (const dcakdd::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const dcakdd::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const dcakdd::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
