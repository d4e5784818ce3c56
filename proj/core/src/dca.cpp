#include "dcakdd/dca.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "dcakdd/errors.hpp"
#include "dcakdd/window.hpp"

namespace dcakdd {

OutputSignals transform_signals(const SignalTriple& s, const WeightMatrix& w) {
  const std::array<double, 3> in{s.pamp, s.danger, s.safe};
  std::array<double, 3> out{};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) out[j] += w.weights[i][j] * in[i];
  }
  return {out[0], out[1], out[2]};
}

DendriticCell::DendriticCell(double migration_threshold) : threshold_(migration_threshold) {}

void DendriticCell::sample(std::span<const AntigenId> antigens, const SignalTriple& signal,
                           const WeightMatrix& weights) {
  for (AntigenId id : antigens) {
    if (!antigens_.empty() && antigens_.back().id == id) {
      ++antigens_.back().count;
    } else {
      antigens_.push_back({id, 1});
    }
  }
  const auto out = transform_signals(signal, weights);
  csm_ += out.csm;
  semi_ += out.semi;
  mat_ += out.mat;
}

std::uint64_t DendriticCell::antigen_count() const {
  std::uint64_t n = 0;
  for (const auto& a : antigens_) n += a.count;
  return n;
}

void DendriticCell::present_and_reset(std::vector<AntigenCount>& out, double new_threshold) {
  out.swap(antigens_);
  antigens_.clear();
  csm_ = semi_ = mat_ = 0.0;
  threshold_ = new_threshold;
}

void PresentationLog::record(const std::string& antigen, CellContext context,
                             std::uint64_t count) {
  auto& t = tallies_[antigen];
  t.total += count;
  if (context == CellContext::Mature) t.mature += count;
}

std::uint64_t PresentationLog::total_presentations() const {
  std::uint64_t n = 0;
  for (const auto& [type, t] : tallies_) n += t.total;
  return n;
}

std::optional<double> McavTable::mcav(const std::string& antigen) const {
  const auto it = entries_.find(antigen);
  if (it == entries_.end()) return std::nullopt;
  return it->second.mcav;
}

McavTable compute_mcav(const PresentationLog& log) {
  McavTable::Entries entries;
  for (const auto& [type, t] : log.tallies()) {
    if (t.total == 0) continue;
    entries.emplace(type, McavEntry{t.total, t.mature,
                                    static_cast<double>(t.mature) / static_cast<double>(t.total)});
  }
  return McavTable(std::move(entries));
}

BinaryLabel classify_mcav(double mcav, double threshold) {
  return mcav > threshold ? BinaryLabel::Anomalous : BinaryLabel::Normal;
}

std::map<std::string, BinaryLabel> classify_types(const McavTable& table, double threshold) {
  std::map<std::string, BinaryLabel> out;
  for (const auto& [type, e] : table.entries()) out.emplace(type, classify_mcav(e.mcav, threshold));
  return out;
}

void write_mcav_table(const McavTable& table, double threshold, std::ostream& out) {
  const auto precision = out.precision(17);
  out << "antigen_type\ttotal_count\tmature_count\tmcav\tclassification\n";
  for (const auto& [type, e] : table.entries()) {
    out << type << '\t' << e.total << '\t' << e.mature << '\t' << e.mcav << '\t'
        << to_string(classify_mcav(e.mcav, threshold)) << '\n';
  }
  out.precision(precision);
}

void DcaParameters::validate() const {
  if (population == 0) throw ConfigError("DC population must be positive");
  if (cells_per_step == 0 || cells_per_step > population) {
    throw ConfigError("cells per step must be in [1, population]");
  }
  if (!(threshold_lower > 0.0) || threshold_upper < threshold_lower) {
    throw ConfigError("migration threshold range must satisfy 0 < lower <= upper");
  }
  if (multiplier < 1) throw ConfigError("antigen multiplier must be >= 1");
  if (window < 1) throw ConfigError("window size must be >= 1");
  if (!(mcav_threshold >= 0.0 && mcav_threshold <= 1.0)) {
    throw ConfigError("MCAV threshold must be in [0, 1]");
  }
}

DcaEngine::DcaEngine(const DcaParameters& params, std::uint64_t seed)
    : params_(params), rng_(seed) {
  params_.validate();
  cells_.reserve(params_.population);
  for (std::size_t i = 0; i < params_.population; ++i) cells_.emplace_back(draw_threshold());
  order_.resize(params_.population);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  dealt_.resize(params_.cells_per_step);
}

double DcaEngine::draw_threshold() {
  return rng_.uniform(params_.threshold_lower, params_.threshold_upper);
}

Presentation& DcaEngine::next_presentation() {
  if (presentation_count_ == presentations_.size()) presentations_.emplace_back();
  return presentations_[presentation_count_++];
}

void DcaEngine::present(std::size_t cell_index, double new_threshold) {
  auto& cell = cells_[cell_index];
  auto& p = next_presentation();
  p.cell = cell_index;
  p.context = cell.context();
  cell.present_and_reset(p.antigens, new_threshold);
  for (const auto& a : p.antigens) {
    if (a.id >= tallies_.size()) tallies_.resize(a.id + 1);
    auto& t = tallies_[a.id];
    t.total += a.count;
    if (p.context == CellContext::Mature) t.mature += a.count;
  }
}

std::span<const Presentation> DcaEngine::step(std::span<const AntigenId> antigens,
                                              const SignalTriple& signal) {
  presentation_count_ = 0;
  tissue_.current_signal = signal;
  tissue_.antigen_store.assign(antigens.begin(), antigens.end());
  rng_.shuffle(std::span<AntigenId>(tissue_.antigen_store));
  antigens_fed_ += antigens.size();

  // Partial Fisher-Yates: the first m entries of order_ are this step's cells.
  const std::size_t m = params_.cells_per_step;
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(order_[i], order_[i + rng_.below(order_.size() - i)]);
  }

  for (auto& d : dealt_) d.clear();
  for (std::size_t c = 0; c < tissue_.antigen_store.size(); ++c) {
    dealt_[c % m].push_back(tissue_.antigen_store[c]);
  }
  tissue_.antigen_store.clear();

  for (std::size_t s = 0; s < m; ++s) {
    cells_[order_[s]].sample(dealt_[s], signal, params_.weights);
  }
  for (std::size_t s = 0; s < m; ++s) {
    if (cells_[order_[s]].should_migrate()) {
      present(order_[s], draw_threshold());
      ++migrations_;
    }
  }
  return {presentations_.data(), presentation_count_};
}

std::span<const Presentation> DcaEngine::flush() {
  presentation_count_ = 0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].antigens().empty()) continue;
    present(i, cells_[i].migration_threshold());
  }
  return {presentations_.data(), presentation_count_};
}

DcaRun run_dca_on_streams(std::span<const SignalTriple> windowed_signals,
                          const AntigenStream& antigens, const DcaParameters& params,
                          std::uint64_t seed) {
  params.validate();
  if (windowed_signals.size() != antigens.ids.size()) {
    throw DomainError("signal and antigen streams differ in length");
  }
  DcaRun run;
  if (windowed_signals.empty()) return run;

  DcaEngine engine(params, seed);
  std::vector<AntigenId> copies(static_cast<std::size_t>(params.multiplier));
  for (std::size_t i = 0; i < windowed_signals.size(); ++i) {
    std::fill(copies.begin(), copies.end(), antigens.ids[i]);
    engine.step(copies, windowed_signals[i]);
  }
  engine.flush();

  const auto tallies = engine.tallies();
  for (std::size_t id = 0; id < tallies.size(); ++id) {
    const auto& t = tallies[id];
    if (t.total == 0) continue;
    const auto& name = antigens.registry.type(static_cast<AntigenId>(id)).id;
    if (t.mature > 0) run.log.record(name, CellContext::Mature, t.mature);
    if (t.total > t.mature) run.log.record(name, CellContext::SemiMature, t.total - t.mature);
  }
  run.table = compute_mcav(run.log);
  run.antigens_fed = engine.antigens_fed();
  run.migrations = engine.migrations();
  return run;
}

DcaRun run_dca(std::span<const SignalTriple> signals, const AntigenStream& antigens,
               const DcaParameters& params, std::uint64_t seed) {
  params.validate();
  if (params.window == 1) return run_dca_on_streams(signals, antigens, params, seed);
  const auto windowed = apply_time_window(signals, params.window);
  return run_dca_on_streams(windowed, antigens, params, seed);
}

DcaRun run_dca(std::span<const ConnectionRecord> records, const AttributeRangeConfig& signals,
               const DcaParameters& params, std::uint64_t seed) {
  const auto stream = build_signal_stream(records, signals);
  const auto antigens = build_antigen_stream(records);
  return run_dca(stream, antigens, params, seed);
}

}  // namespace dcakdd
