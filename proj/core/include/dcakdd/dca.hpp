#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcakdd/antigen.hpp"
#include "dcakdd/random.hpp"
#include "dcakdd/record.hpp"
#include "dcakdd/signals.hpp"

namespace dcakdd {

// weights[input][output]; inputs (PAMP, DS, SS), outputs (Csm, Semi, Mat).
struct WeightMatrix {
  std::array<std::array<double, 3>, 3> weights{};

  static WeightMatrix defaults() {
    return {{{{2.0, 0.0, 2.0}, {1.0, 0.0, 1.0}, {3.0, 3.0, -3.0}}}};
  }

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;
};

struct OutputSignals {
  double csm = 0.0;
  double semi = 0.0;
  double mat = 0.0;

  friend bool operator==(const OutputSignals&, const OutputSignals&) = default;
};

// O_j = sum_i W_ij * S_i.
OutputSignals transform_signals(const SignalTriple& s, const WeightMatrix& w);

enum class CellContext : std::uint8_t { SemiMature = 0, Mature = 1 };

// Run-length entry of a cell's antigen store.
struct AntigenCount {
  AntigenId id = 0;
  std::uint64_t count = 0;

  friend bool operator==(const AntigenCount&, const AntigenCount&) = default;
};

class DendriticCell {
 public:
  explicit DendriticCell(double migration_threshold);

  // Stores the antigens and adds the transformed signal to the cumulative
  // outputs.
  void sample(std::span<const AntigenId> antigens, const SignalTriple& signal,
              const WeightMatrix& weights);

  // Cumulative Csm strictly above the migration threshold.
  bool should_migrate() const { return csm_ > threshold_; }

  // Mature when cumulative Semi <= cumulative Mat (ties are mature).
  CellContext context() const {
    return semi_ <= mat_ ? CellContext::Mature : CellContext::SemiMature;
  }

  double cumulative_csm() const { return csm_; }
  double cumulative_semi() const { return semi_; }
  double cumulative_mat() const { return mat_; }
  double migration_threshold() const { return threshold_; }

  std::span<const AntigenCount> antigens() const { return antigens_; }
  std::uint64_t antigen_count() const;

  // Moves the antigen store out (swapping storage with `out`) and turns this
  // cell into a naive one with the given threshold.
  void present_and_reset(std::vector<AntigenCount>& out, double new_threshold);

 private:
  double csm_ = 0.0;
  double semi_ = 0.0;
  double mat_ = 0.0;
  double threshold_;
  std::vector<AntigenCount> antigens_;
};

struct PresentationTally {
  std::uint64_t mature = 0;
  std::uint64_t total = 0;

  friend bool operator==(const PresentationTally&, const PresentationTally&) = default;
};

// Per antigen type: how often it was presented, and how often in a mature
// context.
class PresentationLog {
 public:
  void record(const std::string& antigen, CellContext context, std::uint64_t count = 1);
  const std::map<std::string, PresentationTally>& tallies() const { return tallies_; }
  std::uint64_t total_presentations() const;

  friend bool operator==(const PresentationLog&, const PresentationLog&) = default;

 private:
  std::map<std::string, PresentationTally> tallies_;
};

struct McavEntry {
  std::uint64_t total = 0;
  std::uint64_t mature = 0;
  double mcav = 0.0;

  friend bool operator==(const McavEntry&, const McavEntry&) = default;
};

// Mature context antigen value per presented antigen type, sorted by type.
class McavTable {
 public:
  using Entries = std::map<std::string, McavEntry>;

  McavTable() = default;
  explicit McavTable(Entries entries) : entries_(std::move(entries)) {}

  const Entries& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::optional<double> mcav(const std::string& antigen) const;

  friend bool operator==(const McavTable&, const McavTable&) = default;

 private:
  Entries entries_;
};

// mature / total per type. Types with no presentations are left out.
McavTable compute_mcav(const PresentationLog& log);

// mcav strictly above the threshold is anomalous.
BinaryLabel classify_mcav(double mcav, double threshold);
std::map<std::string, BinaryLabel> classify_types(const McavTable& table, double threshold);

// Tab-separated: antigen_type, total_count, mature_count, mcav, classification.
void write_mcav_table(const McavTable& table, double threshold, std::ostream& out);

struct DcaParameters {
  std::size_t population = 100;
  double threshold_lower = 100.0;
  double threshold_upper = 300.0;
  std::size_t cells_per_step = 10;
  std::int64_t multiplier = 1;
  std::int64_t window = 1;
  WeightMatrix weights = WeightMatrix::defaults();
  double mcav_threshold = 0.8;

  // Throws ConfigError on an unusable combination.
  void validate() const;
};

struct TissueState {
  std::vector<AntigenId> antigen_store;
  SignalTriple current_signal;
};

// One migrated (or flushed) cell's antigens and its context.
struct Presentation {
  std::size_t cell = 0;
  CellContext context = CellContext::SemiMature;
  std::vector<AntigenCount> antigens;
};

// The tissue plus the DC population, driven one data instance at a time.
//
// All randomness comes from one generator seeded at construction and
// consumed in a fixed order: the population's thresholds at construction,
// then per step the tissue placement shuffle, the selection of cells, and
// thresholds for cells replaced during the step.
class DcaEngine {
 public:
  DcaEngine(const DcaParameters& params, std::uint64_t seed);

  // Places the antigens in the tissue at random positions, selects
  // cells_per_step cells without replacement, deals the antigens
  // round-robin over them, lets each sample the signal, then presents and
  // replaces every selected cell that migrates. The tissue store is drained.
  std::span<const Presentation> step(std::span<const AntigenId> antigens,
                                     const SignalTriple& signal);

  // Presents every surviving cell holding antigens, with the context of its
  // current accumulators, and resets it.
  std::span<const Presentation> flush();

  const TissueState& tissue() const { return tissue_; }
  std::span<const DendriticCell> cells() const { return cells_; }

  // Presentation tallies indexed by antigen id.
  std::span<const PresentationTally> tallies() const { return tallies_; }

  std::uint64_t antigens_fed() const { return antigens_fed_; }
  std::uint64_t migrations() const { return migrations_; }

 private:
  double draw_threshold();
  Presentation& next_presentation();
  void present(std::size_t cell_index, double new_threshold);

  DcaParameters params_;
  Rng rng_;
  std::vector<DendriticCell> cells_;
  std::vector<std::size_t> order_;
  TissueState tissue_;
  std::vector<std::vector<AntigenId>> dealt_;
  std::vector<Presentation> presentations_;
  std::size_t presentation_count_ = 0;
  std::vector<PresentationTally> tallies_;
  std::uint64_t antigens_fed_ = 0;
  std::uint64_t migrations_ = 0;
};

struct DcaRun {
  PresentationLog log;
  McavTable table;
  std::uint64_t antigens_fed = 0;
  std::uint64_t migrations = 0;
};

// Runs the DCA over signals that already had the time window applied.
// Each record contributes `multiplier` copies of its antigen.
DcaRun run_dca_on_streams(std::span<const SignalTriple> windowed_signals,
                          const AntigenStream& antigens, const DcaParameters& params,
                          std::uint64_t seed);

// Applies params.window to the signals, then runs the DCA.
DcaRun run_dca(std::span<const SignalTriple> signals, const AntigenStream& antigens,
               const DcaParameters& params, std::uint64_t seed);

// Full pipeline from parsed records.
DcaRun run_dca(std::span<const ConnectionRecord> records, const AttributeRangeConfig& signals,
               const DcaParameters& params, std::uint64_t seed);

}  // namespace dcakdd
