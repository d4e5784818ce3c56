#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dcakdd/evaluation.hpp"
#include "dcakdd/folds.hpp"
#include "dcakdd/record.hpp"

namespace dcakdd {

using Point = std::vector<double>;

// True iff the Euclidean distance between a and b is strictly below r.
// Throws DomainError when the dimensions differ.
bool euclidean_match(std::span<const double> a, std::span<const double> b, double r);

struct Detector {
  Point center;
  double radius = 0.1;

  friend bool operator==(const Detector&, const Detector&) = default;
};

// Answers "is any stored point closer than the reach to p?".
//
// Points sit in a hash grid of cell side `reach` over their first (up to)
// four coordinates, so a query only visits the 3^k neighbouring cells.
class PointIndex {
 public:
  PointIndex() = default;
  PointIndex(std::vector<Point> points, double reach);

  bool any_within(std::span<const double> p) const;
  std::size_t size() const { return points_.size(); }

 private:
  static constexpr std::size_t kMaxGridDims = 4;
  using CellKey = std::array<std::int64_t, kMaxGridDims>;

  CellKey key_of(std::span<const double> p) const;

  struct KeyHash {
    std::size_t operator()(const CellKey& key) const noexcept;
  };

  std::vector<Point> points_;
  double reach_ = 0.0;
  std::size_t grid_dims_ = 0;
  std::unordered_map<CellKey, std::vector<std::size_t>, KeyHash> cells_;
};

// Normal training instances in the unit hypercube plus their radius.
class SelfSet {
 public:
  SelfSet(std::vector<Point> points, double radius);

  std::span<const Point> points() const { return points_; }
  double radius() const { return radius_; }
  std::size_t dimension() const { return dimension_; }

 private:
  std::vector<Point> points_;
  double radius_;
  std::size_t dimension_ = 0;
};

struct DetectorSet {
  std::size_t dimension = 0;
  std::vector<Detector> detectors;
  std::size_t attempts = 0;
  bool budget_exhausted = false;  // stopped before reaching the target count

  bool degenerate() const { return detectors.empty(); }
};

// Draws candidate centres uniformly in [0,1]^d and keeps those farther than
// self_radius + detector_radius from every self point, in draw order, until
// `count` detectors exist or `max_attempts` candidates were drawn.
DetectorSet generate_detectors(const SelfSet& self, std::size_t count, std::size_t dimension,
                               std::uint64_t seed, std::size_t max_attempts,
                               double detector_radius);

// Anomalous iff some detector matches p.
BinaryLabel classify_point(std::span<const double> p, const DetectorSet& detectors);

// Bulk classifier over a fixed detector set.
class DetectorClassifier {
 public:
  explicit DetectorClassifier(const DetectorSet& detectors);
  BinaryLabel operator()(std::span<const double> p) const;

 private:
  std::size_t dimension_;
  bool uniform_radius_ = true;
  PointIndex index_;
  std::vector<Detector> mixed_;  // used when radii differ
};

// Header line "radius <r> dimension <d>", then one tab-separated centre per
// line. Centres are written with round-trip precision.
void write_detectors(const DetectorSet& detectors, std::ostream& out);
DetectorSet read_detectors(std::istream& in);

struct NsaParameters {
  double self_radius = 0.1;
  double detector_radius = 0.1;
  std::size_t detector_count = 1000;
  std::size_t attempt_budget = 0;  // 0 means 100 * detector_count
  bool keep_detectors = false;     // retain each fold's detector set

  std::size_t effective_budget() const {
    return attempt_budget == 0 ? 100 * detector_count : attempt_budget;
  }
  void validate() const;
};

struct NsaFoldResult {
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  bool skipped = false;  // no normal training instances
  std::size_t detectors = 0;
  std::size_t attempts = 0;
  bool budget_exhausted = false;
  ConfusionCounts counts;
  ConfusionRates rates;
  std::optional<DetectorSet> detector_set;
};

struct NsaResult {
  std::size_t dimension = 0;
  std::vector<std::string> attributes;
  std::vector<NsaFoldResult> folds;
  ConfusionRates mean;  // over folds that were not skipped
};

// Cross-validated NSA over the first `dimension` attributes. Fold i uses
// seeds[i % seeds.size()] for detector generation.
NsaResult run_nsa(std::span<const ConnectionRecord> records,
                  std::span<const std::string> attributes, std::size_t dimension,
                  const FoldAssignment& folds, const NsaParameters& params,
                  std::span<const std::uint64_t> seeds);

}  // namespace dcakdd
