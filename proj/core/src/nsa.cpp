#include "dcakdd/nsa.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "dcakdd/errors.hpp"
#include "dcakdd/minmax.hpp"
#include "dcakdd/random.hpp"

namespace dcakdd {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

bool euclidean_match(std::span<const double> a, std::span<const double> b, double r) {
  if (a.size() != b.size()) {
    throw DomainError("euclidean_match: dimensions " + std::to_string(a.size()) + " and " +
                      std::to_string(b.size()) + " differ");
  }
  return squared_distance(a, b) < r * r;
}

std::size_t PointIndex::KeyHash::operator()(const CellKey& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto k : key) {
    h ^= static_cast<std::size_t>(k) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

PointIndex::PointIndex(std::vector<Point> points, double reach) : reach_(reach) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  points_ = std::move(points);
  if (points_.empty() || !(reach_ > 0.0)) return;
  grid_dims_ = std::min(points_.front().size(), kMaxGridDims);
  for (std::size_t i = 0; i < points_.size(); ++i) cells_[key_of(points_[i])].push_back(i);
}

PointIndex::CellKey PointIndex::key_of(std::span<const double> p) const {
  CellKey key{};
  for (std::size_t k = 0; k < grid_dims_; ++k) {
    key[k] = static_cast<std::int64_t>(std::floor(p[k] / reach_));
  }
  return key;
}

bool PointIndex::any_within(std::span<const double> p) const {
  if (cells_.empty()) return false;
  const double limit = reach_ * reach_;
  const CellKey centre = key_of(p);

  // Odometer over the {-1, 0, 1}^grid_dims_ neighbourhood.
  std::array<int, kMaxGridDims> offset{};
  std::fill_n(offset.begin(), grid_dims_, -1);
  while (true) {
    CellKey key = centre;
    for (std::size_t k = 0; k < grid_dims_; ++k) key[k] += offset[k];
    if (const auto it = cells_.find(key); it != cells_.end()) {
      for (std::size_t i : it->second) {
        if (squared_distance(points_[i], p) < limit) return true;
      }
    }
    std::size_t k = 0;
    while (k < grid_dims_ && offset[k] == 1) offset[k++] = -1;
    if (k == grid_dims_) break;
    ++offset[k];
  }
  return false;
}

SelfSet::SelfSet(std::vector<Point> points, double radius)
    : points_(std::move(points)), radius_(radius) {
  if (!(radius_ >= 0.0)) throw ConfigError("self radius must be non-negative");
  if (points_.empty()) return;
  dimension_ = points_.front().size();
  for (const auto& p : points_) {
    if (p.size() != dimension_) throw DomainError("self points differ in dimension");
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("self point outside the unit hypercube");
    }
  }
}

DetectorSet generate_detectors(const SelfSet& self, std::size_t count, std::size_t dimension,
                               std::uint64_t seed, std::size_t max_attempts,
                               double detector_radius) {
  if (count == 0) throw ConfigError("detector count must be >= 1");
  if (dimension == 0) throw ConfigError("detector dimension must be >= 1");
  if (!(detector_radius > 0.0)) throw ConfigError("detector radius must be positive");
  if (!self.points().empty() && self.dimension() != dimension) {
    throw DomainError("self set dimension differs from the detector dimension");
  }

  const PointIndex censor(std::vector<Point>(self.points().begin(), self.points().end()),
                          self.radius() + detector_radius);
  DetectorSet set;
  set.dimension = dimension;
  Rng rng(seed);
  Point candidate(dimension);
  while (set.detectors.size() < count && set.attempts < max_attempts) {
    for (auto& c : candidate) c = rng.uniform01();
    ++set.attempts;
    if (!censor.any_within(candidate)) set.detectors.push_back({candidate, detector_radius});
  }
  set.budget_exhausted = set.detectors.size() < count;
  return set;
}

BinaryLabel classify_point(std::span<const double> p, const DetectorSet& detectors) {
  for (const auto& d : detectors.detectors) {
    if (euclidean_match(p, d.center, d.radius)) return BinaryLabel::Anomalous;
  }
  return BinaryLabel::Normal;
}

DetectorClassifier::DetectorClassifier(const DetectorSet& detectors)
    : dimension_(detectors.dimension) {
  const auto& ds = detectors.detectors;
  uniform_radius_ = std::all_of(ds.begin(), ds.end(), [&](const Detector& d) {
    return d.radius == ds.front().radius;
  });
  if (uniform_radius_) {
    std::vector<Point> centres;
    centres.reserve(ds.size());
    for (const auto& d : ds) centres.push_back(d.center);
    index_ = PointIndex(std::move(centres), ds.empty() ? 0.0 : ds.front().radius);
  } else {
    mixed_ = ds;
  }
}

BinaryLabel DetectorClassifier::operator()(std::span<const double> p) const {
  if (p.size() != dimension_ && (index_.size() > 0 || !mixed_.empty())) {
    throw DomainError("classify: point dimension differs from the detectors");
  }
  if (uniform_radius_) {
    return index_.any_within(p) ? BinaryLabel::Anomalous : BinaryLabel::Normal;
  }
  for (const auto& d : mixed_) {
    if (euclidean_match(p, d.center, d.radius)) return BinaryLabel::Anomalous;
  }
  return BinaryLabel::Normal;
}

void write_detectors(const DetectorSet& detectors, std::ostream& out) {
  const double radius = detectors.detectors.empty() ? 0.0 : detectors.detectors.front().radius;
  for (const auto& d : detectors.detectors) {
    if (d.radius != radius) throw DomainError("detector export needs a constant radius");
  }
  char buf[32];
  auto number = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  out << "radius " << number(radius) << " dimension " << detectors.dimension << '\n';
  for (const auto& d : detectors.detectors) {
    for (std::size_t i = 0; i < d.center.size(); ++i) {
      if (i) out << '\t';
      out << number(d.center[i]);
    }
    out << '\n';
  }
}

DetectorSet read_detectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("detector file is empty");
  std::istringstream header(line);
  std::string radius_word, dimension_word;
  double radius = 0.0;
  std::size_t dimension = 0;
  if (!(header >> radius_word >> radius >> dimension_word >> dimension) ||
      radius_word != "radius" || dimension_word != "dimension") {
    throw ParseError("detector file header must be 'radius <r> dimension <d>'");
  }

  DetectorSet set;
  set.dimension = dimension;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    Detector d;
    d.radius = radius;
    std::size_t start = 0;
    while (start <= line.size()) {
      const auto tab = line.find('\t', start);
      const auto field = line.substr(start, tab == std::string::npos ? std::string::npos
                                                                      : tab - start);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError("detector file line " + std::to_string(line_number) +
                         ": bad coordinate '" + field + "'");
      }
      d.center.push_back(v);
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (d.center.size() != dimension) {
      throw ParseError("detector file line " + std::to_string(line_number) + ": expected " +
                       std::to_string(dimension) + " coordinates");
    }
    set.detectors.push_back(std::move(d));
  }
  return set;
}

void NsaParameters::validate() const {
  if (!(self_radius >= 0.0)) throw ConfigError("self radius must be non-negative");
  if (!(detector_radius > 0.0)) throw ConfigError("detector radius must be positive");
  if (detector_count == 0) throw ConfigError("detector count must be >= 1");
}

NsaResult run_nsa(std::span<const ConnectionRecord> records,
                  std::span<const std::string> attributes, std::size_t dimension,
                  const FoldAssignment& folds, const NsaParameters& params,
                  std::span<const std::uint64_t> seeds) {
  params.validate();
  if (dimension == 0 || dimension > attributes.size()) {
    throw ConfigError("NSA dimension " + std::to_string(dimension) + " outside [1, " +
                      std::to_string(attributes.size()) + "]");
  }
  if (seeds.empty()) throw ConfigError("NSA needs at least one seed");
  if (folds.record_count() != records.size()) {
    throw ConfigError("fold assignment does not match the record count");
  }

  NsaResult result;
  result.dimension = dimension;
  result.attributes.assign(attributes.begin(), attributes.begin() + static_cast<std::ptrdiff_t>(dimension));
  std::vector<std::size_t> columns;
  for (const auto& name : result.attributes) columns.push_back(attribute_index(name));

  auto raw_row = [&](const ConnectionRecord& r) {
    Point p(dimension);
    for (std::size_t j = 0; j < dimension; ++j) {
      p[j] = r.value(columns[j]);
      if (std::isnan(p[j])) {
        throw DomainError("attribute '" + result.attributes[j] + "' has a non-numeric value");
      }
    }
    return p;
  };

  std::vector<ConfusionRates> fold_rates;
  for (std::size_t fold = 0; fold < folds.k(); ++fold) {
    NsaFoldResult fr;
    fr.fold = fold;
    fr.seed = seeds[fold % seeds.size()];

    std::vector<double> lower(dimension, INFINITY), upper(dimension, -INFINITY);
    std::vector<Point> self_points;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (folds.fold_of(i) == fold) continue;
      Point p = raw_row(records[i]);
      for (std::size_t j = 0; j < dimension; ++j) {
        lower[j] = std::min(lower[j], p[j]);
        upper[j] = std::max(upper[j], p[j]);
      }
      if (records[i].binary_label() == BinaryLabel::Normal) self_points.push_back(std::move(p));
    }
    if (self_points.empty()) {
      fr.skipped = true;
      result.folds.push_back(std::move(fr));
      continue;
    }

    const auto scaler = MinMaxScaler::from_bounds(std::move(lower), std::move(upper));
    for (auto& p : self_points) p = scaler.transform(p);

    const SelfSet self(std::move(self_points), params.self_radius);
    const auto detectors = generate_detectors(self, params.detector_count, dimension, fr.seed,
                                              params.effective_budget(), params.detector_radius);
    fr.detectors = detectors.detectors.size();
    fr.attempts = detectors.attempts;
    fr.budget_exhausted = detectors.budget_exhausted;
    if (params.keep_detectors) fr.detector_set = detectors;

    const DetectorClassifier classify(detectors);
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (folds.fold_of(i) != fold) continue;
      const auto p = scaler.transform(raw_row(records[i]));
      fr.counts.add(records[i].binary_label(), classify(p));
    }
    fr.rates = ConfusionRates::from_counts(fr.counts);
    fold_rates.push_back(fr.rates);
    result.folds.push_back(std::move(fr));
  }
  if (!fold_rates.empty()) result.mean = average_rates(fold_rates);
  return result;
}

}  // namespace dcakdd
