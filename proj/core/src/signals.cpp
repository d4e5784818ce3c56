#include "dcakdd/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dcakdd/errors.hpp"

namespace dcakdd {

namespace {

constexpr std::array<std::string_view, 10> kDefaultAttributes{
    "serror_rate",     "srv_serror_rate",    "same_srv_rate",  "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "count",           "srv_count",
    "logged_in",       "srv_diff_host_rate", "dst_host_count",
};

std::size_t category_slot(SignalCategory c) { return static_cast<std::size_t>(c); }

SignalCategory parse_category(std::string_view text, std::size_t line) {
  if (text == "PAMP") return SignalCategory::Pamp;
  if (text == "DS") return SignalCategory::Danger;
  if (text == "SS") return SignalCategory::Safe;
  throw ConfigError("signal config line " + std::to_string(line) +
                    ": category must be PAMP, DS or SS, got '" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text, std::size_t line) {
  if (text == "+") return Direction::Positive;
  if (text == "-") return Direction::Negative;
  throw ConfigError("signal config line " + std::to_string(line) +
                    ": direction must be + or -, got '" + std::string(text) + "'");
}

std::string_view category_token(SignalCategory c) {
  switch (c) {
    case SignalCategory::Pamp:
      return "PAMP";
    case SignalCategory::Danger:
      return "DS";
    case SignalCategory::Safe:
      return "SS";
  }
  return "?";
}

// High dst_host_count accompanies the flooding attacks, so as a safe signal
// it scores inversely.
Direction default_direction(std::string_view attribute) {
  return attribute == "dst_host_count" ? Direction::Negative : Direction::Positive;
}

SignalCategory default_category(std::size_t position) {
  if (position < 5) return SignalCategory::Pamp;
  if (position < 7) return SignalCategory::Danger;
  return SignalCategory::Safe;
}

struct CountRange {
  std::string_view attribute;
  double schema_upper;
};

constexpr std::array<CountRange, 3> kCountAttributes{{
    {"count", 511.0},
    {"srv_count", 511.0},
    {"dst_host_count", 255.0},
}};

const CountRange* count_range(std::string_view attribute) {
  for (const auto& c : kCountAttributes) {
    if (c.attribute == attribute) return &c;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(SignalCategory category) {
  switch (category) {
    case SignalCategory::Pamp:
      return "pamp";
    case SignalCategory::Danger:
      return "danger";
    case SignalCategory::Safe:
      return "safe";
  }
  return "?";
}

double normalize_signal(double x, double m, double n) {
  if (!(m < n)) {
    throw ConfigError("signal bounds need m < n (m=" + std::to_string(m) +
                      ", n=" + std::to_string(n) + ")");
  }
  if (x < m) return 0.0;
  if (x > n) return 100.0;
  return (x - m) / (n - m) * 100.0;
}

AttributeRangeConfig::AttributeRangeConfig(std::vector<AttributeRange> entries)
    : entries_(std::move(entries)) {}

std::vector<std::string> AttributeRangeConfig::attributes() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& e : entries_) names.push_back(e.attribute);
  return names;
}

AttributeRangeConfig AttributeRangeConfig::parse(std::istream& in) {
  std::vector<AttributeRange> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;

    std::string category, lower, upper, direction, extra;
    if (!(fields >> category >> lower >> upper >> direction) || (fields >> extra)) {
      throw ConfigError("signal config line " + std::to_string(line_number) +
                        ": expected 'attribute category m n direction'");
    }
    AttributeRange range;
    range.attribute = name;
    range.category = parse_category(category, line_number);
    range.direction = parse_direction(direction, line_number);
    try {
      std::size_t used = 0;
      range.lower = std::stod(lower, &used);
      if (used != lower.size()) throw std::invalid_argument(lower);
      range.upper = std::stod(upper, &used);
      if (used != upper.size()) throw std::invalid_argument(upper);
    } catch (const std::logic_error&) {
      throw ConfigError("signal config line " + std::to_string(line_number) +
                        ": bounds must be numbers");
    }
    entries.push_back(std::move(range));
  }
  AttributeRangeConfig config(std::move(entries));
  SignalMapper validate(config);
  return config;
}

AttributeRangeConfig AttributeRangeConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open signal config '" + path.string() + "'");
  return parse(in);
}

void AttributeRangeConfig::write(std::ostream& out) const {
  out << "# attribute category m n direction\n";
  const auto precision = out.precision(17);
  for (const auto& e : entries_) {
    out << e.attribute << '\t' << category_token(e.category) << '\t' << e.lower << '\t'
        << e.upper << '\t' << (e.direction == Direction::Positive ? '+' : '-') << '\n';
  }
  out.precision(precision);
}

std::span<const std::string_view> default_signal_attributes() { return kDefaultAttributes; }

AttributeRangeConfig default_signal_config() {
  std::vector<AttributeRange> entries;
  for (std::size_t i = 0; i < kDefaultAttributes.size(); ++i) {
    const auto name = kDefaultAttributes[i];
    const auto* counts = count_range(name);
    entries.push_back({std::string(name), default_category(i), 0.0,
                       counts ? counts->schema_upper : 1.0, default_direction(name)});
  }
  return AttributeRangeConfig(std::move(entries));
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const auto above = std::min(below + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return values[below] + (values[above] - values[below]) * frac;
}

AttributeRangeConfig default_signal_config(std::span<const ConnectionRecord> training) {
  auto config = default_signal_config();
  if (training.empty()) return config;

  std::vector<AttributeRange> entries(config.entries().begin(), config.entries().end());
  for (auto& e : entries) {
    const auto* counts = count_range(e.attribute);
    if (!counts) continue;
    const auto column = attribute_index(e.attribute);
    std::vector<double> values;
    values.reserve(training.size());
    for (const auto& r : training) values.push_back(r.value(column));
    double lo = percentile(values, 0.05);
    double hi = percentile(std::move(values), 0.95);
    // A spike can collapse the interval; widen it to one count.
    if (!(hi > lo)) hi = lo + 1.0;
    e.lower = lo;
    e.upper = hi;
  }
  return AttributeRangeConfig(std::move(entries));
}

SignalMapper::SignalMapper(const AttributeRangeConfig& config) {
  std::set<std::string> seen;
  for (const auto& e : config.entries()) {
    const auto column = attribute_index(e.attribute);
    if (column == column::kProtocolType || column == column::kService ||
        column == column::kFlag) {
      throw ConfigError("attribute '" + e.attribute + "' is symbolic and cannot be a signal");
    }
    if (!seen.insert(e.attribute).second) {
      throw ConfigError("attribute '" + e.attribute + "' configured more than once");
    }
    if (!(e.lower < e.upper)) {
      throw ConfigError("attribute '" + e.attribute + "' needs m < n");
    }
    terms_[category_slot(e.category)].push_back({column, e.lower, e.upper, e.direction});
  }
  for (std::size_t c = 0; c < terms_.size(); ++c) {
    if (terms_[c].empty()) {
      throw ConfigError("signal category " +
                        std::string(category_token(static_cast<SignalCategory>(c))) +
                        " has no attributes");
    }
  }
}

SignalTriple SignalMapper::operator()(const ConnectionRecord& record) const {
  std::array<double, 3> score{};
  for (std::size_t c = 0; c < terms_.size(); ++c) {
    double sum = 0.0;
    for (const auto& t : terms_[c]) {
      const double x = record.value(t.column);
      if (std::isnan(x)) {
        throw DomainError("attribute '" +
                          std::string(kdd_attributes()[t.column].name) +
                          "' has a non-numeric value");
      }
      const double f = normalize_signal(x, t.lower, t.upper);
      sum += t.direction == Direction::Positive ? f : 100.0 - f;
    }
    score[c] = sum / static_cast<double>(terms_[c].size());
  }
  return {score[0], score[1], score[2]};
}

SignalTriple build_signal_triple(const ConnectionRecord& record,
                                 const AttributeRangeConfig& config) {
  return SignalMapper(config)(record);
}

SignalStream build_signal_stream(std::span<const ConnectionRecord> records,
                                 const AttributeRangeConfig& config) {
  const SignalMapper mapper(config);
  SignalStream stream;
  stream.reserve(records.size());
  for (const auto& r : records) stream.push_back(mapper(r));
  return stream;
}

void write_signal_stream(std::span<const SignalTriple> stream, std::ostream& out) {
  const auto precision = out.precision(17);
  out << "index\tpamp\tdanger\tsafe\n";
  for (std::size_t i = 0; i < stream.size(); ++i) {
    out << i << '\t' << stream[i].pamp << '\t' << stream[i].danger << '\t'
        << stream[i].safe << '\n';
  }
  out.precision(precision);
}

}  // namespace dcakdd
