#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcakdd/record.hpp"

namespace dcakdd {

enum class SignalCategory { Pamp, Danger, Safe };

std::string_view to_string(SignalCategory category);

// Scores in [0,100] for one stream position.
struct SignalTriple {
  double pamp = 0.0;
  double danger = 0.0;
  double safe = 0.0;

  friend bool operator==(const SignalTriple&, const SignalTriple&) = default;
};

using SignalStream = std::vector<SignalTriple>;

// Maps a raw attribute value into [0,100]: 0 below m, 100 above n, linear
// (x - m) / (n - m) * 100 in between. Throws ConfigError unless m < n.
double normalize_signal(double x, double m, double n);

// '+' scores f(x); '-' scores 100 - f(x), for attributes whose evidence runs
// opposite to their raw magnitude.
enum class Direction { Positive, Negative };

struct AttributeRange {
  std::string attribute;
  SignalCategory category = SignalCategory::Pamp;
  double lower = 0.0;
  double upper = 1.0;
  Direction direction = Direction::Positive;

  friend bool operator==(const AttributeRange&, const AttributeRange&) = default;
};

// Attribute -> (category, [m, n], direction) table.
//
// Text form, one attribute per line, whitespace separated, '#' comments:
//
//   serror_rate  PAMP  0  1  +
//   count        DS    1  511  +
class AttributeRangeConfig {
 public:
  AttributeRangeConfig() = default;
  explicit AttributeRangeConfig(std::vector<AttributeRange> entries);

  std::span<const AttributeRange> entries() const { return entries_; }

  // Attribute names in configured order.
  std::vector<std::string> attributes() const;

  static AttributeRangeConfig parse(std::istream& in);
  static AttributeRangeConfig load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

  friend bool operator==(const AttributeRangeConfig&, const AttributeRangeConfig&) = default;

 private:
  std::vector<AttributeRange> entries_;
};

// The ten default signal attributes, grouped 5/2/3 into PAMP/DS/SS.
std::span<const std::string_view> default_signal_attributes();

// Default ranges without data: rates and logged_in use [0,1]; counts use
// their schema ranges (count/srv_count [0,511], dst_host_count [0,255]).
AttributeRangeConfig default_signal_config();

// Default ranges with count bounds taken from the 5th and 95th percentiles
// of the given records.
AttributeRangeConfig default_signal_config(std::span<const ConnectionRecord> training);

// Linear-interpolated percentile (q in [0,1]) of a non-empty sample.
double percentile(std::vector<double> values, double q);

// Resolves a config against the KDD schema once, then scores records.
class SignalMapper {
 public:
  // Throws ConfigError for unknown or non-numeric attributes, invalid
  // bounds, duplicates, or a category with no attributes.
  explicit SignalMapper(const AttributeRangeConfig& config);

  SignalTriple operator()(const ConnectionRecord& record) const;

 private:
  struct Term {
    std::size_t column;
    double lower;
    double upper;
    Direction direction;
  };
  std::array<std::vector<Term>, 3> terms_;
};

SignalTriple build_signal_triple(const ConnectionRecord& record,
                                 const AttributeRangeConfig& config);

SignalStream build_signal_stream(std::span<const ConnectionRecord> records,
                                 const AttributeRangeConfig& config);

// Tab-separated: index, pamp, danger, safe.
void write_signal_stream(std::span<const SignalTriple> stream, std::ostream& out);

}  // namespace dcakdd
