#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcakdd {

inline constexpr std::size_t kAttributeCount = 41;
inline constexpr std::size_t kNominalCount = 7;
inline constexpr std::size_t kFieldCount = kAttributeCount + 1;

enum class AttributeKind { Continuous, Nominal };

struct AttributeInfo {
  std::string_view name;
  AttributeKind kind;
};

// The fixed 41-column KDD 99 connection schema, in file order.
const std::array<AttributeInfo, kAttributeCount>& kdd_attributes();

std::optional<std::size_t> find_attribute(std::string_view name);

// Like find_attribute, but unknown names raise ConfigError.
std::size_t attribute_index(std::string_view name);

// Column positions used directly by the pipeline.
namespace column {
inline constexpr std::size_t kProtocolType = 1;
inline constexpr std::size_t kService = 2;
inline constexpr std::size_t kFlag = 3;
}  // namespace column

enum class BinaryLabel { Normal, Anomalous };

std::string_view to_string(BinaryLabel label);

// "normal" is normal; every other label (attack names, empty) is anomalous.
BinaryLabel binarize_label(std::string_view label);

// One parsed connection.
//
// Continuous columns live in `values`. Nominal columns keep their symbol text
// in `symbols` (schema order among the nominal columns); when the symbol is a
// number, as for land/logged_in, `values` also carries it, otherwise NaN.
struct ConnectionRecord {
  std::array<double, kAttributeCount> values{};
  std::array<std::string, kNominalCount> symbols{};
  std::string label;

  double value(std::size_t column) const { return values[column]; }
  const std::string& symbol(std::size_t column) const;

  const std::string& protocol() const { return symbol(column::kProtocolType); }
  const std::string& service() const { return symbol(column::kService); }
  const std::string& flag() const { return symbol(column::kFlag); }

  BinaryLabel binary_label() const { return binarize_label(label); }

  // Compares continuous values, symbols and label. Numeric shadows of
  // nominal columns are derived data and are not compared.
  friend bool operator==(const ConnectionRecord& a, const ConnectionRecord& b);
};

// Parses one 42-field line. A trailing '.' on the label is stripped.
// line_number only feeds error messages (0 = unknown).
ConnectionRecord parse_kdd_record(std::string_view line,
                                  std::size_t line_number = 0);

// Inverse of parse_kdd_record: shortest round-trip numbers, label with the
// canonical trailing period.
std::string serialize_kdd_record(const ConnectionRecord& record);

// Reads every non-blank line of a stream.
std::vector<ConnectionRecord> read_kdd_stream(std::istream& in);

// Reads a plain or gzip-compressed file.
std::vector<ConnectionRecord> read_kdd_file(const std::filesystem::path& path);

std::vector<BinaryLabel> binary_labels(std::span<const ConnectionRecord> records);

}  // namespace dcakdd
