#include "dcakdd/record.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <memory>

#include "dcakdd/errors.hpp"

namespace dcakdd {

namespace {

using K = AttributeKind;

constexpr std::array<AttributeInfo, kAttributeCount> kSchema{{
    {"duration", K::Continuous},
    {"protocol_type", K::Nominal},
    {"service", K::Nominal},
    {"flag", K::Nominal},
    {"src_bytes", K::Continuous},
    {"dst_bytes", K::Continuous},
    {"land", K::Nominal},
    {"wrong_fragment", K::Continuous},
    {"urgent", K::Continuous},
    {"hot", K::Continuous},
    {"num_failed_logins", K::Continuous},
    {"logged_in", K::Nominal},
    {"num_compromised", K::Continuous},
    {"root_shell", K::Continuous},
    {"su_attempted", K::Continuous},
    {"num_root", K::Continuous},
    {"num_file_creations", K::Continuous},
    {"num_shells", K::Continuous},
    {"num_access_files", K::Continuous},
    {"num_outbound_cmds", K::Continuous},
    {"is_host_login", K::Nominal},
    {"is_guest_login", K::Nominal},
    {"count", K::Continuous},
    {"srv_count", K::Continuous},
    {"serror_rate", K::Continuous},
    {"srv_serror_rate", K::Continuous},
    {"rerror_rate", K::Continuous},
    {"srv_rerror_rate", K::Continuous},
    {"same_srv_rate", K::Continuous},
    {"diff_srv_rate", K::Continuous},
    {"srv_diff_host_rate", K::Continuous},
    {"dst_host_count", K::Continuous},
    {"dst_host_srv_count", K::Continuous},
    {"dst_host_same_srv_rate", K::Continuous},
    {"dst_host_diff_srv_rate", K::Continuous},
    {"dst_host_same_src_port_rate", K::Continuous},
    {"dst_host_srv_diff_host_rate", K::Continuous},
    {"dst_host_serror_rate", K::Continuous},
    {"dst_host_srv_serror_rate", K::Continuous},
    {"dst_host_rerror_rate", K::Continuous},
    {"dst_host_srv_rerror_rate", K::Continuous},
}};

// Position of each column among the nominal columns, or -1.
constexpr std::array<int, kAttributeCount> make_nominal_slots() {
  std::array<int, kAttributeCount> slots{};
  int next = 0;
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    slots[i] = kSchema[i].kind == K::Nominal ? next++ : -1;
  }
  return slots;
}

constexpr auto kNominalSlot = make_nominal_slots();
static_assert(kNominalSlot[column::kFlag] == 2);
static_assert(kNominalSlot[21] == static_cast<int>(kNominalCount) - 1);

std::optional<double> parse_number(std::string_view text) {
  double out = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::string where(std::size_t line_number) {
  return line_number == 0 ? std::string("record")
                          : "line " + std::to_string(line_number);
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

const std::array<AttributeInfo, kAttributeCount>& kdd_attributes() {
  return kSchema;
}

std::optional<std::size_t> find_attribute(std::string_view name) {
  for (std::size_t i = 0; i < kSchema.size(); ++i) {
    if (kSchema[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t attribute_index(std::string_view name) {
  if (auto idx = find_attribute(name)) return *idx;
  throw ConfigError("unknown KDD attribute '" + std::string(name) + "'");
}

std::string_view to_string(BinaryLabel label) {
  return label == BinaryLabel::Normal ? "normal" : "anomalous";
}

BinaryLabel binarize_label(std::string_view label) {
  return label == "normal" ? BinaryLabel::Normal : BinaryLabel::Anomalous;
}

const std::string& ConnectionRecord::symbol(std::size_t column) const {
  const int slot = kNominalSlot.at(column);
  if (slot < 0) {
    throw DomainError("attribute '" + std::string(kSchema[column].name) +
                      "' is not nominal");
  }
  return symbols[static_cast<std::size_t>(slot)];
}

bool operator==(const ConnectionRecord& a, const ConnectionRecord& b) {
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    if (kSchema[i].kind == K::Continuous && a.values[i] != b.values[i]) return false;
  }
  return a.symbols == b.symbols && a.label == b.label;
}

ConnectionRecord parse_kdd_record(std::string_view line, std::size_t line_number) {
  line = trim(line);

  std::array<std::string_view, kFieldCount> fields;
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto field = line.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start);
    if (count < kFieldCount) fields[count] = field;
    ++count;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != kFieldCount) {
    throw ParseError(where(line_number) + ": expected 42 fields, found " +
                     std::to_string(count));
  }

  ConnectionRecord record;
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    const auto field = trim(fields[i]);
    const int slot = kNominalSlot[i];
    if (slot >= 0) {
      record.symbols[static_cast<std::size_t>(slot)] = std::string(field);
      record.values[i] =
          parse_number(field).value_or(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const auto number = parse_number(field);
    if (!number || !std::isfinite(*number) || *number < 0.0) {
      throw ParseError(where(line_number) + ": column '" +
                       std::string(kSchema[i].name) +
                       "' is not a finite non-negative number: '" +
                       std::string(field) + "'");
    }
    record.values[i] = *number;
  }

  auto label = trim(fields[kAttributeCount]);
  if (!label.empty() && label.back() == '.') label.remove_suffix(1);
  record.label = std::string(label);
  return record;
}

std::string serialize_kdd_record(const ConnectionRecord& record) {
  std::string out;
  out.reserve(160);
  char buf[32];
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    const int slot = kNominalSlot[i];
    if (slot >= 0) {
      out += record.symbols[static_cast<std::size_t>(slot)];
    } else {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, record.values[i]);
      out.append(buf, ptr);
    }
    out += ',';
  }
  out += record.label;
  out += '.';
  return out;
}

std::vector<ConnectionRecord> read_kdd_stream(std::istream& in) {
  std::vector<ConnectionRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (blank(line)) continue;
    records.push_back(parse_kdd_record(line, line_number));
  }
  return records;
}

std::vector<ConnectionRecord> read_kdd_file(const std::filesystem::path& path) {
  // gzread passes uncompressed files through unchanged.
  std::unique_ptr<gzFile_s, decltype(&gzclose)> file(gzopen(path.c_str(), "rb"),
                                                      &gzclose);
  if (!file) throw IoError("cannot open data file '" + path.string() + "'");
  gzbuffer(file.get(), 1 << 20);

  std::vector<ConnectionRecord> records;
  std::string pending;
  std::size_t line_number = 0;
  std::vector<char> chunk(1 << 20);

  auto flush_line = [&](std::string_view line) {
    ++line_number;
    if (!blank(line)) records.push_back(parse_kdd_record(line, line_number));
  };

  while (true) {
    const int got = gzread(file.get(), chunk.data(), static_cast<unsigned>(chunk.size()));
    if (got < 0) {
      int errnum = 0;
      const char* msg = gzerror(file.get(), &errnum);
      throw IoError("error reading '" + path.string() + "': " + msg);
    }
    if (got == 0) break;
    std::string_view data(chunk.data(), static_cast<std::size_t>(got));
    while (!data.empty()) {
      const auto nl = data.find('\n');
      if (nl == std::string_view::npos) {
        pending.append(data);
        break;
      }
      if (pending.empty()) {
        flush_line(data.substr(0, nl));
      } else {
        pending.append(data.substr(0, nl));
        flush_line(pending);
        pending.clear();
      }
      data.remove_prefix(nl + 1);
    }
  }
  if (!pending.empty()) flush_line(pending);
  return records;
}

std::vector<BinaryLabel> binary_labels(std::span<const ConnectionRecord> records) {
  std::vector<BinaryLabel> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.binary_label());
  return labels;
}

}  // namespace dcakdd
