#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dcakdd/record.hpp"

namespace dcakdd {

// protocol:service:flag identifier of a connection.
struct AntigenType {
  std::string id;

  friend bool operator==(const AntigenType&, const AntigenType&) = default;
  friend auto operator<=>(const AntigenType&, const AntigenType&) = default;
};

// Joins the three nominal values with ':'. Any ':' or '\' inside a value is
// escaped with '\', so distinct triples never share an identifier.
AntigenType derive_antigen_type(std::string_view protocol, std::string_view service,
                                std::string_view flag);
AntigenType derive_antigen_type(const ConnectionRecord& record);

// k identical copies; throws ConfigError when k < 1.
std::vector<AntigenType> multiply_antigen(const AntigenType& antigen, std::int64_t k);

using AntigenId = std::uint32_t;

// Dense ids for antigen types, assigned in first-seen order.
class AntigenRegistry {
 public:
  AntigenId intern(const AntigenType& antigen);
  const AntigenType& type(AntigenId id) const { return types_[id]; }
  std::size_t size() const { return types_.size(); }

 private:
  std::vector<AntigenType> types_;
  std::unordered_map<std::string, AntigenId> ids_;
};

struct AntigenStream {
  AntigenRegistry registry;
  std::vector<AntigenId> ids;  // one per record, stream order
};

AntigenStream build_antigen_stream(std::span<const ConnectionRecord> records);

// Tab-separated: index, antigen_type.
void write_antigen_stream(const AntigenStream& stream, std::ostream& out);

}  // namespace dcakdd

template <>
struct std::hash<dcakdd::AntigenType> {
  std::size_t operator()(const dcakdd::AntigenType& a) const noexcept {
    return std::hash<std::string>{}(a.id);
  }
};
