#include "dcakdd/antigen.hpp"

#include <ostream>

#include "dcakdd/errors.hpp"

namespace dcakdd {

namespace {

void append_escaped(std::string& out, std::string_view part) {
  for (char c : part) {
    if (c == ':' || c == '\\') out += '\\';
    out += c;
  }
}

}  // namespace

AntigenType derive_antigen_type(std::string_view protocol, std::string_view service,
                                std::string_view flag) {
  AntigenType antigen;
  antigen.id.reserve(protocol.size() + service.size() + flag.size() + 2);
  append_escaped(antigen.id, protocol);
  antigen.id += ':';
  append_escaped(antigen.id, service);
  antigen.id += ':';
  append_escaped(antigen.id, flag);
  return antigen;
}

AntigenType derive_antigen_type(const ConnectionRecord& record) {
  return derive_antigen_type(record.protocol(), record.service(), record.flag());
}

std::vector<AntigenType> multiply_antigen(const AntigenType& antigen, std::int64_t k) {
  if (k < 1) {
    throw ConfigError("antigen multiplier must be >= 1, got " + std::to_string(k));
  }
  return std::vector<AntigenType>(static_cast<std::size_t>(k), antigen);
}

AntigenId AntigenRegistry::intern(const AntigenType& antigen) {
  auto [it, inserted] = ids_.try_emplace(antigen.id, static_cast<AntigenId>(types_.size()));
  if (inserted) types_.push_back(antigen);
  return it->second;
}

AntigenStream build_antigen_stream(std::span<const ConnectionRecord> records) {
  AntigenStream stream;
  stream.ids.reserve(records.size());
  for (const auto& r : records) {
    stream.ids.push_back(stream.registry.intern(derive_antigen_type(r)));
  }
  return stream;
}

void write_antigen_stream(const AntigenStream& stream, std::ostream& out) {
  out << "index\tantigen_type\n";
  for (std::size_t i = 0; i < stream.ids.size(); ++i) {
    out << i << '\t' << stream.registry.type(stream.ids[i]).id << '\n';
  }
}

}  // namespace dcakdd
