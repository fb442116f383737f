#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

#include "vbscan/error.hpp"
#include "vbscan/scan_types.hpp"

namespace vbscan {

// Machine-readable report. Keys keep insertion order so identical reports
// serialise to identical bytes; docs/report-schema.md describes the layout.
using Json = nlohmann::ordered_json;

inline Json to_json(const ScanConfig& c) {
  Json j;
  j["host"] = c.host;
  j["port"] = c.port;
  j["rack"] = c.rack;
  j["slot"] = c.slot;
  j["db"] = c.db;
  j["read2_ms"] = c.read2_ms;
  j["next_byte_ms"] = c.next_byte_ms;
  j["safe_state_confirmed"] = c.safe_state_confirmed;
  j["allow_fast"] = c.allow_fast;
  if (c.lockstep) {
    j["lockstep"] = {{"direct_cycles", c.lockstep->direct_cycles},
                     {"delayed_cycles", c.lockstep->delayed_cycles},
                     {"next_byte_cycles", c.lockstep->next_byte_cycles}};
  } else {
    j["lockstep"] = nullptr;
  }
  return j;
}

inline Json to_json(const ByteResult& b) {
  Json bits = Json::array();
  for (auto v : b.bits) bits.push_back(to_string(v));
  return {{"offset", b.offset},
          {"original", b.original},
          {"direct_read", b.direct_read},
          {"delayed_read", b.delayed_read},
          {"write_accepted", b.write_accepted},
          {"restored", b.restored},
          {"bits", bits}};
}

inline std::string render_json(const ScanReport& r) {
  Json j;
  j["schema"] = ScanReport::kSchemaVersion;
  j["mode"] = r.mode;
  j["target"] = r.target;
  j["config"] = to_json(r.config);
  j["vb"] = {{"db", r.db}, {"size", r.vb_size}};
  j["bytes"] = Json::array();
  for (const auto& b : r.bytes) j["bytes"].push_back(to_json(b));
  j["summary"] = {{"total_bytes", r.summary.total_bytes},
                  {"vulnerable_direct", r.summary.vulnerable_direct},
                  {"vulnerable_persistent", r.summary.vulnerable_persistent}};
  j["variables"] = Json::array();
  for (const auto& v : r.variables) {
    j["variables"].push_back({{"name", v.name},
                              {"type", type_keyword(v.type)},
                              {"description", v.description},
                              {"vulnerable", v.vulnerable},
                              {"persistent", v.persistent}});
  }
  j["incomplete"] = r.incomplete;
  if (r.interruption) {
    j["interruption"] = {{"offset", r.interruption->offset},
                         {"reason", r.interruption->reason},
                         {"restore_confirmed", r.interruption->restore_confirmed}};
  } else {
    j["interruption"] = nullptr;
  }
  j["unrestored"] = r.unrestored;
  return j.dump(2) + "\n";
}

namespace detail {

inline ScanConfig config_from_json(const Json& j) {
  ScanConfig c;
  c.host = j.at("host").get<std::string>();
  c.port = j.at("port").get<std::uint16_t>();
  c.rack = j.at("rack").get<Byte>();
  c.slot = j.at("slot").get<Byte>();
  c.db = j.at("db").get<DbNumber>();
  c.read2_ms = j.at("read2_ms").get<std::uint32_t>();
  c.next_byte_ms = j.at("next_byte_ms").get<std::uint32_t>();
  c.safe_state_confirmed = j.at("safe_state_confirmed").get<bool>();
  c.allow_fast = j.at("allow_fast").get<bool>();
  const Json& ls = j.at("lockstep");
  if (!ls.is_null()) {
    c.lockstep = LockstepParams{ls.at("direct_cycles").get<std::uint32_t>(),
                                ls.at("delayed_cycles").get<std::uint32_t>(),
                                ls.at("next_byte_cycles").get<std::uint32_t>()};
  }
  return c;
}

inline ByteResult byte_from_json(const Json& j) {
  ByteResult b;
  b.offset = j.at("offset").get<std::uint32_t>();
  b.original = j.at("original").get<Byte>();
  b.direct_read = j.at("direct_read").get<Byte>();
  b.delayed_read = j.at("delayed_read").get<Byte>();
  b.write_accepted = j.at("write_accepted").get<bool>();
  b.restored = j.at("restored").get<bool>();
  const Json& bits = j.at("bits");
  if (!bits.is_array() || bits.size() != 8) throw Error(ErrorCode::Schema, "bits must list 8 verdicts");
  for (std::size_t i = 0; i < 8; ++i) {
    const auto v = parse_verdict(bits[i].get<std::string>());
    if (!v) throw Error(ErrorCode::Schema, "unknown verdict '" + bits[i].get<std::string>() + "'");
    b.bits[i] = *v;
  }
  return b;
}

}  // namespace detail

/// Parses a report and checks it against itself: per-bit verdicts, summary
/// counts and the unrestored list must all follow from the raw reads.
inline ScanReport parse_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("report is not valid JSON: ") + e.what());
  }
  ScanReport r;
  try {
    const int schema = j.at("schema").get<int>();
    if (schema != ScanReport::kSchemaVersion) {
      throw Error(ErrorCode::Schema, "unsupported report schema " + std::to_string(schema) + " (expected " +
                                         std::to_string(ScanReport::kSchemaVersion) + ")");
    }
    r.mode = j.at("mode").get<std::string>();
    r.target = j.at("target").get<std::string>();
    r.config = detail::config_from_json(j.at("config"));
    r.db = j.at("vb").at("db").get<DbNumber>();
    r.vb_size = j.at("vb").at("size").get<std::uint32_t>();
    for (const auto& b : j.at("bytes")) r.bytes.push_back(detail::byte_from_json(b));
    const Json& s = j.at("summary");
    r.summary = {s.at("total_bytes").get<std::uint32_t>(), s.at("vulnerable_direct").get<std::uint32_t>(),
                 s.at("vulnerable_persistent").get<std::uint32_t>()};
    for (const auto& v : j.at("variables")) {
      const auto type = parse_type(v.at("type").get<std::string>());
      if (!type) throw Error(ErrorCode::Schema, "unknown variable type " + v.at("type").dump());
      r.variables.push_back({v.at("name").get<std::string>(), *type, v.at("description").get<std::string>(),
                             v.at("vulnerable").get<bool>(), v.at("persistent").get<bool>()});
    }
    r.incomplete = j.at("incomplete").get<bool>();
    if (const Json& i = j.at("interruption"); !i.is_null()) {
      r.interruption = Interruption{i.at("offset").get<std::uint32_t>(), i.at("reason").get<std::string>(),
                                    i.at("restore_confirmed").get<bool>()};
    }
    r.unrestored = j.at("unrestored").get<std::vector<std::uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("malformed report: ") + e.what());
  }

  for (const auto& b : r.bytes) {
    if (b.bits != classify_byte(b.write_accepted, b.original, b.direct_read, b.delayed_read)) {
      throw Error(ErrorCode::Integrity, "verdicts of byte " + std::to_string(b.offset) + " do not match its reads");
    }
  }
  if (r.summary != summarize(r.bytes)) {
    throw Error(ErrorCode::Integrity, "summary counts disagree with the per-byte results");
  }
  std::vector<std::uint32_t> unrestored;
  for (const auto& b : r.bytes) {
    if (!b.restored) unrestored.push_back(b.offset);
  }
  if (unrestored != r.unrestored) throw Error(ErrorCode::Integrity, "unrestored list disagrees with the per-byte results");
  if (!r.incomplete && r.bytes.size() != r.vb_size) {
    throw Error(ErrorCode::Integrity, "complete report covers " + std::to_string(r.bytes.size()) + " of " +
                                          std::to_string(r.vb_size) + " bytes");
  }
  return r;
}

}  // namespace vbscan
