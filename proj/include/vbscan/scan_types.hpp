#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vbscan/address.hpp"
#include "vbscan/symbols.hpp"
#include "vbscan/wire/codec.hpp"

namespace vbscan {

struct LockstepParams {
  std::uint32_t direct_cycles = 1;     // cycles between the inversion write and the direct read
  std::uint32_t delayed_cycles = 5;    // further cycles before the delayed read
  std::uint32_t next_byte_cycles = 1;  // cycles after each restored byte

  bool operator==(const LockstepParams&) const = default;
};

struct ScanConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = wire::kDefaultPort;
  Byte rack = 0;
  Byte slot = 2;
  DbNumber db = 0;
  std::uint32_t read2_ms = 5000;
  std::uint32_t next_byte_ms = 1000;
  bool safe_state_confirmed = false;
  bool allow_fast = false;  // permits next_byte_ms below the 1 s floor
  std::optional<LockstepParams> lockstep;

  bool operator==(const ScanConfig&) const = default;
};

inline constexpr std::uint32_t kMinNextByteMs = 1000;

enum class BitVerdict : std::uint8_t {
  NotWritable,
  WritableNotRetained,
  VulnerableTransient,
  VulnerablePersistent,
};

inline std::string_view to_string(BitVerdict v) {
  switch (v) {
    case BitVerdict::NotWritable: return "NOT_WRITABLE";
    case BitVerdict::WritableNotRetained: return "WRITABLE_NOT_RETAINED";
    case BitVerdict::VulnerableTransient: return "VULNERABLE_TRANSIENT";
    case BitVerdict::VulnerablePersistent: return "VULNERABLE_PERSISTENT";
  }
  return "?";
}

inline std::optional<BitVerdict> parse_verdict(std::string_view s) {
  for (auto v : {BitVerdict::NotWritable, BitVerdict::WritableNotRetained, BitVerdict::VulnerableTransient,
                 BitVerdict::VulnerablePersistent}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

inline bool is_vulnerable(BitVerdict v) {
  return v == BitVerdict::VulnerableTransient || v == BitVerdict::VulnerablePersistent;
}

// The direct read decides whether the inversion took at all; the delayed read
// only decides persistence of a bit that did.
inline BitVerdict classify_bit(bool write_accepted, bool original, bool direct, bool delayed) {
  if (!write_accepted) return BitVerdict::NotWritable;
  if (direct == original) return BitVerdict::WritableNotRetained;
  if (delayed == original) return BitVerdict::VulnerableTransient;
  return BitVerdict::VulnerablePersistent;
}

using BitVerdicts = std::array<BitVerdict, 8>;

inline BitVerdicts classify_byte(bool write_accepted, Byte original, Byte direct, Byte delayed) {
  BitVerdicts out{};
  for (int i = 0; i < 8; ++i) {
    auto bit = [i](Byte b) { return ((b >> i) & 1) != 0; };
    out[static_cast<std::size_t>(i)] = classify_bit(write_accepted, bit(original), bit(direct), bit(delayed));
  }
  return out;
}

struct ByteResult {
  std::uint32_t offset = 0;
  Byte original = 0;
  Byte direct_read = 0;
  Byte delayed_read = 0;
  bool write_accepted = false;
  bool restored = true;
  BitVerdicts bits{};

  bool vulnerable() const {
    for (auto v : bits) {
      if (is_vulnerable(v)) return true;
    }
    return false;
  }
  bool persistent() const {
    for (auto v : bits) {
      if (v == BitVerdict::VulnerablePersistent) return true;
    }
    return false;
  }

  bool operator==(const ByteResult&) const = default;
};

inline ByteResult make_byte_result(std::uint32_t offset, bool accepted, Byte original, Byte direct, Byte delayed,
                                   bool restored) {
  return {offset, original, direct, delayed, accepted, restored, classify_byte(accepted, original, direct, delayed)};
}

struct ScanSummary {
  std::uint32_t total_bytes = 0;
  std::uint32_t vulnerable_direct = 0;
  std::uint32_t vulnerable_persistent = 0;

  bool operator==(const ScanSummary&) const = default;
};

inline ScanSummary summarize(const std::vector<ByteResult>& bytes) {
  ScanSummary s;
  s.total_bytes = static_cast<std::uint32_t>(bytes.size());
  for (const auto& b : bytes) {
    if (b.vulnerable()) ++s.vulnerable_direct;
    if (b.persistent()) ++s.vulnerable_persistent;
  }
  return s;
}

struct VariableRow {
  std::string name;
  VarType type = VarType::Bool;
  std::string description;
  bool vulnerable = false;
  bool persistent = false;

  bool operator==(const VariableRow&) const = default;
};

// A scan that stopped mid-byte: where, and whether the original value was
// confirmed written back.
struct Interruption {
  std::uint32_t offset = 0;
  std::string reason;
  bool restore_confirmed = false;

  bool operator==(const Interruption&) const = default;
};

struct ScanReport {
  static constexpr int kSchemaVersion = 1;

  std::string mode = "scan";  // "scan" or "oracle"
  std::string target;         // program name or host:port
  ScanConfig config;
  DbNumber db = 0;
  std::uint32_t vb_size = 0;
  std::vector<ByteResult> bytes;
  ScanSummary summary;
  std::vector<VariableRow> variables;
  bool incomplete = false;
  std::optional<Interruption> interruption;
  std::vector<std::uint32_t> unrestored;

  bool operator==(const ScanReport&) const = default;
};

inline std::vector<VariableRow> variable_rows(const SymbolMap& symbols, DbNumber db,
                                              const std::vector<ByteResult>& bytes) {
  std::vector<VariableRow> rows;
  for (const auto& sym : symbols) {
    if (sym.db != db) continue;
    VariableRow row{sym.name, sym.type, sym.description, false, false};
    for (const auto& [offset, bit] : sym.bits()) {
      for (const auto& b : bytes) {
        if (b.offset != offset) continue;
        const BitVerdict v = b.bits[bit];
        row.vulnerable = row.vulnerable || is_vulnerable(v);
        row.persistent = row.persistent || v == BitVerdict::VulnerablePersistent;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Fills summary, unrestored and (when symbols are given) the variable view.
inline void finalize_report(ScanReport& report, const SymbolMap* symbols) {
  report.summary = summarize(report.bytes);
  report.unrestored.clear();
  for (const auto& b : report.bytes) {
    if (!b.restored) report.unrestored.push_back(b.offset);
  }
  if (symbols != nullptr) report.variables = variable_rows(*symbols, report.db, report.bytes);
}

inline bool any_unrestored(const ScanReport& r) {
  return !r.unrestored.empty() || (r.interruption && !r.interruption->restore_confirmed);
}

}  // namespace vbscan
