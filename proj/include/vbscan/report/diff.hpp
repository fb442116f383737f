#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vbscan/error.hpp"
#include "vbscan/report/text.hpp"
#include "vbscan/scan_types.hpp"

namespace vbscan {

struct BitDelta {
  std::uint32_t offset = 0;
  std::uint8_t bit = 0;
  BitVerdict before = BitVerdict::NotWritable;
  BitVerdict after = BitVerdict::NotWritable;

  bool operator==(const BitDelta&) const = default;
};

struct ReportDiff {
  DbNumber db = 0;
  std::vector<BitDelta> bits;
  ScanSummary a;
  ScanSummary b;

  bool empty() const { return bits.empty() && a == b; }
  std::int64_t vulnerable_delta() const {
    return std::int64_t{b.vulnerable_direct} - std::int64_t{a.vulnerable_direct};
  }
  std::int64_t persistent_delta() const {
    return std::int64_t{b.vulnerable_persistent} - std::int64_t{a.vulnerable_persistent};
  }
};

/// Per-bit verdict changes from `a` to `b`; both must describe the same VB.
inline ReportDiff diff(const ScanReport& a, const ScanReport& b) {
  if (a.db != b.db || a.vb_size != b.vb_size) {
    throw Error(ErrorCode::ShapeMismatch, "cannot compare DB" + std::to_string(a.db) + " (" +
                                              std::to_string(a.vb_size) + " bytes) with DB" + std::to_string(b.db) +
                                              " (" + std::to_string(b.vb_size) + " bytes)");
  }
  ReportDiff d{a.db, {}, a.summary, b.summary};
  for (const auto& ra : a.bytes) {
    for (const auto& rb : b.bytes) {
      if (rb.offset != ra.offset) continue;
      for (std::uint8_t i = 0; i < 8; ++i) {
        if (ra.bits[i] != rb.bits[i]) d.bits.push_back({ra.offset, i, ra.bits[i], rb.bits[i]});
      }
    }
  }
  return d;
}

inline std::string render_diff(const ReportDiff& d) {
  using detail::pad;
  auto signed_str = [](std::int64_t v) { return (v > 0 ? "+" : "") + std::to_string(v); };
  std::string out;
  out += "Summary                     A     B     delta\n";
  out += "total bytes                 " + pad(std::to_string(d.a.total_bytes), 6) +
         pad(std::to_string(d.b.total_bytes), 6) +
         signed_str(std::int64_t{d.b.total_bytes} - std::int64_t{d.a.total_bytes}) + "\n";
  out += "vulnerable (direct read)    " + pad(std::to_string(d.a.vulnerable_direct), 6) +
         pad(std::to_string(d.b.vulnerable_direct), 6) + signed_str(d.vulnerable_delta()) + "\n";
  out += "vulnerable (delayed read)   " + pad(std::to_string(d.a.vulnerable_persistent), 6) +
         pad(std::to_string(d.b.vulnerable_persistent), 6) + signed_str(d.persistent_delta()) + "\n";
  if (d.bits.empty()) return out + "\nno per-bit verdict changes\n";
  out += "\nAddress           A                      B\n";
  for (const auto& x : d.bits) {
    const std::string addr = "DB" + std::to_string(d.db) + ".DBX" + std::to_string(x.offset) + "." +
                             std::to_string(x.bit);
    out += pad(addr, 18) + pad(std::string(to_string(x.before)), 23) + std::string(to_string(x.after)) + "\n";
  }
  return out;
}

}  // namespace vbscan
