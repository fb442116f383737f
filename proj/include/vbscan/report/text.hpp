#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "vbscan/scan_types.hpp"

namespace vbscan {

namespace detail {

inline std::string hex_byte(Byte b) {
  char buf[5];
  std::snprintf(buf, sizeof buf, "0x%02X", b);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline char verdict_glyph(BitVerdict v) {
  switch (v) {
    case BitVerdict::NotWritable: return '-';
    case BitVerdict::WritableNotRetained: return '.';
    case BitVerdict::VulnerableTransient: return 't';
    case BitVerdict::VulnerablePersistent: return 'P';
  }
  return '?';
}

}  // namespace detail

/// Bits 7..0 of a byte, one glyph each.
inline std::string verdict_glyphs(const BitVerdicts& bits) {
  std::string s;
  for (int i = 7; i >= 0; --i) s += detail::verdict_glyph(bits[static_cast<std::size_t>(i)]);
  return s;
}

/// Variable view: name, vulnerable mark, type, description; the name column
/// is as wide as the longest name and columns are two spaces apart.
inline std::vector<std::string> variable_table(const std::vector<VariableRow>& rows) {
  std::size_t name_w = 0;
  std::size_t type_w = 0;
  for (const auto& r : rows) {
    name_w = std::max(name_w, r.name.size());
    type_w = std::max(type_w, type_display(r.type).size());
  }
  std::vector<std::string> out;
  for (const auto& r : rows) {
    std::string line = detail::pad(r.name, name_w) + "  " + (r.vulnerable ? "✓" : "✗") + "  ";
    line += r.description.empty() ? std::string(type_display(r.type))
                                  : detail::pad(std::string(type_display(r.type)), type_w) + "  " + r.description;
    out.push_back(line);
  }
  return out;
}

inline std::string render_text(const ScanReport& r) {
  using detail::hex_byte;
  using detail::pad;
  std::string out;
  out += r.mode == "oracle" ? "Oracle report\n" : "Scan report\n";
  out += "  target   " + r.target + "\n";
  out += "  block    DB" + std::to_string(r.db) + ", " + std::to_string(r.vb_size) + " bytes\n";
  if (r.config.lockstep) {
    const auto& l = *r.config.lockstep;
    out += "  timing   lockstep, direct read after " + std::to_string(l.direct_cycles) + " cycle(s), delayed read " +
           std::to_string(l.delayed_cycles) + " cycle(s) later, " + std::to_string(l.next_byte_cycles) +
           " cycle(s) between bytes\n";
  } else {
    out += "  timing   read 2 after " + std::to_string(r.config.read2_ms) + " ms, next byte after " +
           std::to_string(r.config.next_byte_ms) + " ms\n";
  }
  out += "\n" + std::to_string(r.summary.total_bytes) + " bytes scanned, " +
         std::to_string(r.summary.vulnerable_direct) + " vulnerable on direct read, " +
         std::to_string(r.summary.vulnerable_persistent) + " still vulnerable after delayed read\n";

  if (!r.bytes.empty()) {
    out += "\nByte        Orig  Direct  Delayed  Bits 7..0  Restored\n";
    for (const auto& b : r.bytes) {
      const std::string addr = "DB" + std::to_string(r.db) + ".DBB" + std::to_string(b.offset);
      out += pad(addr, 12) + hex_byte(b.original) + "  " + pad(hex_byte(b.direct_read), 6) + "  " +
             pad(hex_byte(b.delayed_read), 7) + "  " + pad(verdict_glyphs(b.bits), 9) + "  " +
             (b.restored ? "yes" : "NO") + "\n";
    }
    out += "  (P persistent, t transient, . writable not retained, - not writable)\n";
  }

  if (!r.variables.empty()) {
    out += "\nVariable, Vuln., Type, Description\n";
    for (const auto& line : variable_table(r.variables)) out += line + "\n";
  }

  if (r.incomplete) {
    out += "\nINCOMPLETE: scan stopped";
    if (r.interruption) {
      out += " at byte " + std::to_string(r.interruption->offset) + " (" + r.interruption->reason + ")";
      out += r.interruption->restore_confirmed ? "; that byte was confirmed restored"
                                               : "; that byte could NOT be confirmed restored";
    }
    out += "\n";
  }

  if (any_unrestored(r)) {
    out += "\n!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!\n";
    out += "WARNING: PLC memory may differ from its state before the scan.\n";
    for (const auto& b : r.bytes) {
      if (b.restored) continue;
      out += "  DB" + std::to_string(r.db) + ".DBB" + std::to_string(b.offset) + " should hold " +
             hex_byte(b.original) + "\n";
    }
    if (r.interruption && !r.interruption->restore_confirmed) {
      out += "  DB" + std::to_string(r.db) + ".DBB" + std::to_string(r.interruption->offset) +
             " (interrupted) state unknown\n";
    }
    out += "Check these addresses before returning the process to operation.\n";
    out += "!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!\n";
  }
  return out;
}

}  // namespace vbscan
