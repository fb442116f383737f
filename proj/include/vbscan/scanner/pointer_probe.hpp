#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vbscan/error.hpp"
#include "vbscan/link.hpp"
#include "vbscan/scanner/scanner.hpp"

namespace vbscan {

struct PointerProbeReport {
  ByteSpan slot;
  bool opaque = false;       // slot did not hold a usable pointer
  std::string opaque_reason;
  std::optional<PointerValue> pointer;
  ByteSpan target;
  std::vector<ByteResult> slot_results;
  std::vector<ByteResult> target_results;

  /// A write into the slot was accepted, so the pointer can be redirected at
  /// least until the logic passes it again.
  bool slot_writable() const {
    for (const auto& r : slot_results) {
      if (r.write_accepted) return true;
    }
    return false;
  }
  bool slot_retained() const {
    for (const auto& r : slot_results) {
      if (r.vulnerable()) return true;
    }
    return false;
  }
  bool vulnerable_by_proxy() const {
    for (const auto& r : target_results) {
      if (r.vulnerable()) return true;
    }
    return false;
  }
  bool persistent_by_proxy() const {
    for (const auto& r : target_results) {
      if (r.persistent()) return true;
    }
    return false;
  }
};

/// Reads the pointer held in `slot`, scans the slot bytes themselves, then
/// scans `target_length` bytes at the pointed-to address with the same
/// per-byte procedure. The session supplies the link, timers and safe-state
/// confirmation; its VB is replaced per area scanned.
inline PointerProbeReport pointer_probe(const Session& session, const ByteSpan& slot,
                                        std::uint32_t target_length = 2) {
  PointerProbeReport out;
  out.slot = slot;
  if (slot.length != PointerValue::kEncodedSize) {
    throw Error(ErrorCode::Config, "pointer slot must be 6 bytes, got " + std::to_string(slot.length));
  }
  PlcLink& link = *session.link;
  const auto raw = link.read(slot);
  std::array<Byte, PointerValue::kEncodedSize> enc{};
  std::copy(raw.begin(), raw.end(), enc.begin());
  try {
    out.pointer = PointerValue::decode(enc);
  } catch (const Error& e) {
    out.opaque = true;
    out.opaque_reason = e.what();
    return out;
  }
  out.target = {out.pointer->db, out.pointer->byte_offset(), target_length};
  try {
    link.read(out.target);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSuchVb && e.code() != ErrorCode::OutOfRange) throw;
    out.opaque = true;
    out.opaque_reason = std::string("pointer target unreachable: ") + e.what();
    return out;
  }

  Session slot_session = session;
  slot_session.vb = {slot.db, static_cast<std::uint32_t>(slot.end()), false};
  for (std::uint32_t i = 0; i < slot.length; ++i) {
    out.slot_results.push_back(phase2_scan_byte(slot_session, slot.start + i));
    slot_session.wait_next_byte();
  }
  Session target_session = session;
  target_session.vb = {out.target.db, static_cast<std::uint32_t>(out.target.end()), false};
  for (std::uint32_t i = 0; i < out.target.length; ++i) {
    out.target_results.push_back(phase2_scan_byte(target_session, out.target.start + i));
    target_session.wait_next_byte();
  }
  return out;
}

inline std::string render_probe(const PointerProbeReport& p) {
  std::string out = "Pointer probe of " + to_string(p.slot) + "\n";
  if (p.opaque) return out + "  pointer opaque, probe skipped: " + p.opaque_reason + "\n";
  out += "  pointer value      " + to_string(*p.pointer) + "\n";
  out += "  slot writable      " + std::string(p.slot_writable() ? "yes (redirection possible)" : "no") + "\n";
  out += "  slot retained      " + std::string(p.slot_retained() ? "yes" : "no") + "\n";
  out += "  target             " + to_string(p.target) + "\n";
  out += "  vulnerable by proxy " + std::string(p.vulnerable_by_proxy() ? "yes" : "no") +
         (p.persistent_by_proxy() ? " (persistent)" : "") + "\n";
  auto rows = [&](const char* title, const std::vector<ByteResult>& rs, DbNumber db) {
    out += std::string("  ") + title + "\n";
    for (const auto& r : rs) {
      std::string verdicts;
      for (int b = 7; b >= 0; --b) {
        switch (r.bits[static_cast<std::size_t>(b)]) {
          case BitVerdict::NotWritable: verdicts += '-'; break;
          case BitVerdict::WritableNotRetained: verdicts += '.'; break;
          case BitVerdict::VulnerableTransient: verdicts += 't'; break;
          case BitVerdict::VulnerablePersistent: verdicts += 'P'; break;
        }
      }
      out += "    DB" + std::to_string(db) + ".DBB" + std::to_string(r.offset) + "  " + verdicts +
             (r.restored ? "" : "  NOT RESTORED") + "\n";
    }
  };
  rows("slot bytes (bit 7..0):", p.slot_results, p.slot.db);
  rows("target bytes (bit 7..0):", p.target_results, p.target.db);
  return out;
}

}  // namespace vbscan
