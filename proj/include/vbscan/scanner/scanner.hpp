#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vbscan/error.hpp"
#include "vbscan/link.hpp"
#include "vbscan/scan_types.hpp"

namespace vbscan {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// Refuses unsafe configurations before any traffic is sent.
inline void validate(const ScanConfig& config) {
  if (!config.safe_state_confirmed) {
    throw Error(ErrorCode::SafeState,
                "confirm the plant is in a safe state (outputs isolated) before scanning");
  }
  if (!config.lockstep && config.next_byte_ms < kMinNextByteMs && !config.allow_fast) {
    throw Error(ErrorCode::Config,
                "next byte time of " + std::to_string(config.next_byte_ms) +
                    " ms is below 1000 ms; a loaded PLC may answer late or drop requests and skew "
                    "results (pass the fast-scan override to proceed anyway)");
  }
}

struct Session {
  PlcLink* link = nullptr;
  ScanConfig config;
  VbInfo vb;
  Sleeper sleep = sleep_for;

  void wait_direct() const {
    if (config.lockstep && config.lockstep->direct_cycles > 0) link->step(config.lockstep->direct_cycles);
  }
  void wait_read2() const {
    if (config.lockstep) {
      if (config.lockstep->delayed_cycles > 0) link->step(config.lockstep->delayed_cycles);
    } else {
      sleep(std::chrono::milliseconds(config.read2_ms));
    }
  }
  void wait_next_byte() const {
    if (config.lockstep) {
      if (config.lockstep->next_byte_cycles > 0) link->step(config.lockstep->next_byte_cycles);
    } else {
      sleep(std::chrono::milliseconds(config.next_byte_ms));
    }
  }
};

/// Size of a VB found by probing 1-byte reads: exponential search for an
/// OUT_OF_RANGE offset, then bisection.
inline std::uint32_t probe_vb_size(PlcLink& link, DbNumber db) {
  auto readable = [&](std::uint64_t offset) {
    try {
      link.read({db, static_cast<std::uint32_t>(offset), 1});
      return true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::OutOfRange) return false;
      throw;
    }
  };
  link.read({db, 0, 0});  // NO_SUCH_VB surfaces here
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  std::uint64_t lo = 0;  // every offset < lo is readable
  std::uint64_t hi = 1;  // offset hi-1 unknown
  while (hi < kLimit && readable(hi - 1)) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= kLimit && readable(kLimit - 1)) return static_cast<std::uint32_t>(kLimit - 1);
  // offset hi-1 is not readable; first unreadable offset lies in [lo, hi-1]
  std::uint64_t a = lo, b = hi - 1;
  while (a < b) {
    const std::uint64_t mid = a + (b - a) / 2;
    if (readable(mid)) {
      a = mid + 1;
    } else {
      b = mid;
    }
  }
  return static_cast<std::uint32_t>(a);
}

/// Validates, then locates the target VB (LISTVB, falling back to probing).
inline Session phase1_setup(const ScanConfig& config, PlcLink& link, Sleeper sleep = sleep_for) {
  validate(config);
  Session s{&link, config, {}, std::move(sleep)};
  try {
    for (const auto& vb : link.list_vbs()) {
      if (vb.number == config.db) {
        s.vb = vb;
        return s;
      }
    }
    throw Error(ErrorCode::NoSuchVb, "DB" + std::to_string(config.db) + " is not present on the target");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Protocol) throw;
  }
  s.vb = {config.db, probe_vb_size(link, config.db), false};
  return s;
}

/// One byte: read original, write the inverted byte, direct read, wait,
/// delayed read, write the original back, confirm with a final read.
/// `original_seen` receives the original as soon as it is known, so a caller
/// can still restore the byte if the link fails part way.
inline ByteResult phase2_scan_byte(const Session& s, std::uint32_t offset,
                                   std::optional<Byte>* original_seen = nullptr) {
  PlcLink& link = *s.link;
  const DbNumber db = s.vb.number;
  const Byte original = link.read_byte(db, offset);
  if (original_seen != nullptr) *original_seen = original;
  try {
    link.write_byte(db, offset, invert_byte(original));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AccessDenied) throw;
    return make_byte_result(offset, false, original, original, original, true);
  }
  s.wait_direct();
  const Byte direct = link.read_byte(db, offset);
  s.wait_read2();
  const Byte delayed = link.read_byte(db, offset);
  link.write_byte(db, offset, original);
  const Byte final_read = link.read_byte(db, offset);
  return make_byte_result(offset, true, original, direct, delayed, final_read == original);
}

inline ScanReport phase3_report(const Session& s, std::vector<ByteResult> results, const SymbolMap* symbols,
                                bool incomplete = false, std::optional<Interruption> interruption = {}) {
  ScanReport r;
  r.mode = "scan";
  r.target = s.config.host + ":" + std::to_string(s.config.port);
  r.config = s.config;
  r.db = s.vb.number;
  r.vb_size = s.vb.size;
  r.bytes = std::move(results);
  r.incomplete = incomplete;
  r.interruption = std::move(interruption);
  finalize_report(r, symbols);
  return r;
}

struct ScanHooks {
  Sleeper sleep = sleep_for;
  /// Called for each finished byte (progress output).
  std::function<void(const ByteResult&)> on_byte;
  /// Re-establishes the link after a transport failure; used once to put
  /// the interrupted byte back.
  std::function<void()> reconnect;
};

/// Scans every byte of the target VB in ascending order, one byte at a
/// time, waiting Next Byte Time after each. The link must already be
/// connected. A transport failure mid-scan yields an incomplete report.
inline ScanReport scan(const ScanConfig& config, PlcLink& link, const SymbolMap* symbols = nullptr,
                       ScanHooks hooks = {}) {
  const Session session = phase1_setup(config, link, hooks.sleep);
  std::vector<ByteResult> results;
  results.reserve(session.vb.size);
  for (std::uint32_t offset = 0; offset < session.vb.size; ++offset) {
    std::optional<Byte> original;
    try {
      ByteResult r = phase2_scan_byte(session, offset, &original);
      if (hooks.on_byte) hooks.on_byte(r);
      results.push_back(r);
      original.reset();  // already written back
      session.wait_next_byte();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConnectionFailed && e.code() != ErrorCode::Timeout) throw;
      Interruption stop{offset, e.what(), false};
      if (original) {
        try {
          if (hooks.reconnect) hooks.reconnect();
          link.write_byte(session.vb.number, offset, *original);
          stop.restore_confirmed = link.read_byte(session.vb.number, offset) == *original;
        } catch (const Error&) {
          stop.restore_confirmed = false;
        }
      } else {
        stop.restore_confirmed = true;  // nothing was written yet
      }
      return phase3_report(session, std::move(results), symbols, true, std::move(stop));
    }
  }
  return phase3_report(session, std::move(results), symbols);
}

}  // namespace vbscan
