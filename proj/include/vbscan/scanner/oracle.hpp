#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vbscan/error.hpp"
#include "vbscan/runtime.hpp"
#include "vbscan/scan_types.hpp"

namespace vbscan {

// Ground truth by direct memory access: every bit is flipped on its own with a
// network-origin write, the runtime is stepped the same cycle counts the
// scanner uses, the bit is sampled, and the whole runtime (memory and hidden
// FB state) is rolled back before the next bit.
inline ScanReport oracle_scan(Runtime& runtime, DbNumber db, const LockstepParams& params,
                              const SymbolMap* symbols = nullptr) {
  if (!runtime.clock_mode().is_lockstep()) {
    throw Error(ErrorCode::Mode, "oracle requires a LOCKSTEP runtime");
  }
  const std::uint32_t size = runtime.store().size_of(db);
  ScanReport report;
  report.mode = "oracle";
  report.target = runtime.program().name;
  report.config.host.clear();
  report.config.port = 0;
  report.config.db = db;
  report.config.safe_state_confirmed = true;
  report.config.lockstep = params;
  report.db = db;
  report.vb_size = size;

  for (std::uint32_t offset = 0; offset < size; ++offset) {
    const Byte original = runtime.network_read({db, offset, 1})[0];
    Byte direct = original;
    Byte delayed = original;
    bool accepted = true;
    for (std::uint8_t bit = 0; bit < 8; ++bit) {
      const RuntimeState saved = runtime.save_state();
      const Byte mask = static_cast<Byte>(1u << bit);
      const Byte flipped[1] = {static_cast<Byte>(original ^ mask)};
      try {
        runtime.network_write({db, offset, 1}, flipped);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AccessDenied) throw;
        accepted = false;
        break;
      }
      runtime.step(params.direct_cycles);
      const bool direct_bit = (runtime.network_read({db, offset, 1})[0] & mask) != 0;
      runtime.step(params.delayed_cycles);
      const bool delayed_bit = (runtime.network_read({db, offset, 1})[0] & mask) != 0;
      runtime.restore_state(saved);
      direct = static_cast<Byte>(direct_bit ? (direct | mask) : (direct & ~mask));
      delayed = static_cast<Byte>(delayed_bit ? (delayed | mask) : (delayed & ~mask));
    }
    if (!accepted) {
      direct = delayed = original;
    }
    report.bytes.push_back(make_byte_result(offset, accepted, original, direct, delayed, true));
  }
  finalize_report(report, symbols);
  return report;
}

}  // namespace vbscan
