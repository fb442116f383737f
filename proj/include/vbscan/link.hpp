#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vbscan/address.hpp"
#include "vbscan/memory.hpp"

namespace vbscan {

// Request/response access to a PLC's VB memory. Implemented by the SVBP
// client; tests wrap it to inject transport faults.
class PlcLink {
 public:
  virtual ~PlcLink() = default;

  virtual std::vector<Byte> read(const ByteSpan& span) = 0;
  virtual void write(const ByteSpan& span, std::span<const Byte> data) = 0;
  /// Advances a LOCKSTEP target; returns its total cycle count.
  virtual std::uint64_t step(std::uint32_t cycles) = 0;
  virtual std::vector<VbInfo> list_vbs() = 0;

  Byte read_byte(DbNumber db, std::uint32_t offset) { return read({db, offset, 1}).at(0); }
  void write_byte(DbNumber db, std::uint32_t offset, Byte value) {
    const Byte raw[1] = {value};
    write({db, offset, 1}, raw);
  }

  // Read-modify-write of one bit; the byte's other bits are written back as read.
  void write_bit(const BitAddress& a, bool value) {
    Byte b = read_byte(a.db, a.byte_offset);
    b = static_cast<Byte>(value ? (b | (1u << a.bit)) : (b & ~(1u << a.bit)));
    write_byte(a.db, a.byte_offset, b);
  }
};

}  // namespace vbscan
