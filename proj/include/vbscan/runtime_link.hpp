#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vbscan/link.hpp"
#include "vbscan/runtime.hpp"

namespace vbscan {

// PlcLink straight onto an in-process Runtime: network-origin access without
// a socket. Used by the in-process CLI paths and by tests.
class RuntimeLink : public PlcLink {
 public:
  explicit RuntimeLink(Runtime& runtime) : runtime_(runtime) {}

  std::vector<Byte> read(const ByteSpan& span) override { return runtime_.network_read(span); }
  void write(const ByteSpan& span, std::span<const Byte> data) override { runtime_.network_write(span, data); }
  std::uint64_t step(std::uint32_t cycles) override {
    runtime_.step(cycles);
    return runtime_.cycle_count();
  }
  std::vector<VbInfo> list_vbs() override { return runtime_.list_vbs(); }

 private:
  Runtime& runtime_;
};

}  // namespace vbscan
