#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vbscan/error.hpp"
#include "vbscan/fb.hpp"
#include "vbscan/memory.hpp"
#include "vbscan/program.hpp"

namespace vbscan {

struct ClockMode {
  enum class Kind { Lockstep, Wallclock };
  Kind kind = Kind::Lockstep;
  std::chrono::milliseconds cycle_time{0};

  static ClockMode lockstep() { return {Kind::Lockstep, std::chrono::milliseconds{0}}; }
  static ClockMode wallclock(std::chrono::milliseconds cycle) { return {Kind::Wallclock, cycle}; }
  bool is_lockstep() const { return kind == Kind::Lockstep; }
};

struct InstanceStatus {
  bool faulted = false;  // last cycle skipped on a pointer fault
  std::uint64_t fault_count = 0;
  std::map<std::string, PointerValue, std::less<>> pointer_used;  // pointer read through last cycle
  std::map<std::string, std::int64_t, std::less<>> pointer_values;

  bool operator==(const InstanceStatus&) const = default;
};

struct RuntimeState {
  Snapshot memory;
  std::vector<FbShadow> shadows;
  std::vector<InstanceStatus> statuses;
  std::uint64_t cycles = 0;
};

// Soft-PLC runtime. One call of run_cycle() is one scan cycle:
// for every instance in program order, DIRECT/GVB inputs are copied into the
// fVB, POINTER inputs are read through, the FB body runs, and outputs/statics
// are written back; wires run at their position between instances.
//
// Network access goes through network_read/network_write, which serialize
// against whole cycles, so remote writes only ever land between cycles.
class Runtime {
 public:
  explicit Runtime(Program program, ClockMode mode = ClockMode::lockstep())
      : program_(std::move(program)), mode_(mode),
        shadows_(program_.instances.size()), statuses_(program_.instances.size()) {
    for (const auto& vb : program_.vbs) {
      store_.add_block(vb.number, vb.size, vb.write_protected, vb.initial);
    }
    for (const auto& inst : program_.instances) {
      used_bits_.push_back(inst.layout().used_bits());
      for (const auto& [name, binding] : inst.bindings) {
        const LayoutVar& var = *inst.layout().find(name);
        if (binding.kind == BindingKind::Default) {
          write_value(inst.fvb, var, binding.value);
        } else if (binding.kind == BindingKind::Pointer) {
          const auto raw = binding.pointer.encode();
          store_.write_bytes({inst.fvb, var.offset, PointerValue::kEncodedSize}, raw, Origin::Internal);
        }
      }
    }
  }

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;
  ~Runtime() { stop(); }

  const Program& program() const { return program_; }
  const ClockMode& clock_mode() const { return mode_; }

  /// Unsynchronized access for in-process tools; do not use while the
  /// wall-clock thread or a server is running.
  MemoryStore& store() { return store_; }
  const MemoryStore& store() const { return store_; }

  void run_cycle() {
    std::lock_guard lock(cycle_mutex_);
    cycle_locked();
  }

  void step(std::uint64_t n) {
    if (!mode_.is_lockstep()) throw Error(ErrorCode::Mode, "step requires LOCKSTEP clock mode");
    std::lock_guard lock(cycle_mutex_);
    for (std::uint64_t i = 0; i < n; ++i) cycle_locked();
  }

  std::vector<Byte> network_read(const ByteSpan& span) const {
    std::lock_guard lock(cycle_mutex_);
    return store_.read_bytes(span);
  }

  void network_write(const ByteSpan& span, std::span<const Byte> data) {
    std::lock_guard lock(cycle_mutex_);
    store_.write_bytes(span, data, Origin::Network);
  }

  std::vector<VbInfo> list_vbs() const { return store_.list(); }

  std::uint64_t cycle_count() const { return cycles_.load(); }

  InstanceStatus status(std::string_view instance) const {
    std::lock_guard lock(cycle_mutex_);
    for (std::size_t i = 0; i < program_.instances.size(); ++i) {
      if (program_.instances[i].name == instance) return statuses_[i];
    }
    throw Error(ErrorCode::Schema, "no instance named '" + std::string(instance) + "'");
  }

  RuntimeState save_state() const {
    std::lock_guard lock(cycle_mutex_);
    return {store_.snapshot(), shadows_, statuses_, cycles_.load()};
  }

  void restore_state(const RuntimeState& state) {
    std::lock_guard lock(cycle_mutex_);
    store_.restore(state.memory);
    shadows_ = state.shadows;
    statuses_ = state.statuses;
    cycles_ = state.cycles;
  }

  /// Starts free-running cycles in WALLCLOCK mode. In LOCKSTEP cycles only
  /// come from step(), so this does nothing.
  void start() {
    if (mode_.is_lockstep()) return;
    if (worker_.joinable()) return;
    running_ = true;
    worker_ = std::thread([this] {
      auto next = std::chrono::steady_clock::now();
      std::unique_lock lock(wake_mutex_);
      while (running_) {
        next += mode_.cycle_time;
        run_cycle();
        wake_.wait_until(lock, next, [this] { return !running_; });
      }
    });
  }

  void stop() {
    {
      std::lock_guard lock(wake_mutex_);
      running_ = false;
    }
    wake_.notify_all();
    if (worker_.joinable()) worker_.join();
  }

 private:
  void cycle_locked() {
    const std::size_t n = program_.instances.size();
    for (std::size_t pos = 0; pos <= n; ++pos) {
      for (const auto& w : program_.wiring) {
        if (w.position == pos) store_.write_bit(w.destination, store_.read_bit(w.source), Origin::Internal);
      }
      if (pos < n) execute(pos);
    }
    ++cycles_;
  }

  void execute(std::size_t index) {
    const FbInstance& inst = program_.instances[index];
    const FbLayout& layout = inst.layout();
    InstanceStatus& status = statuses_[index];
    status.faulted = false;
    status.pointer_used.clear();
    status.pointer_values.clear();

    // (1) per-cycle input copies
    for (const auto& [name, binding] : inst.bindings) {
      const LayoutVar& var = *layout.find(name);
      if (binding.kind == BindingKind::Direct) {
        write_value(inst.fvb, var, binding.value);
      } else if (binding.kind == BindingKind::Gvb) {
        if (const auto* bit = std::get_if<BitAddress>(&binding.source)) {
          store_.write_bit({inst.fvb, var.offset, *var.bit}, store_.read_bit(*bit), Origin::Internal);
        } else {
          const auto& span = std::get<ByteSpan>(binding.source);
          store_.write_bytes({inst.fvb, var.offset, span.length}, store_.read_bytes(span), Origin::Internal);
        }
      }
    }

    // (2) pointer read-through from whatever the slot holds now, then the
    // configured pointer is passed into the slot again
    for (const auto& [name, binding] : inst.bindings) {
      if (binding.kind != BindingKind::Pointer) continue;
      const LayoutVar& var = *layout.find(name);
      const ByteSpan slot{inst.fvb, var.offset, PointerValue::kEncodedSize};
      try {
        const auto raw = store_.read_bytes(slot);
        std::array<Byte, PointerValue::kEncodedSize> enc{};
        std::copy(raw.begin(), raw.end(), enc.begin());
        const PointerValue p = PointerValue::decode(enc);
        status.pointer_used[name] = p;
        status.pointer_values[name] = read_through(p, var.type);
      } catch (const Error&) {
        status.faulted = true;
      }
      store_.write_bytes(slot, binding.pointer.encode(), Origin::Internal);
    }

    // (3) FB body
    if (status.faulted) {
      ++status.fault_count;
    } else {
      run_body(inst, status, shadows_[index]);
    }

    // Bits outside any declared variable read back as zero.
    const auto& mask = used_bits_[index];
    auto bytes = store_.read_bytes({inst.fvb, 0, layout.size});
    bool dirty = false;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      const Byte masked = bytes[i] & mask[i];
      dirty = dirty || masked != bytes[i];
      bytes[i] = masked;
    }
    if (dirty) store_.write_bytes({inst.fvb, 0, layout.size}, bytes, Origin::Internal);
  }

  std::int64_t read_through(const PointerValue& p, VarType type) const {
    if (type == VarType::Bool) return store_.read_bit(p.target()) ? 1 : 0;
    if (p.bit() != 0) throw Error(ErrorCode::Range, "multi-byte pointer target must be byte aligned");
    if (type == VarType::Int) return store_.read_i16(p.db, p.byte_offset());
    return store_.read_i32(p.db, p.byte_offset());
  }

  std::int64_t read_value(DbNumber fvb, const LayoutVar& var) const {
    switch (var.type) {
      case VarType::Bool: return store_.read_bit({fvb, var.offset, *var.bit}) ? 1 : 0;
      case VarType::Int: return store_.read_i16(fvb, var.offset);
      case VarType::DInt:
      case VarType::Time: return store_.read_i32(fvb, var.offset);
    }
    return 0;
  }

  void write_value(DbNumber fvb, const LayoutVar& var, std::int64_t v) {
    switch (var.type) {
      case VarType::Bool: store_.write_bit({fvb, var.offset, *var.bit}, v != 0, Origin::Internal); break;
      case VarType::Int: store_.write_i16(fvb, var.offset, static_cast<std::int16_t>(v), Origin::Internal); break;
      case VarType::DInt:
      case VarType::Time: store_.write_i32(fvb, var.offset, static_cast<std::int32_t>(v), Origin::Internal); break;
    }
  }

  std::int64_t get(const FbInstance& inst, std::string_view name) const {
    return read_value(inst.fvb, *inst.layout().find(name));
  }

  void put(const FbInstance& inst, std::string_view name, std::int64_t v) {
    write_value(inst.fvb, *inst.layout().find(name), v);
  }

  void run_body(const FbInstance& inst, const InstanceStatus& status, FbShadow& shadow) {
    auto i16 = [](std::int64_t v) { return static_cast<std::int16_t>(v); };
    auto i32 = [](std::int64_t v) { return static_cast<std::int32_t>(v); };
    switch (inst.kind) {
      case FbKind::CTU: {
        CtuIo io{get(inst, "CU") != 0, get(inst, "R") != 0, i16(get(inst, "PV")), false, i16(get(inst, "CV"))};
        ctu_step(io, shadow);
        put(inst, "Q", io.q);
        put(inst, "CV", io.cv);
        break;
      }
      case FbKind::CTD: {
        CtdIo io{get(inst, "CD") != 0, get(inst, "LD") != 0, i16(get(inst, "PV")), false, i16(get(inst, "CV"))};
        ctd_step(io, shadow);
        put(inst, "Q", io.q);
        put(inst, "CV", io.cv);
        break;
      }
      case FbKind::TP: {
        TpIo io{get(inst, "IN") != 0, i32(get(inst, "PT")), false, 0};
        tp_step(io, shadow);
        put(inst, "Q", io.q);
        put(inst, "ET", io.et);
        break;
      }
      case FbKind::ALERT: {
        AlertIo io;
        io.trig = get(inst, "TRIG") != 0;
        io.busy = get(inst, "BUSY") != 0;
        io.sent = i16(get(inst, "SENT"));
        io.watch_dog_time = i32(get(inst, "WATCH_DOG_TIME"));
        io.username = i16(status.pointer_values.at("USERNAME"));
        alert_step(io, shadow);
        put(inst, "BUSY", io.busy);
        put(inst, "SENT", io.sent);
        put(inst, "USER", io.user);
        break;
      }
      case FbKind::TCONN: {
        TconnIo io{get(inst, "REQ") != 0, get(inst, "BUSY") != 0, false, i16(get(inst, "ID"))};
        tconn_step(io, shadow);
        put(inst, "BUSY", io.busy);
        put(inst, "CONNECTED", io.connected);
        break;
      }
    }
  }

  Program program_;
  ClockMode mode_;
  MemoryStore store_;
  std::vector<FbShadow> shadows_;
  std::vector<InstanceStatus> statuses_;
  std::vector<std::vector<Byte>> used_bits_;
  std::atomic<std::uint64_t> cycles_{0};

  mutable std::mutex cycle_mutex_;
  std::mutex wake_mutex_;
  std::condition_variable wake_;
  bool running_ = false;
  std::thread worker_;
};

}  // namespace vbscan
