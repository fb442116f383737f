#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vbscan/vbscan.hpp"

namespace testing_support {

using namespace vbscan;

inline Program bundled(const std::string& name) { return load_program(resolve_program(name).string()); }

inline SymbolMap bundled_symbols(const std::string& name) {
  return load_symbol_map(resolve_bundled(name, ".csv").string());
}

/// LOCKSTEP runtime that has already run one cycle, so computed outputs hold
/// their settled values when the first byte is sampled.
inline std::unique_ptr<Runtime> settled(const Program& p) {
  auto rt = std::make_unique<Runtime>(p, ClockMode::lockstep());
  rt->step(1);
  return rt;
}

inline ScanConfig lockstep_config(DbNumber db, LockstepParams params = {}) {
  ScanConfig c;
  c.db = db;
  c.safe_state_confirmed = true;
  c.lockstep = params;
  return c;
}

/// Scans `db` of a fresh settled runtime of `program` through an in-process link.
inline ScanReport scan_program(const std::string& program, DbNumber db = 100, LockstepParams params = {},
                               const SymbolMap* symbols = nullptr) {
  auto rt = settled(bundled(program));
  RuntimeLink link(*rt);
  return scan(lockstep_config(db, params), link, symbols);
}

inline ScanReport oracle_program(const std::string& program, DbNumber db = 100, LockstepParams params = {},
                                 const SymbolMap* symbols = nullptr) {
  auto rt = settled(bundled(program));
  return oracle_scan(*rt, db, params, symbols);
}

/// Bundled programs scanned by the equivalence and restoration checks,
/// with the VB holding the instance under test.
struct ScanTarget {
  std::string program;
  DbNumber db;
};

inline std::vector<ScanTarget> scan_targets() {
  return {{"ctu_defaults", 100}, {"ctu_direct", 100}, {"ctu_gvb", 100},     {"ctu_gvb_all", 100},
          {"ctd_defaults", 100}, {"ctd_direct", 100}, {"ctd_gvb", 100},     {"tp_defaults", 100},
          {"tp_direct", 100},    {"tp_gvb", 100},     {"pointer_demo", 100}, {"pointer_demo", 1}};
}

inline const VariableRow* row(const ScanReport& r, const std::string& name) {
  for (const auto& v : r.variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

// PlcLink decorator that fails the n-th request with a transport error.
class FlakyLink : public PlcLink {
 public:
  FlakyLink(PlcLink& inner, int fail_at) : inner_(inner), fail_at_(fail_at) {}

  std::vector<Byte> read(const ByteSpan& span) override {
    tick();
    return inner_.read(span);
  }
  void write(const ByteSpan& span, std::span<const Byte> data) override {
    tick();
    inner_.write(span, data);
  }
  std::uint64_t step(std::uint32_t cycles) override {
    tick();
    return inner_.step(cycles);
  }
  std::vector<VbInfo> list_vbs() override {
    tick();
    return inner_.list_vbs();
  }
  void heal() { healed_ = true; }
  int requests() const { return count_; }

 private:
  void tick() {
    ++count_;
    if (!healed_ && count_ == fail_at_) throw Error(ErrorCode::ConnectionFailed, "injected link failure");
  }
  PlcLink& inner_;
  int fail_at_;
  int count_ = 0;
  bool healed_ = false;
};

// Records every request so tests can check the exact traffic.
class RecordingLink : public PlcLink {
 public:
  explicit RecordingLink(PlcLink& inner) : inner_(inner) {}

  std::vector<Byte> read(const ByteSpan& span) override {
    log.push_back("R " + to_string(span));
    return inner_.read(span);
  }
  void write(const ByteSpan& span, std::span<const Byte> data) override {
    std::string s = "W " + to_string(span);
    for (auto b : data) s += " " + std::to_string(b);
    log.push_back(s);
    inner_.write(span, data);
  }
  std::uint64_t step(std::uint32_t cycles) override {
    log.push_back("S " + std::to_string(cycles));
    return inner_.step(cycles);
  }
  std::vector<VbInfo> list_vbs() override {
    log.push_back("L");
    return inner_.list_vbs();
  }
  std::vector<std::string> log;

 private:
  PlcLink& inner_;
};

}  // namespace testing_support
