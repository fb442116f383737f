#include <gtest/gtest.h>

#include "support.hpp"

using namespace vbscan;
using namespace testing_support;

namespace {

AttackTranscript run(const std::string& scenario, std::uint32_t events = 10) {
  Runtime rt(bundled("attack_scenario"));
  RuntimeLink link(rt);
  return attack_demo(link, scenario, events);
}

}  // namespace

TEST(Attack, BaselineSendsOneAlertAtPv) {
  const auto t = run("baseline");
  EXPECT_EQ(t.counter_cv, 10);
  EXPECT_TRUE(t.counter_q);
  EXPECT_EQ(t.alert_sent, 1);
  EXPECT_TRUE(t.connected);
}

TEST(Attack, BaselineNineEventsSendsNothing) {
  const auto t = run("baseline", 9);
  EXPECT_EQ(t.counter_cv, 9);
  EXPECT_EQ(t.alert_sent, 0);
}

TEST(Attack, HoldingCuFalseStopsCounting) {
  const auto t = run("cu-hold-false");
  EXPECT_EQ(t.counter_cv, 0);
  EXPECT_EQ(t.alert_sent, 0);
}

TEST(Attack, ZeroingCvEveryCycle) {
  // Hand trace: each event's rising edge lifts CV to 1 in one cycle, and
  // the attacker writes 0 before the next, so CV never reaches PV.
  const auto t = run("cv-zero");
  EXPECT_LE(t.counter_cv, 1);
  EXPECT_EQ(t.alert_sent, 0);
  EXPECT_FALSE(t.connected);
}

TEST(Attack, HoldingResetTrue) {
  const auto t = run("reset-hold");
  EXPECT_EQ(t.counter_cv, 0);
  EXPECT_EQ(t.alert_sent, 0);
}

TEST(Attack, BusyLockHaltsAlertDespiteQ) {
  const auto t = run("busy-lock");
  EXPECT_EQ(t.counter_cv, 10);
  EXPECT_TRUE(t.counter_q);
  EXPECT_EQ(t.alert_sent, 0);
  EXPECT_TRUE(t.connected);  // only the alert was locked
}

TEST(Attack, TranscriptLogsEveryWrite) {
  const auto t = run("busy-lock", 2);
  const auto count = [&](const std::string& needle) {
    return std::count_if(t.lines.begin(), t.lines.end(),
                         [&](const std::string& l) { return l.find(needle) != std::string::npos; });
  };
  EXPECT_EQ(count("attacker WRITE DB102.DBX0.1 = TRUE"), 8);
  EXPECT_EQ(count("process WRITE DB1.DBX0.0"), 4);
  EXPECT_NE(t.render().find("MAIL.SENT = 0"), std::string::npos);
}

TEST(Attack, UnknownScenarioRejected) {
  try {
    run("meltdown");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownScenario);
  }
}

TEST(Attack, WrongProgramShapeRejected) {
  Runtime rt(bundled("ctu_defaults"));
  RuntimeLink link(rt);
  try {
    attack_demo(link, "baseline");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Attack, OverTcpMatchesInProcess) {
  Runtime rt(bundled("attack_scenario"));
  wire::Server server(rt, {"127.0.0.1", 0, 0, 2});
  server.start();
  wire::Client c;
  c.connect("127.0.0.1", server.port(), 0, 2);
  const auto remote = attack_demo(c, "reset-hold");
  EXPECT_EQ(remote.lines, run("reset-hold").lines);
}
