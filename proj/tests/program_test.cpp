#include <gtest/gtest.h>

#include "support.hpp"

using namespace vbscan;
using testing_support::bundled;

namespace {

ErrorCode load_error(const std::string& text) {
  try {
    parse_program(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "program accepted:\n" << text;
  return ErrorCode::Config;
}

const char* kCtuHeader = "program t\nvb 100 size 8\n";

}  // namespace

TEST(Program, AllBundledProgramsLoad) {
  for (const char* name : {"ctu_defaults", "ctu_direct", "ctu_gvb", "ctu_gvb_all", "ctd_defaults", "ctd_direct",
                           "ctd_gvb", "tp_defaults", "tp_direct", "tp_gvb", "pointer_demo", "attack_scenario"}) {
    EXPECT_NO_THROW(bundled(name)) << name;
  }
}

TEST(Program, CtuDefaultsShape) {
  const Program p = bundled("ctu_defaults");
  EXPECT_EQ(p.name, "ctu_defaults");
  ASSERT_EQ(p.instances.size(), 1u);
  const FbInstance& i = p.instances[0];
  EXPECT_EQ(i.kind, FbKind::CTU);
  EXPECT_EQ(i.fvb, 100);
  EXPECT_EQ(i.bindings.at("PV").kind, BindingKind::Default);
  EXPECT_EQ(i.bindings.at("PV").value, 0);
}

TEST(Program, SetInitialisesBigEndian) {
  const Program p = bundled("pointer_demo");
  const auto& init = p.vb(1)->initial;
  EXPECT_EQ(init[38], 0x04);  // 1201 = 0x04B1
  EXPECT_EQ(init[39], 0xB1);
  EXPECT_EQ(init[40], 0x12);  // 4711 = 0x1267
  EXPECT_EQ(init[41], 0x67);
}

TEST(Program, PointerBindingRecorded) {
  const Program p = bundled("pointer_demo");
  const Binding& b = p.instance("MAIL")->bindings.at("USERNAME");
  EXPECT_EQ(b.kind, BindingKind::Pointer);
  EXPECT_EQ(b.pointer.bit_address, 304u);
}

TEST(Program, WirePositionFollowsInstanceOrder) {
  const Program p = parse_program(std::string(kCtuHeader) +
                                  "vb 1 size 1\nwire DB1.DBX0.0 -> DB100.DBX0.0\n"
                                  "instance C CTU DB100\n CU default\n R default\n PV default\nend\n"
                                  "wire DB100.DBX4.0 -> DB1.DBX0.1\n");
  ASSERT_EQ(p.wiring.size(), 2u);
  EXPECT_EQ(p.wiring[0].position, 0u);
  EXPECT_EQ(p.wiring[1].position, 1u);
}

TEST(Program, UndeclaredDbIsUnresolved) {
  EXPECT_EQ(load_error(std::string(kCtuHeader) +
                       "instance C CTU DB100\n CU gvb DB9.DBX0.0\n R default\n PV default\nend\n"),
            ErrorCode::UnresolvedAddress);
  EXPECT_EQ(load_error("program t\ninstance C CTU DB100\n CU default\n R default\n PV default\nend\n"),
            ErrorCode::UnresolvedAddress);
  EXPECT_EQ(load_error("program t\nvb 1 size 2\nset DB1.DBW1 = 4\n"), ErrorCode::UnresolvedAddress);
}

TEST(Program, SchemaErrors) {
  const std::string h = kCtuHeader;
  EXPECT_EQ(load_error(h + "instance C CTU DB100\n CU default\n R default\nend\n"), ErrorCode::Schema);  // PV unbound
  EXPECT_EQ(load_error(h + "instance C CTU DB100\n CU default\n CU default\n R default\n PV default\nend\n"),
            ErrorCode::Schema);
  EXPECT_EQ(load_error(h + "instance C CTU DB100\n Q default\nend\n"), ErrorCode::Schema);  // output
  EXPECT_EQ(load_error(h + "instance C CTU DB100\n CU default\n R default\n PV default\n"), ErrorCode::Schema);
  EXPECT_EQ(load_error(h + "vb 1 size 4\ninstance C CTU DB100\n CU default\n R default\n PV gvb DB1.DBD0\nend\n"),
            ErrorCode::Schema);  // width mismatch
  EXPECT_EQ(load_error(h + "instance C CTU DB100\n CU default\n R default\n PV pointer P#DB100.DBX2.0\nend\n"),
            ErrorCode::Schema);
  EXPECT_EQ(load_error(h + "frobnicate\n"), ErrorCode::Schema);
  EXPECT_EQ(load_error(h +
                       "instance A CTU DB100\n CU default\n R default\n PV default\nend\n"
                       "instance B CTU DB100\n CU default\n R default\n PV default\nend\n"),
            ErrorCode::Schema);
  EXPECT_EQ(load_error("program t\nvb 100 size 16\ninstance M ALERT DB100\n TRIG default\n WATCH_DOG_TIME default\n"
                       " USERNAME direct 4\nend\n"),
            ErrorCode::Schema);  // pointer-only input
}

TEST(Program, DuplicateVbAndRanges) {
  EXPECT_EQ(load_error("program t\nvb 1 size 2\nvb 1 size 3\n"), ErrorCode::DuplicateVb);
  EXPECT_EQ(load_error("program t\nvb 70000 size 2\n"), ErrorCode::Range);
  EXPECT_EQ(load_error(std::string(kCtuHeader) + "instance C CTU DB100\n CU default\n R default\n PV direct 40000\nend\n"),
            ErrorCode::Range);
  EXPECT_EQ(load_error("program t\nvb 1 size 2\nset DB1.DBX0.9 = 1\n"), ErrorCode::Range);
}

TEST(Program, CommentsStripButPointerHashKept) {
  const Program p = parse_program(
      "# leading comment\nprogram t # trailing\nvb 1 size 40\nvb 100 size 16\n"
      "instance M ALERT DB100\n TRIG default\n WATCH_DOG_TIME default\n USERNAME pointer P#DB1.DBX38.0 # ptr\nend\n");
  EXPECT_EQ(p.instance("M")->bindings.at("USERNAME").pointer.db, 1);
}

TEST(Program, PointerTargetNeedNotExistAtLoad) {
  EXPECT_NO_THROW(parse_program("program t\nvb 100 size 16\ninstance M ALERT DB100\n TRIG default\n"
                                " WATCH_DOG_TIME default\n USERNAME pointer P#DB9.DBX0.0\nend\n"));
}
