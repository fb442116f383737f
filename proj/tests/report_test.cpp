#include <gtest/gtest.h>

#include "support.hpp"

using namespace vbscan;
using namespace testing_support;

namespace {

ScanReport ctu_report(const std::string& program) {
  const SymbolMap sm = bundled_symbols("ctu");
  return scan_program(program, 100, {}, &sm);
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) {
    if (l == line) return true;
  }
  return false;
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse_json(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Config;
}

}  // namespace

TEST(Text, VariableTableRowLayout) {
  const std::string text = render_text(ctu_report("ctu_defaults"));
  EXPECT_TRUE(has_line(text, "CU  ✓  Bool  Counter input")) << text;
  EXPECT_TRUE(has_line(text, "R   ✓  Bool  Reset"));
  EXPECT_TRUE(has_line(text, "PV  ✓  Int   Max count before Q is triggered"));
  EXPECT_TRUE(has_line(text, "Q   ✗  Bool  Indicates if CV is greater than PV"));
  EXPECT_TRUE(has_line(text, "CV  ✓  Int   Count value"));
}

TEST(Text, DirectBindingShowsPvNotVulnerable) {
  const std::string text = render_text(ctu_report("ctu_direct"));
  EXPECT_TRUE(has_line(text, "PV  ✗  Int   Max count before Q is triggered")) << text;
}

TEST(Text, EmptyVb) {
  Runtime rt(parse_program("program p\nvb 3 size 0\n"));
  RuntimeLink link(rt);
  const std::string text = render_text(scan(lockstep_config(3), link));
  EXPECT_NE(text.find("0 bytes scanned"), std::string::npos) << text;
  EXPECT_EQ(text.find("WARNING"), std::string::npos);
}

TEST(Text, UnrestoredByteRendersWarningBlock) {
  ScanReport r = ctu_report("ctu_defaults");
  r.bytes[3].restored = false;
  finalize_report(r, nullptr);
  const std::string text = render_text(r);
  EXPECT_NE(text.find("WARNING"), std::string::npos);
  EXPECT_NE(text.find("DB100.DBB3 should hold 0x00"), std::string::npos);
}

TEST(Text, IncompleteScanSaysSo) {
  ScanReport r = ctu_report("ctu_defaults");
  r.bytes.resize(2);
  r.incomplete = true;
  r.interruption = Interruption{2, "link down", true};
  finalize_report(r, nullptr);
  EXPECT_NE(render_text(r).find("INCOMPLETE: scan stopped at byte 2"), std::string::npos);
}

TEST(Text, Deterministic) {
  EXPECT_EQ(render_text(ctu_report("tp_defaults")), render_text(ctu_report("tp_defaults")));
}

TEST(Json, RoundTripIsIdentity) {
  std::vector<ScanReport> reports = {ctu_report("ctu_defaults"), scan_program("tp_direct"),
                                     oracle_program("pointer_demo", 1)};
  ScanReport partial = ctu_report("ctu_gvb");
  partial.bytes.resize(3);
  partial.bytes[1].restored = false;
  partial.incomplete = true;
  partial.interruption = Interruption{3, "timeout: \"quoted\"", false};
  finalize_report(partial, nullptr);
  reports.push_back(partial);
  ScanReport wall = ctu_report("ctu_direct");
  wall.config.lockstep.reset();
  wall.config.allow_fast = true;
  reports.push_back(wall);
  for (const auto& r : reports) {
    const std::string text = render_json(r);
    const ScanReport back = parse_json(text);
    EXPECT_EQ(back, r);
    EXPECT_EQ(render_json(back), text);
  }
}

TEST(Json, CarriesSchemaVersion) {
  const std::string text = render_json(scan_program("ctu_defaults"));
  EXPECT_NE(text.find("\"schema\": 1"), std::string::npos);
}

TEST(Json, UnknownSchemaRejected) {
  std::string text = render_json(scan_program("ctu_defaults"));
  text.replace(text.find("\"schema\": 1"), 11, "\"schema\": 99");
  EXPECT_EQ(parse_error(text), ErrorCode::Schema);
}

TEST(Json, SummaryInconsistencyIsIntegrityError) {
  std::string text = render_json(scan_program("ctu_defaults"));
  const auto at = text.find("\"vulnerable_direct\": 5");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 22, "\"vulnerable_direct\": 4");
  EXPECT_EQ(parse_error(text), ErrorCode::Integrity);
}

TEST(Json, VerdictInconsistencyIsIntegrityError) {
  std::string text = render_json(scan_program("ctu_defaults"));
  const auto at = text.find("\"WRITABLE_NOT_RETAINED\"");
  text.replace(at, 23, "\"VULNERABLE_TRANSIENT\"");
  EXPECT_EQ(parse_error(text), ErrorCode::Integrity);
}

TEST(Json, MalformedInputIsSchemaError) {
  EXPECT_EQ(parse_error("{"), ErrorCode::Schema);
  EXPECT_EQ(parse_error("{\"schema\": 1}"), ErrorCode::Schema);
  EXPECT_EQ(parse_error("[]"), ErrorCode::Schema);
}

TEST(Diff, DefaultsVersusDirectDemotesPv) {
  const ReportDiff d = diff(scan_program("ctu_defaults"), scan_program("ctu_direct"));
  ASSERT_EQ(d.bits.size(), 16u);
  for (const auto& x : d.bits) {
    EXPECT_TRUE(x.offset == 2 || x.offset == 3);
    EXPECT_EQ(x.before, BitVerdict::VulnerablePersistent);
    EXPECT_EQ(x.after, BitVerdict::WritableNotRetained);
  }
  EXPECT_EQ(d.vulnerable_delta(), -2);
  EXPECT_EQ(d.persistent_delta(), -2);
  const std::string text = render_diff(d);
  EXPECT_NE(text.find("DB100.DBX2.0"), std::string::npos);
  EXPECT_NE(text.find("-2"), std::string::npos);
}

TEST(Diff, SelfDiffIsEmpty) {
  const ScanReport r = scan_program("tp_defaults");
  EXPECT_TRUE(diff(r, r).empty());
  EXPECT_NE(render_diff(diff(r, r)).find("no per-bit verdict changes"), std::string::npos);
}

TEST(Diff, DifferentShapesRejected) {
  try {
    diff(scan_program("ctu_defaults"), scan_program("tp_defaults"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}
