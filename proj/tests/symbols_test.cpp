#include <gtest/gtest.h>

#include "support.hpp"

using namespace vbscan;

TEST(Symbols, ParsesBundledCtuMap) {
  const auto m = testing_support::bundled_symbols("ctu");
  ASSERT_EQ(m.size(), 5u);
  EXPECT_EQ(m[0].name, "CU");
  EXPECT_EQ(m[0].bit, std::optional<std::uint8_t>(0));
  EXPECT_EQ(m[0].description, "Counter input");
  EXPECT_EQ(m[2].name, "PV");
  EXPECT_EQ(m[2].type, VarType::Int);
  EXPECT_FALSE(m[2].bit.has_value());
}

TEST(Symbols, BitsCoverTheVariableWidth) {
  const Symbol cv{100, 6, std::nullopt, "CV", VarType::Int, ""};
  EXPECT_EQ(cv.bits().size(), 16u);
  EXPECT_EQ(cv.bits().front(), (std::pair<std::uint32_t, std::uint8_t>{6, 0}));
  EXPECT_EQ(cv.bits().back(), (std::pair<std::uint32_t, std::uint8_t>{7, 7}));
  const Symbol q{100, 4, 0, "Q", VarType::Bool, ""};
  EXPECT_EQ(q.bits().size(), 1u);
}

TEST(Symbols, RejectsInconsistentRows) {
  EXPECT_THROW(parse_symbol_map("100,0,-,CU,BOOL\n"), Error);     // BOOL needs a bit
  EXPECT_THROW(parse_symbol_map("100,2,3,PV,INT\n"), Error);      // INT is byte aligned
  EXPECT_THROW(parse_symbol_map("100,0,9,CU,BOOL\n"), Error);     // bit > 7
  EXPECT_THROW(parse_symbol_map("100,0,0,CU,REAL\n"), Error);     // unknown type
  EXPECT_THROW(parse_symbol_map("100,0,0\n"), Error);             // too few fields
  EXPECT_THROW(parse_symbol_map("70000,0,0,CU,BOOL\n"), Error);   // DB out of range
}

TEST(Symbols, CommentsAndBlankLinesSkipped) {
  const auto m = parse_symbol_map("# header\n\n1,0,0,A,BOOL\n  \n1,2,-,B,DINT,some text\n");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[1].type, VarType::DInt);
  EXPECT_EQ(m[1].description, "some text");
}

TEST(Symbols, FormatRoundTrips) {
  for (const char* name : {"ctu", "ctd", "tp", "alert"}) {
    const auto m = testing_support::bundled_symbols(name);
    EXPECT_EQ(parse_symbol_map(format_symbol_map(m)), m) << name;
  }
}
