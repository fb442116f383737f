#include <gtest/gtest.h>

#include <random>

#include "vbscan/address.hpp"

using namespace vbscan;

TEST(Address, ParsesBitAddress) {
  const Address a = parse_address("DB100.DBX4.0");
  ASSERT_TRUE(std::holds_alternative<BitAddress>(a));
  EXPECT_EQ(std::get<BitAddress>(a), (BitAddress{100, 4, 0}));
}

TEST(Address, ParsesWidthForms) {
  EXPECT_EQ(std::get<ByteSpan>(parse_address("DB1.DBB3")), (ByteSpan{1, 3, 1}));
  EXPECT_EQ(std::get<ByteSpan>(parse_address("DB1.DBW38")), (ByteSpan{1, 38, 2}));
  EXPECT_EQ(std::get<ByteSpan>(parse_address("DB7.DBD8")), (ByteSpan{7, 8, 4}));
}

TEST(Address, ParsesPointer) {
  const auto p = std::get<PointerValue>(parse_address("P#DB1.DBX38.0"));
  EXPECT_EQ(p.db, 1);
  EXPECT_EQ(p.bit_address, 38u * 8);
  EXPECT_EQ(p.target(), (BitAddress{1, 38, 0}));
}

TEST(Address, BitIndexAboveSevenIsRangeError) {
  try {
    parse_address("DB100.DBX4.8");
    FAIL() << "accepted bit 8";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Range);
  }
}

TEST(Address, DbNumberAboveSixteenBitsIsRangeError) {
  try {
    parse_address("DB65536.DBB0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Range);
  }
  EXPECT_NO_THROW(parse_address("DB65535.DBB0"));
}

TEST(Address, SyntaxErrorsCarryColumn) {
  try {
    parse_address("DB100.DBQ4");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Syntax);
    EXPECT_EQ(e.column(), 9u);  // the Q
  }
  for (const char* bad : {"", "DB", "DB1.", "DB1.DBX1", "DB1.DBX1.", "db1.DBB0", "DB1.DBB0 ", "DB01.DBB0",
                          "DB1.DBW", "P#DB1.DBW2", "DB-1.DBB0"}) {
    EXPECT_THROW(parse_address(bad), Error) << bad;
  }
}

TEST(Address, BitAddressParserRejectsSpans) {
  EXPECT_EQ(parse_bit_address("DB2.DBX0.7"), (BitAddress{2, 0, 7}));
  EXPECT_THROW(parse_bit_address("DB2.DBW0"), Error);
}

TEST(Address, FormatParseRoundTrip) {
  std::mt19937 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const DbNumber db = static_cast<DbNumber>(rng());
    const std::uint32_t off = rng() % 100000;
    Address a;
    switch (i % 5) {
      case 0: a = BitAddress{db, off, static_cast<std::uint8_t>(rng() % 8)}; break;
      case 1: a = ByteSpan{db, off, 1}; break;
      case 2: a = ByteSpan{db, off, 2}; break;
      case 3: a = ByteSpan{db, off, 4}; break;
      default: a = PointerValue::to({db, off, static_cast<std::uint8_t>(rng() % 8)}); break;
    }
    const std::string text = format_address(a);
    EXPECT_EQ(parse_address(text), a) << text;
  }
}

TEST(Address, OddSpanRendersDisplayForm) { EXPECT_EQ(to_string(ByteSpan{100, 10, 6}), "DB100.DBB10+6"); }

TEST(Pointer, EncodeIsBigEndianWithAreaTag) {
  const auto p = PointerValue::to({1, 38, 0});
  // 38*8 = 304 = 0x000130
  const std::array<Byte, 6> expect = {0x84, 0x00, 0x01, 0x00, 0x01, 0x30};
  EXPECT_EQ(p.encode(), expect);
  EXPECT_EQ(PointerValue::decode(expect), p);
}

TEST(Pointer, DecodeRejectsOtherAreas) {
  try {
    PointerValue::decode({0x83, 0, 1, 0, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Range);
  }
}

TEST(Pointer, ByteOffsetBeyondTwentyFourBitsRejected) {
  EXPECT_NO_THROW(PointerValue::to({1, (1u << 21) - 1, 7}));
  EXPECT_THROW(PointerValue::to({1, 1u << 21, 0}), Error);
}

TEST(Pointer, EncodeDecodeRoundTripAllBitsOfRandomValues) {
  std::mt19937 rng(11);
  for (int i = 0; i < 5000; ++i) {
    PointerValue p{Area::DB, static_cast<DbNumber>(rng()), static_cast<std::uint32_t>(rng() & PointerValue::kMaxBitAddress)};
    EXPECT_EQ(PointerValue::decode(p.encode()), p);
  }
}

TEST(Address, InvertByte) {
  for (int b = 0; b < 256; ++b) {
    EXPECT_EQ(invert_byte(static_cast<Byte>(b)), static_cast<Byte>(255 - b));
    EXPECT_EQ(invert_byte(invert_byte(static_cast<Byte>(b))), b);
  }
}
