#include <gtest/gtest.h>

#include <random>

#include "codec_gen.hpp"

using namespace vbscan;
using namespace vbscan::wire;

namespace {

std::vector<Byte> hex(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

FrameFault fault_of(const std::vector<Byte>& frame) {
  try {
    decode(frame);
  } catch (const FrameError& e) {
    return e.fault();
  }
  ADD_FAILURE() << "frame decoded";
  return FrameFault::BadField;
}

}  // namespace

TEST(Codec, ConnectHandEncoded) {
  // magic 53 56, version 01, type CONNECT 01, length 00 02, rack 00, slot 02
  const auto expect = hex({0x53, 0x56, 0x01, 0x01, 0x00, 0x02, 0x00, 0x02});
  EXPECT_EQ(encode(Connect{0, 2}), expect);
  EXPECT_EQ(decode(expect), Message(Connect{0, 2}));
}

TEST(Codec, ReadHandEncoded) {
  // db 0064, start 00000000, length 0001
  const auto expect = hex({0x53, 0x56, 0x01, 0x03, 0x00, 0x08, 0x00, 0x64, 0, 0, 0, 0, 0x00, 0x01});
  EXPECT_EQ(encode(Read{100, 0, 1}), expect);
  EXPECT_EQ(decode(expect), Message(Read{100, 0, 1}));
}

TEST(Codec, WriteCarriesExplicitLength) {
  const auto f = encode(Write{1, 558, {0xAA, 0xBB}});
  EXPECT_EQ(f, hex({0x53, 0x56, 0x01, 0x05, 0x00, 0x0A, 0x00, 0x01, 0x00, 0x00, 0x02, 0x2E, 0x00, 0x02, 0xAA, 0xBB}));
}

TEST(Codec, StepAckCycleCountIsSixtyFourBit) {
  const auto f = encode(StepAck{Status::Ok, 0x0102030405060708ull});
  EXPECT_EQ(f, hex({0x53, 0x56, 0x01, 0x08, 0x00, 0x09, 0x00, 1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(Codec, ListRespEntries) {
  const auto f = encode(ListResp{Status::Ok, {{1, 560, false}, {100, 16, true}}});
  EXPECT_EQ(f, hex({0x53, 0x56, 0x01, 0x0A, 0x00, 0x11, 0x00, 0x00, 0x02,  //
                    0x00, 0x01, 0x00, 0x00, 0x02, 0x30, 0x00,               //
                    0x00, 0x64, 0x00, 0x00, 0x00, 0x10, 0x01}));
}

TEST(Codec, BadFramesRejected) {
  EXPECT_EQ(fault_of(hex({0x00, 0x00, 0x01, 0x01, 0x00, 0x02, 0x00, 0x02})), FrameFault::BadMagic);
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x02, 0x01, 0x00, 0x02, 0x00, 0x02})), FrameFault::BadVersion);
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x01, 0x0B, 0x00, 0x00})), FrameFault::UnknownType);
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x01, 0x01, 0x00, 0x02, 0x00})), FrameFault::Truncated);
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x01, 0x01, 0x00, 0x01, 0x00})), FrameFault::LengthMismatch);
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x01, 0x02, 0x00, 0x01, 0x09})), FrameFault::BadStatus);
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x01, 0x01, 0x10, 0x00})), FrameFault::Oversize);
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x01, 0x01})), FrameFault::Truncated);
  // WRITE whose length field disagrees with the data that follows
  EXPECT_EQ(fault_of(hex({0x53, 0x56, 0x01, 0x05, 0x00, 0x09, 0, 1, 0, 0, 0, 0, 0, 2, 0xAA})),
            FrameFault::LengthMismatch);
}

TEST(Codec, OversizeMessageNotEncoded) {
  EXPECT_THROW(encode(Write{1, 0, std::vector<Byte>(kMaxWriteChunk + 1)}), FrameError);
  EXPECT_NO_THROW(encode(Write{1, 0, std::vector<Byte>(kMaxWriteChunk)}));
  EXPECT_EQ(encode(ReadResp{Status::Ok, std::vector<Byte>(kMaxReadChunk)}).size(), kMaxFrame);
}

TEST(Codec, StreamingDecodeWaitsForWholeFrame) {
  const auto a = encode(Read{1, 2, 3});
  const auto b = encode(Step{9});
  std::vector<Byte> buf(a.begin(), a.end());
  buf.insert(buf.end(), b.begin(), b.end());
  for (std::size_t cut = 0; cut < a.size(); ++cut) {
    EXPECT_FALSE(try_decode(std::span<const Byte>(buf.data(), cut)).has_value()) << cut;
  }
  const auto first = try_decode(buf);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->first, Message(Read{1, 2, 3}));
  EXPECT_EQ(first->second, a.size());
  const auto second = try_decode(std::span<const Byte>(buf).subspan(first->second));
  ASSERT_TRUE(second);
  EXPECT_EQ(second->first, Message(Step{9}));
}

TEST(Codec, StreamingRejectsGarbageEarly) {
  EXPECT_THROW(try_decode(hex({0x00})), FrameError);
  EXPECT_THROW(try_decode(hex({0x53, 0x00})), FrameError);
}

TEST(Codec, RoundTripProperty) {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 3000; ++i) {
    const Message m = testing_support::random_message(rng);
    const auto frame = encode(m);
    ASSERT_LE(frame.size(), kMaxFrame);
    ASSERT_EQ(decode(frame), m) << "case " << i;
    ASSERT_EQ(encode(decode(frame)), frame);
  }
}

TEST(Codec, FuzzNeverCrashes) {
  std::mt19937_64 rng(99);
  std::size_t decoded = 0;
  for (int i = 0; i < 20000; ++i) {
    std::vector<Byte> buf;
    if (i % 2 == 0) {
      buf = encode(testing_support::random_message(rng));
      const int flips = 1 + static_cast<int>(rng() % 4);
      for (int f = 0; f < flips; ++f) buf[rng() % buf.size()] ^= static_cast<Byte>(1u << (rng() % 8));
      if (rng() % 3 == 0) buf.resize(rng() % (buf.size() + 1));
    } else {
      buf.resize(rng() % 64);
      for (auto& b : buf) b = static_cast<Byte>(rng());
      if (buf.size() >= 3 && rng() % 2 == 0) {
        buf[0] = 0x53;
        buf[1] = 0x56;
        buf[2] = 0x01;
      }
    }
    try {
      const Message m = decode(buf);
      // Anything accepted must be canonical.
      ASSERT_EQ(encode(m), buf);
      ++decoded;
    } catch (const FrameError&) {
    }
    try {
      (void)try_decode(buf);
    } catch (const FrameError&) {
    }
  }
  SUCCEED() << decoded << " mutated frames still decoded";
}

TEST(Codec, StatusMapping) {
  EXPECT_EQ(status_for(ErrorCode::NoSuchVb), Status::NoSuchVb);
  EXPECT_EQ(status_for(ErrorCode::OutOfRange), Status::OutOfRange);
  EXPECT_EQ(status_for(ErrorCode::AccessDenied), Status::AccessDenied);
  EXPECT_EQ(status_for(ErrorCode::Mode), Status::ModeError);
  EXPECT_EQ(status_for(ErrorCode::Schema), Status::BadRequest);
}
