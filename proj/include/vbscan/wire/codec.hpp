#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vbscan/address.hpp"
#include "vbscan/error.hpp"
#include "vbscan/memory.hpp"

// Simple Variable Block Protocol (SVBP).
//
//   frame   = 'S' 'V' version(0x01) msg_type(u8) payload_len(u16) payload
//   total frame length <= 4096, all integers big-endian
//
//   CONNECT   0x01  rack u8, slot u8
//   CONNACK   0x02  status u8
//   READ      0x03  db u16, start u32, len u16
//   READRESP  0x04  status u8, data[*]          (data empty unless OK)
//   WRITE     0x05  db u16, start u32, len u16, data[len]
//   WRITERESP 0x06  status u8
//   STEP      0x07  count u32
//   STEPACK   0x08  status u8, cycles u64       (total cycles after the step)
//   LISTVB    0x09  (empty)
//   LISTRESP  0x0A  status u8, count u16, count * (db u16, size u32, flags u8)
//                   flags bit 0 = write protected; entries only when OK
namespace vbscan::wire {

inline constexpr Byte kMagic0 = 0x53;
inline constexpr Byte kMagic1 = 0x56;
inline constexpr Byte kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 6;
inline constexpr std::size_t kMaxFrame = 4096;
inline constexpr std::size_t kMaxPayload = kMaxFrame - kHeaderSize;
inline constexpr std::size_t kMaxReadChunk = kMaxPayload - 1;   // READRESP status byte
inline constexpr std::size_t kMaxWriteChunk = kMaxPayload - 8;  // WRITE header fields
inline constexpr std::uint16_t kDefaultPort = 10102;

enum class MsgType : Byte {
  Connect = 0x01,
  ConnAck = 0x02,
  Read = 0x03,
  ReadResp = 0x04,
  Write = 0x05,
  WriteResp = 0x06,
  Step = 0x07,
  StepAck = 0x08,
  ListVb = 0x09,
  ListResp = 0x0A,
};

enum class Status : Byte {
  Ok = 0,
  NoSuchVb = 1,
  OutOfRange = 2,
  AccessDenied = 3,
  BadRequest = 4,
  ModeError = 5,
};

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Ok: return "OK";
    case Status::NoSuchVb: return "NO_SUCH_VB";
    case Status::OutOfRange: return "OUT_OF_RANGE";
    case Status::AccessDenied: return "ACCESS_DENIED";
    case Status::BadRequest: return "BAD_REQUEST";
    case Status::ModeError: return "MODE_ERROR";
  }
  return "?";
}

struct Connect {
  Byte rack = 0;
  Byte slot = 0;
  bool operator==(const Connect&) const = default;
};
struct ConnAck {
  Status status = Status::Ok;
  bool operator==(const ConnAck&) const = default;
};
struct Read {
  DbNumber db = 0;
  std::uint32_t start = 0;
  std::uint16_t length = 0;
  bool operator==(const Read&) const = default;
};
struct ReadResp {
  Status status = Status::Ok;
  std::vector<Byte> data;
  bool operator==(const ReadResp&) const = default;
};
struct Write {
  DbNumber db = 0;
  std::uint32_t start = 0;
  std::vector<Byte> data;
  bool operator==(const Write&) const = default;
};
struct WriteResp {
  Status status = Status::Ok;
  bool operator==(const WriteResp&) const = default;
};
struct Step {
  std::uint32_t count = 0;
  bool operator==(const Step&) const = default;
};
struct StepAck {
  Status status = Status::Ok;
  std::uint64_t cycles = 0;
  bool operator==(const StepAck&) const = default;
};
struct ListVb {
  bool operator==(const ListVb&) const = default;
};
struct ListResp {
  Status status = Status::Ok;
  std::vector<VbInfo> blocks;
  bool operator==(const ListResp&) const = default;
};

using Message =
    std::variant<Connect, ConnAck, Read, ReadResp, Write, WriteResp, Step, StepAck, ListVb, ListResp>;

enum class FrameFault {
  BadMagic,
  BadVersion,
  UnknownType,
  Truncated,
  LengthMismatch,
  Oversize,
  BadStatus,
  BadField,
};

inline const char* to_string(FrameFault f) {
  switch (f) {
    case FrameFault::BadMagic: return "bad magic";
    case FrameFault::BadVersion: return "unsupported version";
    case FrameFault::UnknownType: return "unknown message type";
    case FrameFault::Truncated: return "truncated frame";
    case FrameFault::LengthMismatch: return "payload does not match declared length";
    case FrameFault::Oversize: return "frame exceeds 4096 bytes";
    case FrameFault::BadStatus: return "unknown status code";
    case FrameFault::BadField: return "invalid field";
  }
  return "?";
}

class FrameError : public Error {
 public:
  explicit FrameError(FrameFault fault, const std::string& detail = {})
      : Error(ErrorCode::MalformedFrame, std::string(to_string(fault)) + (detail.empty() ? "" : ": " + detail)),
        fault_(fault) {}
  FrameFault fault() const noexcept { return fault_; }

 private:
  FrameFault fault_;
};

namespace detail {

class Writer {
 public:
  void u8(Byte v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<Byte>(v >> 8));
    out_.push_back(static_cast<Byte>(v));
  }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<Byte>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<Byte>(v >> s));
  }
  void bytes(std::span<const Byte> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<Byte> take() { return std::move(out_); }

 private:
  std::vector<Byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const Byte> in) : in_(in) {}
  std::size_t remaining() const { return in_.size() - pos_; }
  Byte u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::vector<Byte> bytes(std::size_t n) {
    need(n);
    std::vector<Byte> out(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                          in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  Status status() {
    const Byte s = u8();
    if (s > static_cast<Byte>(Status::ModeError)) throw FrameError(FrameFault::BadStatus, std::to_string(s));
    return static_cast<Status>(s);
  }
  void finish() const {
    if (remaining() != 0) throw FrameError(FrameFault::LengthMismatch, "trailing payload bytes");
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw FrameError(FrameFault::LengthMismatch, "payload too short");
  }
  std::span<const Byte> in_;
  std::size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace detail

inline MsgType type_of(const Message& m) {
  return std::visit(detail::Overloaded{
                        [](const Connect&) { return MsgType::Connect; },
                        [](const ConnAck&) { return MsgType::ConnAck; },
                        [](const Read&) { return MsgType::Read; },
                        [](const ReadResp&) { return MsgType::ReadResp; },
                        [](const Write&) { return MsgType::Write; },
                        [](const WriteResp&) { return MsgType::WriteResp; },
                        [](const Step&) { return MsgType::Step; },
                        [](const StepAck&) { return MsgType::StepAck; },
                        [](const ListVb&) { return MsgType::ListVb; },
                        [](const ListResp&) { return MsgType::ListResp; },
                    },
                    m);
}

/// Throws FrameError(BadField/Oversize) for messages that have no valid frame.
inline std::vector<Byte> encode(const Message& m) {
  detail::Writer p;
  std::visit(detail::Overloaded{
                 [&](const Connect& c) {
                   p.u8(c.rack);
                   p.u8(c.slot);
                 },
                 [&](const ConnAck& c) { p.u8(static_cast<Byte>(c.status)); },
                 [&](const Read& r) {
                   p.u16(r.db);
                   p.u32(r.start);
                   p.u16(r.length);
                 },
                 [&](const ReadResp& r) {
                   if (r.status != Status::Ok && !r.data.empty()) {
                     throw FrameError(FrameFault::BadField, "READRESP carries data with non-OK status");
                   }
                   p.u8(static_cast<Byte>(r.status));
                   p.bytes(r.data);
                 },
                 [&](const Write& w) {
                   if (w.data.size() > 0xFFFF) throw FrameError(FrameFault::Oversize, "WRITE data");
                   p.u16(w.db);
                   p.u32(w.start);
                   p.u16(static_cast<std::uint16_t>(w.data.size()));
                   p.bytes(w.data);
                 },
                 [&](const WriteResp& w) { p.u8(static_cast<Byte>(w.status)); },
                 [&](const Step& s) { p.u32(s.count); },
                 [&](const StepAck& s) {
                   p.u8(static_cast<Byte>(s.status));
                   p.u64(s.cycles);
                 },
                 [&](const ListVb&) {},
                 [&](const ListResp& l) {
                   if (l.status != Status::Ok && !l.blocks.empty()) {
                     throw FrameError(FrameFault::BadField, "LISTRESP carries entries with non-OK status");
                   }
                   if (l.blocks.size() > 0xFFFF) throw FrameError(FrameFault::Oversize, "LISTRESP entries");
                   p.u8(static_cast<Byte>(l.status));
                   p.u16(static_cast<std::uint16_t>(l.blocks.size()));
                   for (const auto& b : l.blocks) {
                     p.u16(b.number);
                     p.u32(b.size);
                     p.u8(b.write_protected ? 1 : 0);
                   }
                 },
             },
             m);
  std::vector<Byte> payload = p.take();
  if (payload.size() > kMaxPayload) throw FrameError(FrameFault::Oversize, std::to_string(payload.size()) + " byte payload");

  std::vector<Byte> frame;
  frame.reserve(kHeaderSize + payload.size());
  frame.push_back(kMagic0);
  frame.push_back(kMagic1);
  frame.push_back(kVersion);
  frame.push_back(static_cast<Byte>(type_of(m)));
  frame.push_back(static_cast<Byte>(payload.size() >> 8));
  frame.push_back(static_cast<Byte>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

inline Message decode_payload(MsgType type, std::span<const Byte> payload) {
  detail::Reader r(payload);
  Message m;
  switch (type) {
    case MsgType::Connect: {
      Connect c;
      c.rack = r.u8();
      c.slot = r.u8();
      m = c;
      break;
    }
    case MsgType::ConnAck: m = ConnAck{r.status()}; break;
    case MsgType::Read: {
      Read rd;
      rd.db = r.u16();
      rd.start = r.u32();
      rd.length = r.u16();
      m = rd;
      break;
    }
    case MsgType::ReadResp: {
      ReadResp rr;
      rr.status = r.status();
      rr.data = r.bytes(r.remaining());
      if (rr.status != Status::Ok && !rr.data.empty()) {
        throw FrameError(FrameFault::BadField, "READRESP carries data with non-OK status");
      }
      m = std::move(rr);
      break;
    }
    case MsgType::Write: {
      Write w;
      w.db = r.u16();
      w.start = r.u32();
      const std::uint16_t len = r.u16();
      w.data = r.bytes(len);
      m = std::move(w);
      break;
    }
    case MsgType::WriteResp: m = WriteResp{r.status()}; break;
    case MsgType::Step: m = Step{r.u32()}; break;
    case MsgType::StepAck: {
      StepAck s;
      s.status = r.status();
      s.cycles = r.u64();
      m = s;
      break;
    }
    case MsgType::ListVb: m = ListVb{}; break;
    case MsgType::ListResp: {
      ListResp l;
      l.status = r.status();
      const std::uint16_t count = r.u16();
      if (l.status != Status::Ok && count != 0) {
        throw FrameError(FrameFault::BadField, "LISTRESP carries entries with non-OK status");
      }
      for (std::uint16_t i = 0; i < count; ++i) {
        VbInfo info;
        info.number = r.u16();
        info.size = r.u32();
        const Byte flags = r.u8();
        if (flags > 1) throw FrameError(FrameFault::BadField, "unknown VB flags");
        info.write_protected = flags == 1;
        l.blocks.push_back(info);
      }
      m = std::move(l);
      break;
    }
    default: throw FrameError(FrameFault::UnknownType);
  }
  r.finish();
  return m;
}

struct Header {
  MsgType type;
  std::size_t payload_length;
};

/// Validates the fixed 6-byte header. Needs at least kHeaderSize bytes.
inline Header decode_header(std::span<const Byte> bytes) {
  if (bytes.size() < kHeaderSize) throw FrameError(FrameFault::Truncated, "header");
  if (bytes[0] != kMagic0 || bytes[1] != kMagic1) throw FrameError(FrameFault::BadMagic);
  if (bytes[2] != kVersion) throw FrameError(FrameFault::BadVersion, std::to_string(bytes[2]));
  if (bytes[3] < static_cast<Byte>(MsgType::Connect) || bytes[3] > static_cast<Byte>(MsgType::ListResp)) {
    throw FrameError(FrameFault::UnknownType, std::to_string(bytes[3]));
  }
  const std::size_t len = (std::size_t{bytes[4]} << 8) | bytes[5];
  if (len > kMaxPayload) throw FrameError(FrameFault::Oversize, std::to_string(len) + " byte payload");
  return {static_cast<MsgType>(bytes[3]), len};
}

/// Decodes exactly one frame occupying all of `bytes`.
inline Message decode(std::span<const Byte> bytes) {
  const Header h = decode_header(bytes);
  if (bytes.size() < kHeaderSize + h.payload_length) throw FrameError(FrameFault::Truncated);
  if (bytes.size() > kHeaderSize + h.payload_length) {
    throw FrameError(FrameFault::LengthMismatch, "bytes after frame end");
  }
  return decode_payload(h.type, bytes.subspan(kHeaderSize));
}

/// Stream form: returns the first frame and its length once the buffer holds
/// all of it, nullopt while more bytes are needed.
inline std::optional<std::pair<Message, std::size_t>> try_decode(std::span<const Byte> buffer) {
  if (buffer.size() < kHeaderSize) {
    // Reject garbage early instead of waiting for a full header.
    if (!buffer.empty() && buffer[0] != kMagic0) throw FrameError(FrameFault::BadMagic);
    if (buffer.size() > 1 && buffer[1] != kMagic1) throw FrameError(FrameFault::BadMagic);
    return std::nullopt;
  }
  const Header h = decode_header(buffer);
  const std::size_t total = kHeaderSize + h.payload_length;
  if (buffer.size() < total) return std::nullopt;
  return std::pair{decode_payload(h.type, buffer.subspan(kHeaderSize, h.payload_length)), total};
}

inline Status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoSuchVb: return Status::NoSuchVb;
    case ErrorCode::OutOfRange: return Status::OutOfRange;
    case ErrorCode::AccessDenied: return Status::AccessDenied;
    case ErrorCode::Mode: return Status::ModeError;
    default: return Status::BadRequest;
  }
}

}  // namespace vbscan::wire
