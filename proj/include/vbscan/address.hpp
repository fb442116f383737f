#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

#include "vbscan/error.hpp"

namespace vbscan {

using DbNumber = std::uint16_t;
using Byte = std::uint8_t;

struct BitAddress {
  DbNumber db = 0;
  std::uint32_t byte_offset = 0;
  std::uint8_t bit = 0;

  auto operator<=>(const BitAddress&) const = default;
};

struct ByteSpan {
  DbNumber db = 0;
  std::uint32_t start = 0;
  std::uint32_t length = 0;

  std::uint64_t end() const { return std::uint64_t{start} + length; }

  auto operator<=>(const ByteSpan&) const = default;
};

enum class Area : std::uint8_t { DB = 0x84 };

// P#DBn.DBXb.i. The bit address packs byte_offset*8 + bit into 24 bits.
struct PointerValue {
  static constexpr std::size_t kEncodedSize = 6;
  static constexpr std::uint32_t kMaxBitAddress = (1u << 24) - 1;

  Area area = Area::DB;
  DbNumber db = 0;
  std::uint32_t bit_address = 0;

  std::uint32_t byte_offset() const { return bit_address / 8; }
  std::uint8_t bit() const { return static_cast<std::uint8_t>(bit_address % 8); }
  BitAddress target() const { return {db, byte_offset(), bit()}; }

  static PointerValue to(BitAddress a) {
    if (std::uint64_t{a.byte_offset} * 8 + a.bit > kMaxBitAddress) {
      throw Error(ErrorCode::Range, "pointer byte offset exceeds 24-bit bit address");
    }
    return {Area::DB, a.db, a.byte_offset * 8 + a.bit};
  }

  std::array<Byte, kEncodedSize> encode() const {
    return {static_cast<Byte>(area),
            static_cast<Byte>(db >> 8),
            static_cast<Byte>(db),
            static_cast<Byte>(bit_address >> 16),
            static_cast<Byte>(bit_address >> 8),
            static_cast<Byte>(bit_address)};
  }

  /// Throws Error{Range} when the area tag is not DB or the bit address
  /// overflows 24 bits (impossible from six bytes, kept for symmetry).
  static PointerValue decode(const std::array<Byte, kEncodedSize>& raw) {
    if (raw[0] != static_cast<Byte>(Area::DB)) {
      throw Error(ErrorCode::Range, "unsupported pointer area tag " + std::to_string(raw[0]));
    }
    PointerValue p;
    p.db = static_cast<DbNumber>((raw[1] << 8) | raw[2]);
    p.bit_address = (std::uint32_t{raw[3]} << 16) | (std::uint32_t{raw[4]} << 8) | raw[5];
    return p;
  }

  auto operator<=>(const PointerValue&) const = default;
};

using Address = std::variant<BitAddress, ByteSpan, PointerValue>;

inline constexpr Byte invert_byte(Byte b) { return static_cast<Byte>(~b); }

namespace detail {

class AddressCursor {
 public:
  explicit AddressCursor(std::string_view text) : text_(text) {}

  std::size_t column() const { return pos_ + 1; }
  bool done() const { return pos_ >= text_.size(); }

  void expect(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) {
      throw SyntaxError(column(), "expected '" + std::string(token) + "'");
    }
    pos_ += token.size();
  }

  bool accept(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  char peek() const { return done() ? '\0' : text_[pos_]; }

  // Canonical decimal: no sign, no leading zeros, fits in 32 bits.
  std::uint64_t number() {
    const std::size_t begin = pos_;
    std::uint64_t value = 0;
    while (!done() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::Range, "number at column " + std::to_string(begin + 1) + " too large");
      }
      ++pos_;
    }
    if (pos_ == begin) throw SyntaxError(begin + 1, "expected decimal number");
    if (pos_ - begin > 1 && text_[begin] == '0') throw SyntaxError(begin + 1, "leading zero");
    return value;
  }

  void finish() {
    if (!done()) throw SyntaxError(column(), "unexpected trailing character");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline DbNumber db_number(std::uint64_t n) {
  if (n > std::numeric_limits<DbNumber>::max()) {
    throw Error(ErrorCode::Range, "DB number " + std::to_string(n) + " exceeds 65535");
  }
  return static_cast<DbNumber>(n);
}

inline std::uint8_t bit_index(std::uint64_t n) {
  if (n > 7) throw Error(ErrorCode::Range, "bit index " + std::to_string(n) + " out of range [0,7]");
  return static_cast<std::uint8_t>(n);
}

}  // namespace detail

/// Parses DBn.DBXb.i, DBn.DBB|DBW|DBDb, and P#DBn.DBXb.i.
inline Address parse_address(std::string_view text) {
  detail::AddressCursor cur(text);
  const bool pointer = cur.accept("P#");
  cur.expect("DB");
  const DbNumber db = detail::db_number(cur.number());
  cur.expect(".DB");
  const char kind = cur.peek();
  const std::size_t kind_column = cur.column();
  std::uint32_t width = 0;
  switch (kind) {
    case 'X': break;
    case 'B': width = 1; break;
    case 'W': width = 2; break;
    case 'D': width = 4; break;
    default: throw SyntaxError(kind_column, "expected one of X, B, W, D");
  }
  cur.accept(std::string_view(&kind, 1));
  if (pointer && width != 0) throw SyntaxError(kind_column, "pointers must use bit form DBX");
  const auto offset = static_cast<std::uint32_t>(cur.number());
  if (width != 0) {
    cur.finish();
    return ByteSpan{db, offset, width};
  }
  cur.expect(".");
  const std::uint8_t bit = detail::bit_index(cur.number());
  cur.finish();
  const BitAddress addr{db, offset, bit};
  if (pointer) return PointerValue::to(addr);
  return addr;
}

inline BitAddress parse_bit_address(std::string_view text) {
  const Address a = parse_address(text);
  if (const auto* bit = std::get_if<BitAddress>(&a)) return *bit;
  throw Error(ErrorCode::Syntax, "expected a bit address, got '" + std::string(text) + "'");
}

inline std::string to_string(const BitAddress& a) {
  return "DB" + std::to_string(a.db) + ".DBX" + std::to_string(a.byte_offset) + "." +
         std::to_string(a.bit);
}

/// Widths 1/2/4 render canonically; any other length renders as
/// DBn.DBBb+len, which is display-only and not accepted by parse_address.
inline std::string to_string(const ByteSpan& s) {
  std::string head = "DB" + std::to_string(s.db) + ".DB";
  switch (s.length) {
    case 1: return head + "B" + std::to_string(s.start);
    case 2: return head + "W" + std::to_string(s.start);
    case 4: return head + "D" + std::to_string(s.start);
    default: return head + "B" + std::to_string(s.start) + "+" + std::to_string(s.length);
  }
}

inline std::string to_string(const PointerValue& p) { return "P#" + to_string(p.target()); }

inline std::string format_address(const Address& a) {
  return std::visit([](const auto& v) { return to_string(v); }, a);
}

}  // namespace vbscan
