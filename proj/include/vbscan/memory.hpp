#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "vbscan/address.hpp"
#include "vbscan/error.hpp"

namespace vbscan {

enum class Origin { Network, Internal };

struct VariableBlock {
  DbNumber number = 0;
  std::vector<Byte> data;
  bool write_protected = false;
};

struct VbInfo {
  DbNumber number = 0;
  std::uint32_t size = 0;
  bool write_protected = false;

  auto operator<=>(const VbInfo&) const = default;
};

using Snapshot = std::map<DbNumber, std::vector<Byte>>;

// Byte-addressable VB memory shared by the runtime and the network service.
// Every public call takes the lock once, so a single read or write request is
// atomic with respect to every other request.
class MemoryStore {
 public:
  MemoryStore() = default;
  MemoryStore(const MemoryStore&) = delete;
  MemoryStore& operator=(const MemoryStore&) = delete;

  void add_block(DbNumber number, std::uint32_t size, bool write_protected,
                 std::span<const Byte> initial = {}) {
    std::unique_lock lock(mutex_);
    if (blocks_.contains(number)) {
      throw Error(ErrorCode::DuplicateVb, "DB" + std::to_string(number) + " declared twice");
    }
    if (initial.size() > size) {
      throw Error(ErrorCode::OutOfRange, "initial data larger than DB" + std::to_string(number));
    }
    VariableBlock vb{number, std::vector<Byte>(size, 0), write_protected};
    std::copy(initial.begin(), initial.end(), vb.data.begin());
    blocks_.emplace(number, std::move(vb));
  }

  void add_block(const VariableBlock& vb) {
    add_block(vb.number, static_cast<std::uint32_t>(vb.data.size()), vb.write_protected, vb.data);
  }

  bool contains(DbNumber number) const {
    std::shared_lock lock(mutex_);
    return blocks_.contains(number);
  }

  std::uint32_t size_of(DbNumber number) const {
    std::shared_lock lock(mutex_);
    return static_cast<std::uint32_t>(block(number).data.size());
  }

  std::vector<VbInfo> list() const {
    std::shared_lock lock(mutex_);
    std::vector<VbInfo> out;
    out.reserve(blocks_.size());
    for (const auto& [number, vb] : blocks_) {
      out.push_back({number, static_cast<std::uint32_t>(vb.data.size()), vb.write_protected});
    }
    return out;
  }

  /// Throws NoSuchVb / OutOfRange when the span does not resolve.
  void resolve(const ByteSpan& span) const {
    std::shared_lock lock(mutex_);
    check(span);
  }

  std::vector<Byte> read_bytes(const ByteSpan& span) const {
    std::shared_lock lock(mutex_);
    const VariableBlock& vb = check(span);
    auto first = vb.data.begin() + span.start;
    return {first, first + span.length};
  }

  void write_bytes(const ByteSpan& span, std::span<const Byte> data, Origin origin) {
    if (data.size() != span.length) {
      throw Error(ErrorCode::OutOfRange, "write of " + std::to_string(data.size()) +
                                             " bytes into span of " + std::to_string(span.length));
    }
    std::unique_lock lock(mutex_);
    VariableBlock& vb = checked(span);
    if (origin == Origin::Network && vb.write_protected) {
      throw Error(ErrorCode::AccessDenied, "DB" + std::to_string(span.db) + " is write protected");
    }
    std::copy(data.begin(), data.end(), vb.data.begin() + span.start);
  }

  bool read_bit(const BitAddress& a) const {
    const Byte b = read_bytes({a.db, a.byte_offset, 1})[0];
    return ((b >> a.bit) & 1u) != 0;
  }

  void write_bit(const BitAddress& a, bool value, Origin origin) {
    // Read-modify-write under one lock so the neighbouring bits cannot tear.
    std::unique_lock lock(mutex_);
    VariableBlock& vb = checked({a.db, a.byte_offset, 1});
    if (origin == Origin::Network && vb.write_protected) {
      throw Error(ErrorCode::AccessDenied, "DB" + std::to_string(a.db) + " is write protected");
    }
    if (a.bit > 7) throw Error(ErrorCode::Range, "bit index out of range");
    Byte& b = vb.data[a.byte_offset];
    b = static_cast<Byte>(value ? (b | (1u << a.bit)) : (b & ~(1u << a.bit)));
  }

  // Big-endian integer helpers used by FB logic.
  std::int16_t read_i16(DbNumber db, std::uint32_t offset) const {
    const auto raw = read_bytes({db, offset, 2});
    return static_cast<std::int16_t>((raw[0] << 8) | raw[1]);
  }

  void write_i16(DbNumber db, std::uint32_t offset, std::int16_t value, Origin origin) {
    const auto u = static_cast<std::uint16_t>(value);
    const Byte raw[2] = {static_cast<Byte>(u >> 8), static_cast<Byte>(u)};
    write_bytes({db, offset, 2}, raw, origin);
  }

  std::int32_t read_i32(DbNumber db, std::uint32_t offset) const {
    const auto raw = read_bytes({db, offset, 4});
    const std::uint32_t u = (std::uint32_t{raw[0]} << 24) | (std::uint32_t{raw[1]} << 16) |
                            (std::uint32_t{raw[2]} << 8) | raw[3];
    return static_cast<std::int32_t>(u);
  }

  void write_i32(DbNumber db, std::uint32_t offset, std::int32_t value, Origin origin) {
    const auto u = static_cast<std::uint32_t>(value);
    const Byte raw[4] = {static_cast<Byte>(u >> 24), static_cast<Byte>(u >> 16),
                         static_cast<Byte>(u >> 8), static_cast<Byte>(u)};
    write_bytes({db, offset, 4}, raw, origin);
  }

  Snapshot snapshot() const {
    std::shared_lock lock(mutex_);
    Snapshot out;
    for (const auto& [number, vb] : blocks_) out.emplace(number, vb.data);
    return out;
  }

  /// The snapshot must cover exactly the same VB numbers and sizes.
  void restore(const Snapshot& snap) {
    std::unique_lock lock(mutex_);
    if (snap.size() != blocks_.size()) {
      throw Error(ErrorCode::SnapshotMismatch, "snapshot holds " + std::to_string(snap.size()) +
                                                   " VBs, store holds " +
                                                   std::to_string(blocks_.size()));
    }
    for (const auto& [number, bytes] : snap) {
      auto it = blocks_.find(number);
      if (it == blocks_.end() || it->second.data.size() != bytes.size()) {
        throw Error(ErrorCode::SnapshotMismatch, "DB" + std::to_string(number) + " differs in shape");
      }
    }
    for (const auto& [number, bytes] : snap) blocks_.at(number).data = bytes;
  }

 private:
  const VariableBlock& block(DbNumber number) const {
    auto it = blocks_.find(number);
    if (it == blocks_.end()) {
      throw Error(ErrorCode::NoSuchVb, "DB" + std::to_string(number));
    }
    return it->second;
  }

  const VariableBlock& check(const ByteSpan& span) const {
    const VariableBlock& vb = block(span.db);
    if (span.end() > vb.data.size()) {
      throw Error(ErrorCode::OutOfRange, to_string(span) + " exceeds DB" + std::to_string(span.db) +
                                             " size " + std::to_string(vb.data.size()));
    }
    return vb;
  }

  VariableBlock& checked(const ByteSpan& span) {
    check(span);
    return blocks_.find(span.db)->second;
  }

  mutable std::shared_mutex mutex_;
  std::map<DbNumber, VariableBlock> blocks_;
};

}  // namespace vbscan
