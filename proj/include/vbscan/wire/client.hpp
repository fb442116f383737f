#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "vbscan/link.hpp"
#include "vbscan/wire/codec.hpp"
#include "vbscan/wire/socket.hpp"

namespace vbscan::wire {

inline ErrorCode error_code_for(Status s) {
  switch (s) {
    case Status::NoSuchVb: return ErrorCode::NoSuchVb;
    case Status::OutOfRange: return ErrorCode::OutOfRange;
    case Status::AccessDenied: return ErrorCode::AccessDenied;
    case Status::ModeError: return ErrorCode::Mode;
    default: return ErrorCode::Protocol;
  }
}

// Non-OK status returned by the server.
class StatusError : public Error {
 public:
  StatusError(Status status, const std::string& what)
      : Error(error_code_for(status), what + " (" + to_string(status) + ")"), status_(status) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

struct ClientOptions {
  std::chrono::milliseconds connect_timeout{2000};
  std::chrono::milliseconds request_timeout{5000};
};

// Blocking single-connection SVBP client. Reads and writes larger than one
// frame are split into consecutive requests; only each chunk is atomic.
class Client : public PlcLink {
 public:
  explicit Client(ClientOptions options = {}) : options_(options) {}

  void connect(const std::string& host, std::uint16_t port, Byte rack, Byte slot) {
    socket_ = connect_tcp(host, port, options_.connect_timeout);
    const auto ack = request<ConnAck>(Connect{rack, slot});
    if (ack.status != Status::Ok) {
      socket_.close();
      throw StatusError(ack.status, "CONNECT rack " + std::to_string(rack) + " slot " + std::to_string(slot));
    }
  }

  bool connected() const { return socket_.valid(); }
  void close() { socket_.close(); }

  std::vector<Byte> read(const ByteSpan& span) override {
    std::vector<Byte> out;
    out.reserve(span.length);
    std::uint32_t done = 0;
    do {
      const auto n = static_cast<std::uint16_t>(std::min<std::uint64_t>(span.length - done, kMaxReadChunk));
      const auto resp = request<ReadResp>(Read{span.db, span.start + done, n});
      if (resp.status != Status::Ok) throw StatusError(resp.status, "READ " + to_string(span));
      if (resp.data.size() != n) throw Error(ErrorCode::Protocol, "READRESP length mismatch");
      out.insert(out.end(), resp.data.begin(), resp.data.end());
      done += n;
    } while (done < span.length);
    return out;
  }

  void write(const ByteSpan& span, std::span<const Byte> data) override {
    if (data.size() != span.length) throw Error(ErrorCode::OutOfRange, "write data does not match span");
    std::uint32_t done = 0;
    do {
      const auto n = static_cast<std::uint32_t>(std::min<std::uint64_t>(span.length - done, kMaxWriteChunk));
      Write w{span.db, span.start + done, std::vector<Byte>(data.begin() + done, data.begin() + done + n)};
      const auto resp = request<WriteResp>(w);
      if (resp.status != Status::Ok) throw StatusError(resp.status, "WRITE " + to_string(span));
      done += n;
    } while (done < span.length);
  }

  std::uint64_t step(std::uint32_t cycles) override {
    const auto resp = request<StepAck>(Step{cycles});
    if (resp.status != Status::Ok) throw StatusError(resp.status, "STEP");
    return resp.cycles;
  }

  std::vector<VbInfo> list_vbs() override {
    auto resp = request<ListResp>(ListVb{});
    if (resp.status != Status::Ok) throw StatusError(resp.status, "LISTVB");
    return std::move(resp.blocks);
  }

 private:
  template <class Reply>
  Reply request(const Message& m) {
    if (!socket_.valid()) throw Error(ErrorCode::ConnectionFailed, "not connected");
    socket_.send_all(encode(m));
    Message reply = receive();
    if (auto* r = std::get_if<Reply>(&reply)) return std::move(*r);
    throw Error(ErrorCode::Protocol, "unexpected reply type");
  }

  Message receive() {
    std::vector<Byte> chunk(kMaxFrame);
    const auto deadline = std::chrono::steady_clock::now() + options_.request_timeout;
    for (;;) {
      if (auto frame = try_decode(buffer_)) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(frame->second));
        return std::move(frame->first);
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0 || !socket_.wait_readable(left)) {
        socket_.close();
        buffer_.clear();
        throw Error(ErrorCode::Timeout, "no reply within " + std::to_string(options_.request_timeout.count()) + " ms");
      }
      const std::size_t n = socket_.recv_some(chunk);
      if (n == 0) {
        socket_.close();
        buffer_.clear();
        throw Error(ErrorCode::ConnectionFailed, "connection closed by peer");
      }
      buffer_.insert(buffer_.end(), chunk.begin(), chunk.begin() + static_cast<std::ptrdiff_t>(n));
    }
  }

  ClientOptions options_;
  Socket socket_;
  std::vector<Byte> buffer_;
};

}  // namespace vbscan::wire
