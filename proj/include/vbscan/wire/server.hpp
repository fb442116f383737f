#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vbscan/runtime.hpp"
#include "vbscan/wire/codec.hpp"
#include "vbscan/wire/socket.hpp"

namespace vbscan::wire {

inline constexpr std::uint32_t kMaxStepPerRequest = 1'000'000;

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;  // 0 picks an ephemeral port
  Byte rack = 0;
  Byte slot = 2;
};

// Serves one Runtime over SVBP. Each connection gets its own thread and is
// answered strictly in order. A connection must CONNECT with the configured
// rack/slot before any other request is honoured; a malformed frame or a
// response-type message closes the connection.
class Server {
 public:
  Server(Runtime& runtime, ServerOptions options) : runtime_(runtime), options_(std::move(options)) {}
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  void start() {
    listener_ = listen_tcp(options_.host, options_.port);
    port_ = local_port(listener_);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  void stop() {
    if (!running_.exchange(false)) return;
    if (acceptor_.joinable()) acceptor_.join();
    listener_.close();
    std::list<Connection> conns;
    {
      std::lock_guard lock(conns_mutex_);
      conns.swap(connections_);
    }
    for (auto& c : conns) {
      if (c.thread.joinable()) c.thread.join();
    }
  }

  std::uint16_t port() const { return port_; }
  std::uint64_t requests_served() const { return requests_.load(); }

  /// Answers one request; `connected` is the per-connection CONNECT state.
  Message handle(const Message& request, bool& connected) {
    ++requests_;
    return std::visit(detail::Overloaded{
                          [&](const Connect& c) -> Message {
                            connected = c.rack == options_.rack && c.slot == options_.slot;
                            return ConnAck{connected ? Status::Ok : Status::BadRequest};
                          },
                          [&](const Read& r) -> Message {
                            if (!connected || r.length > kMaxReadChunk) return ReadResp{Status::BadRequest, {}};
                            try {
                              return ReadResp{Status::Ok, runtime_.network_read({r.db, r.start, r.length})};
                            } catch (const Error& e) {
                              return ReadResp{status_for(e.code()), {}};
                            }
                          },
                          [&](const Write& w) -> Message {
                            if (!connected) return WriteResp{Status::BadRequest};
                            try {
                              runtime_.network_write({w.db, w.start, static_cast<std::uint32_t>(w.data.size())}, w.data);
                              return WriteResp{Status::Ok};
                            } catch (const Error& e) {
                              return WriteResp{status_for(e.code())};
                            }
                          },
                          [&](const Step& s) -> Message {
                            if (!connected || s.count > kMaxStepPerRequest) {
                              return StepAck{Status::BadRequest, runtime_.cycle_count()};
                            }
                            try {
                              runtime_.step(s.count);
                              return StepAck{Status::Ok, runtime_.cycle_count()};
                            } catch (const Error& e) {
                              return StepAck{status_for(e.code()), runtime_.cycle_count()};
                            }
                          },
                          [&](const ListVb&) -> Message {
                            if (!connected) return ListResp{Status::BadRequest, {}};
                            auto blocks = runtime_.list_vbs();
                            if (blocks.size() * 7 + 3 > kMaxPayload) return ListResp{Status::BadRequest, {}};
                            return ListResp{Status::Ok, std::move(blocks)};
                          },
                          [&](const auto&) -> Message {
                            throw FrameError(FrameFault::BadField, "response message sent as request");
                          },
                      },
                      request);
  }

 private:
  struct Connection {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void accept_loop() {
    while (running_) {
      if (!listener_.wait_readable(std::chrono::milliseconds(50))) {
        reap();
        continue;
      }
      const int fd = ::accept(listener_.fd(), nullptr, nullptr);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      auto done = std::make_shared<std::atomic<bool>>(false);
      std::lock_guard lock(conns_mutex_);
      connections_.push_back({std::thread([this, fd, done] {
                                Socket sock(fd);
                                serve_connection(sock);
                                *done = true;
                              }),
                              done});
    }
  }

  // Joins connection threads whose peer already hung up.
  void reap() {
    std::lock_guard lock(conns_mutex_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (*it->done && it->thread.joinable()) {
        it->thread.join();
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void serve_connection(Socket& sock) {
    std::vector<Byte> buffer;
    std::vector<Byte> chunk(kMaxFrame);
    bool connected = false;
    try {
      while (running_) {
        if (!sock.wait_readable(std::chrono::milliseconds(50))) continue;
        const std::size_t n = sock.recv_some(chunk);
        if (n == 0) break;
        buffer.insert(buffer.end(), chunk.begin(), chunk.begin() + static_cast<std::ptrdiff_t>(n));
        while (auto frame = try_decode(buffer)) {
          const Message reply = handle(frame->first, connected);
          buffer.erase(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(frame->second));
          sock.send_all(encode(reply));
        }
      }
    } catch (const Error&) {
      // malformed input or a dead peer: drop the connection
    }
    sock.close();
  }

  Runtime& runtime_;
  ServerOptions options_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<std::uint64_t> requests_{0};
  std::thread acceptor_;
  std::mutex conns_mutex_;
  std::list<Connection> connections_;
};

}  // namespace vbscan::wire
