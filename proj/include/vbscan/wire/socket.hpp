#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <span>
#include <string>
#include <utility>

#include "vbscan/error.hpp"

namespace vbscan::wire {

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }

  void close() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

  void shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  void send_all(std::span<const std::uint8_t> data) const {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) throw Error(ErrorCode::Timeout, "send timed out");
        throw Error(ErrorCode::ConnectionFailed, std::string("send: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  /// Waits up to `timeout` for readability. Returns false on timeout.
  bool wait_readable(std::chrono::milliseconds timeout) const {
    pollfd p{fd_, POLLIN, 0};
    for (;;) {
      const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
      if (rc < 0 && errno == EINTR) continue;
      if (rc < 0) throw Error(ErrorCode::ConnectionFailed, std::string("poll: ") + std::strerror(errno));
      return rc > 0;
    }
  }

  /// Returns 0 on orderly close.
  std::size_t recv_some(std::span<std::uint8_t> out) const {
    for (;;) {
      const ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) throw Error(ErrorCode::ConnectionFailed, std::string("recv: ") + std::strerror(errno));
      return static_cast<std::size_t>(n);
    }
  }

 private:
  int fd_ = -1;
};

inline sockaddr_in resolve_ipv4(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error(ErrorCode::ConnectionFailed, "cannot resolve host '" + host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return addr;
}

inline Socket connect_tcp(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve_ipv4(host, port);
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw Error(ErrorCode::ConnectionFailed, std::string("socket: ") + std::strerror(errno));

  const int flags = ::fcntl(s.fd(), F_GETFL, 0);
  ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
  if (rc < 0 && errno != EINPROGRESS) {
    throw Error(ErrorCode::ConnectionFailed,
                host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  }
  if (rc < 0) {
    pollfd p{s.fd(), POLLOUT, 0};
    rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc == 0) throw Error(ErrorCode::Timeout, "connect to " + host + ":" + std::to_string(port));
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      throw Error(ErrorCode::ConnectionFailed,
                  host + ":" + std::to_string(port) + ": " + std::strerror(err));
    }
  }
  ::fcntl(s.fd(), F_SETFL, flags);
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return s;
}

/// Binds and listens; port 0 picks an ephemeral port.
inline Socket listen_tcp(const std::string& host, std::uint16_t port) {
  const sockaddr_in addr = resolve_ipv4(host, port);
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw Error(ErrorCode::ConnectionFailed, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
    throw Error(ErrorCode::ConnectionFailed,
                "bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  }
  if (::listen(s.fd(), 16) < 0) {
    throw Error(ErrorCode::ConnectionFailed, std::string("listen: ") + std::strerror(errno));
  }
  return s;
}

inline std::uint16_t local_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

}  // namespace vbscan::wire
