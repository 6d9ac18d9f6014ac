#pragma once

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <istream>
#include <list>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "pokerl/protocol.hpp"

namespace pokerl::protocol {

/// Serves one session over a line stream until close or EOF.
inline void serve_stream(std::istream& in, std::ostream& out, const Assets& assets = default_assets()) {
  Session session(assets);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto r = session.handle(line);
    out << r.response << '\n' << std::flush;
    if (r.close) return;
  }
}

namespace detail {

inline bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

/// Buffered line reader over a socket; false on EOF, error, or stop.
class LineReader {
 public:
  LineReader(int fd, const std::atomic<bool>& stop) : fd_(fd), stop_(&stop) {}

  bool next(std::string& line) {
    for (;;) {
      if (auto nl = buf_.find('\n'); nl != std::string::npos) {
        line.assign(buf_, 0, nl);
        buf_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      pollfd p{fd_, POLLIN, 0};
      const int ready = ::poll(&p, 1, 100);
      if (*stop_) return false;
      if (ready < 0 && errno == EINTR) continue;
      if (ready < 0) return false;
      if (ready == 0) continue;
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  const std::atomic<bool>* stop_;
  std::string buf_;
};

}  // namespace detail

/// Line-protocol TCP server on 127.0.0.1. Each connection gets its own
/// thread and its own Session.
class TcpServer {
 public:
  /// port 0 binds an ephemeral port; read it back with port().
  explicit TcpServer(std::uint16_t port, const Assets& assets = default_assets()) : assets_(&assets) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 16) < 0) {
      const std::string why = std::strerror(errno);
      ::close(fd_);
      throw IoError("cannot listen on port " + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  ~TcpServer() {
    stop();
    if (acceptor_.joinable()) acceptor_.join();
    std::lock_guard lock(mu_);
    for (auto& t : workers_)
      if (t.joinable()) t.join();
    ::close(fd_);
  }

  std::uint16_t port() const noexcept { return port_; }

  /// Accepts in a background thread.
  void start() {
    acceptor_ = std::thread([this] { run(); });
  }

  /// Accepts on the calling thread until stop().
  void run() {
    while (!stop_) {
      pollfd p{fd_, POLLIN, 0};
      const int ready = ::poll(&p, 1, 100);
      if (ready <= 0) continue;
      const int client = ::accept(fd_, nullptr, nullptr);
      if (client < 0) continue;
      std::lock_guard lock(mu_);
      workers_.emplace_back([this, client] { handle(client); });
    }
  }

  void stop() noexcept { stop_ = true; }

 private:
  void handle(int client) {
    Session session(*assets_);
    detail::LineReader reader(client, stop_);
    std::string line;
    while (reader.next(line)) {
      if (line.empty()) continue;
      const auto r = session.handle(line);
      if (!detail::send_all(client, r.response + "\n") || r.close) break;
    }
    ::close(client);
  }

  const Assets* assets_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::list<std::thread> workers_;
};

/// Minimal blocking client, used by tests and tools.
class TcpClient {
 public:
  explicit TcpClient(std::uint16_t port) : reader_(-1, never_) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
      const std::string why = std::strerror(errno);
      ::close(fd_);
      throw IoError("connect: " + why);
    }
    reader_ = detail::LineReader(fd_, never_);
  }
  TcpClient(const TcpClient&) = delete;
  TcpClient& operator=(const TcpClient&) = delete;
  ~TcpClient() { ::close(fd_); }

  /// Sends one raw line and waits for the response line.
  std::string request(std::string_view line) {
    if (!detail::send_all(fd_, std::string(line) + "\n")) throw IoError("send failed");
    std::string reply;
    if (!reader_.next(reply)) throw IoError("connection closed");
    return reply;
  }

  Reply call(const Request& req) { return decode_reply(request(encode(req))); }

 private:
  std::atomic<bool> never_{false};
  int fd_ = -1;
  detail::LineReader reader_;
};

}  // namespace pokerl::protocol
