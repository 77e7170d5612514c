#pragma once

// Line-oriented TCP boundary for black-box SULs.
//
//   client: RESET            server: OK
//   client: STEP <input>     server: <output>
//                            server: ERR <msg>   (unknown input, bad command)
//
// One connection per session; every line is UTF-8 terminated by '\n'.

#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fsmprint/sul.hpp"

namespace fsmprint {

namespace net_detail {

class Socket {
public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)), buffer_(std::move(o.buffer_)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
      buffer_ = std::move(o.buffer_);
    }
    return *this;
  }
  ~Socket() { close(); }

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }

  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

  void shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  /// False if the peer has gone away.
  bool write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t sent = 0;
    while (sent < data.size()) {
      const auto n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  /// Reads up to the next '\n' (stripped, along with a trailing '\r').
  /// Empty optional on EOF.
  std::optional<std::string> read_line() {
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      char chunk[4096];
      const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return std::nullopt;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

private:
  int fd_ = -1;
  std::string buffer_;
};

inline Socket connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw ConnectFailure("cannot resolve " + host + ": " + ::gai_strerror(rc));
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
  for (auto* ai = res; ai; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s.valid()) continue;
    if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) return s;
  }
  throw ConnectFailure("cannot connect to " + host + ":" + service);
}

}  // namespace net_detail

/// Client side of the line protocol.
class RemoteEndpoint final : public Endpoint {
public:
  RemoteEndpoint(const std::string& host, std::uint16_t port)
      : socket_(net_detail::connect_tcp(host, port)) {}

  void reset() override {
    const auto reply = exchange("RESET");
    if (reply != "OK") throw RemoteProtocolError("expected OK after RESET, got '" + reply + "'");
  }

  std::string step(const std::string& input) override { return exchange("STEP " + input); }

private:
  std::string exchange(const std::string& request) {
    if (!socket_.write_line(request)) throw RemoteProtocolError("connection lost while sending");
    auto reply = socket_.read_line();
    if (!reply) throw RemoteProtocolError("connection closed by SUL");
    if (reply->rfind("ERR", 0) == 0)
      throw RemoteProtocolError("SUL error: " + (reply->size() > 4 ? reply->substr(4) : *reply));
    return *reply;
  }

  net_detail::Socket socket_;
};

/// Opens a session against a remote SUL. The input alphabet must be known
/// to the client up front.
inline SulSession make_remote_sul(const std::string& host, std::uint16_t port, Alphabet inputs) {
  return SulSession(std::move(inputs), std::make_unique<RemoteEndpoint>(host, port));
}

/// Parses `host:port`.
inline std::pair<std::string, std::uint16_t> parse_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size())
    throw ConnectFailure("address must be host:port, got '" + address + "'");
  const std::string port_text = address.substr(colon + 1);
  std::size_t used = 0;
  unsigned long port = 0;
  try {
    port = std::stoul(port_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port_text.size() || port == 0 || port > 65535)
    throw ConnectFailure("invalid port '" + port_text + "'");
  return {address.substr(0, colon), static_cast<std::uint16_t>(port)};
}

inline SulSession make_remote_sul(const std::string& address, Alphabet inputs) {
  auto [host, port] = parse_address(address);
  return make_remote_sul(host, port, std::move(inputs));
}

/// Serves a Mealy machine over the line protocol. Each connection gets its
/// own simulated state. Listens on the loopback interface.
class SulServer {
public:
  explicit SulServer(MealyMachine machine, std::uint16_t port = 0) : machine_(std::move(machine)) {
    listener_ = net_detail::Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!listener_.valid()) throw ConnectFailure("socket(): " + std::string(std::strerror(errno)));
    int yes = 1;
    ::setsockopt(listener_.fd(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
      throw ConnectFailure("bind(): " + std::string(std::strerror(errno)));
    if (::listen(listener_.fd(), 16) != 0)
      throw ConnectFailure("listen(): " + std::string(std::strerror(errno)));
    socklen_t len = sizeof addr;
    ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  SulServer(const SulServer&) = delete;
  SulServer& operator=(const SulServer&) = delete;

  ~SulServer() { stop(); }

  std::uint16_t port() const noexcept { return port_; }

  void stop() {
    if (stopping_.exchange(true)) return;
    listener_.shutdown();
    if (acceptor_.joinable()) acceptor_.join();
    {
      std::lock_guard lock(mutex_);
      for (auto& c : clients_) c->shutdown();
    }
    for (auto& t : workers_)
      if (t.joinable()) t.join();
    listener_.close();
  }

  /// Blocks until stop() is called from elsewhere.
  void wait() {
    if (acceptor_.joinable()) acceptor_.join();
  }

private:
  void accept_loop() {
    while (!stopping_) {
      const int fd = ::accept(listener_.fd(), nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;
      }
      auto client = std::make_shared<net_detail::Socket>(fd);
      std::lock_guard lock(mutex_);
      clients_.push_back(client);
      workers_.emplace_back([this, client] { serve(*client); });
    }
  }

  void serve(net_detail::Socket& client) const {
    SimulatedEndpoint sim(machine_);
    while (auto line = client.read_line()) {
      std::string reply;
      if (*line == "RESET") {
        sim.reset();
        reply = "OK";
      } else if (line->rfind("STEP ", 0) == 0) {
        try {
          reply = sim.step(line->substr(5));
        } catch (const UnknownInputSymbol& e) {
          reply = "ERR unknown input " + e.symbol();
        }
      } else {
        reply = "ERR bad command";
      }
      if (!client.write_line(reply)) return;
    }
  }

  MealyMachine machine_;
  net_detail::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::vector<std::shared_ptr<net_detail::Socket>> clients_;
  std::vector<std::thread> workers_;
};

}  // namespace fsmprint
