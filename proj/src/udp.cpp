#include "gictk/udp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>

#include "gictk/wire.hpp"

namespace gictk::udp {

namespace {

constexpr std::size_t kMaxDatagram = 2048;

int bind_loopback(std::uint16_t& port_out) {
  const int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd < 0) throw std::runtime_error("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw std::runtime_error("bind() failed");
  }
  socklen_t len = sizeof(addr);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    ::close(fd);
    throw std::runtime_error("getsockname() failed");
  }
  port_out = ntohs(addr.sin_port);
  return fd;
}

sockaddr_in loopback(std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  return addr;
}

// Waits for a datagram with a poll loop so the owner can stop the thread.
std::optional<Bytes> recv_with_stop(int fd, const std::atomic<bool>& stopping,
                                    sockaddr_in* from, DurNs budget = -1) {
  const auto start = std::chrono::steady_clock::now();
  while (!stopping.load()) {
    if (budget >= 0) {
      const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
      if (elapsed > budget) return std::nullopt;
    }
    pollfd pfd{fd, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, 50);
    if (rc <= 0) continue;
    Bytes buf(kMaxDatagram);
    socklen_t addr_len = from ? sizeof(*from) : 0;
    const ssize_t n =
        ::recvfrom(fd, buf.data(), buf.size(), 0,
                   from ? reinterpret_cast<sockaddr*>(from) : nullptr,
                   from ? &addr_len : nullptr);
    if (n <= 0) continue;
    buf.resize(static_cast<std::size_t>(n));
    return buf;
  }
  return std::nullopt;
}

void send_to(int fd, const sockaddr_in& addr, BytesView data) {
  ::sendto(fd, data.data(), data.size(), 0,
           reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
}

void sleep_ns(DurNs ns) {
  if (ns > 0) std::this_thread::sleep_for(std::chrono::nanoseconds(ns));
}

}  // namespace

TimeNs steady_now() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

TimeServer::TimeServer(SigningKey provider_key, std::optional<VerifyKey> receiver_key)
    : provider_key_(std::move(provider_key)), receiver_key_(std::move(receiver_key)) {
  fd_ = bind_loopback(port_);
  thread_ = std::thread([this] { loop(); });
}

TimeServer::~TimeServer() { stop(); }

void TimeServer::stop() {
  stopping_.store(true);
  if (thread_.joinable()) thread_.join();
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void TimeServer::loop() {
  while (!stopping_.load()) {
    sockaddr_in from{};
    auto datagram = recv_with_stop(fd_, stopping_, &from);
    if (!datagram) continue;
    const TimeNs t2 = steady_now();
    auto request = wire::decode_sync_request(*datagram);
    if (!request) continue;
    if (receiver_key_ && !wire::verify(*request, *receiver_key_)) continue;
    const TimeNs t3 = steady_now();
    const Bytes reply =
        wire::encode(wire::make_sync_response(request->nonce, t2, t3, provider_key_));
    send_to(fd_, from, reply);
  }
}

DelayProxy::DelayProxy(Config config) : config_(config) {
  fd_ = bind_loopback(port_);
  thread_ = std::thread([this] { loop(); });
}

DelayProxy::~DelayProxy() { stop(); }

void DelayProxy::stop() {
  stopping_.store(true);
  if (thread_.joinable()) thread_.join();
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void DelayProxy::loop() {
  const int upstream = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (upstream < 0) return;
  const sockaddr_in target = loopback(config_.target_port);
  while (!stopping_.load()) {
    sockaddr_in client{};
    auto request = recv_with_stop(fd_, stopping_, &client);
    if (!request) continue;

    sleep_ns(config_.request_hold);
    send_to(upstream, target, *request);
    auto response = recv_with_stop(upstream, stopping_, nullptr, 2 * kNsPerSec);
    if (!response) continue;
    sleep_ns(config_.response_hold);

    switch (config_.mode) {
      case Mode::Forward:
        send_to(fd_, client, *response);
        break;
      case Mode::DropResponse:
        break;
      case Mode::ReplayResponse:
        // Answer with the previously captured response; stale nonce for any
        // fresh request.
        if (!held_response_.empty()) {
          send_to(fd_, client, held_response_);
        } else {
          send_to(fd_, client, *response);
        }
        held_response_ = *response;
        break;
    }
  }
  ::close(upstream);
}

Transport::Transport(std::uint16_t server_port, DurNs receiver_theta, DurNs timeout)
    : server_port_(server_port), theta_(receiver_theta), timeout_(timeout) {}

std::optional<Bytes> Transport::round_trip(BytesView request_frame, TimeNs& tau1,
                                           TimeNs& tau4) {
  std::uint16_t local_port = 0;
  const int fd = bind_loopback(local_port);
  const sockaddr_in server = loopback(server_port_);

  tau1 = steady_now() + theta_;
  send_to(fd, server, request_frame);

  std::atomic<bool> never{false};
  auto response = recv_with_stop(fd, never, nullptr, timeout_);
  ::close(fd);
  if (!response) return std::nullopt;
  tau4 = steady_now() + theta_;
  return response;
}

}  // namespace gictk::udp
