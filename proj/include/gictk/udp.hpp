#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>

#include "gictk/crypto.hpp"
#include "gictk/timesync.hpp"

namespace gictk::udp {

// Monotonic clock in nanoseconds; the loopback demo's provider frame.
TimeNs steady_now();

// Datagram time server: stamps arrival and departure against the provider
// frame and answers with a signed response. One thread, loopback only.
class TimeServer {
 public:
  explicit TimeServer(SigningKey provider_key,
                      std::optional<VerifyKey> receiver_key = std::nullopt);
  ~TimeServer();
  TimeServer(const TimeServer&) = delete;
  TimeServer& operator=(const TimeServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  void loop();

  SigningKey provider_key_;
  std::optional<VerifyKey> receiver_key_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
};

// Man-in-the-middle relay for the demo: holds each leg for a configured
// time, and can drop or replay responses.
class DelayProxy {
 public:
  enum class Mode { Forward, DropResponse, ReplayResponse };

  struct Config {
    std::uint16_t target_port = 0;
    DurNs request_hold = 0;
    DurNs response_hold = 0;
    Mode mode = Mode::Forward;
  };

  explicit DelayProxy(Config config);
  ~DelayProxy();
  DelayProxy(const DelayProxy&) = delete;
  DelayProxy& operator=(const DelayProxy&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  void loop();

  Config config_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  Bytes held_response_;  // previous response, for replay mode
  std::thread thread_;
};

// Receiver-side transport over a loopback datagram socket. The receiver
// clock is the monotonic clock shifted by a configured offset, standing in
// for a real GIC.
class Transport final : public timesync::SyncTransport {
 public:
  Transport(std::uint16_t server_port, DurNs receiver_theta, DurNs timeout);

  std::optional<Bytes> round_trip(BytesView request_frame, TimeNs& tau1,
                                  TimeNs& tau4) override;

 private:
  std::uint16_t server_port_;
  DurNs theta_;
  DurNs timeout_;
};

}  // namespace gictk::udp
