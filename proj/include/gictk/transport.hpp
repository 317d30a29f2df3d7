#pragma once

#include <optional>

#include "gictk/adversary.hpp"
#include "gictk/crypto.hpp"
#include "gictk/timesync.hpp"

namespace gictk::transport {

// In-process synchronization channel with an adversary on both legs. Event
// times follow the simulated timeline analytically: each leg costs the base
// latency plus the adversary's hold, and server processing costs one more
// latency step. The receiver-frame stamps embed the configured true offset,
// which receiver-side logic never sees directly.
class SimTransport final : public timesync::SyncTransport {
 public:
  enum class Tamper { None, StaleNonce, BadSignature, WrongEcho };

  struct Config {
    DurNs theta = 0;            // receiver clock offset during the exchange
    DurNs latency = 10'000'000; // per transmission step, >= 1
    DurNs server_processing = 10'000'000;
    adversary::Delay request_delay = adversary::Delay::of(0);
    adversary::Delay response_delay = adversary::Delay::of(0);
    TimeNs start_time = 0;      // provider-frame send instant t1
    Tamper tamper = Tamper::None;
  };

  struct ExchangeTimes {
    TimeNs t1 = 0, t2 = 0, t3 = 0, t4 = 0;  // provider frame, ground truth
  };

  SimTransport(Config config, const SigningKey& provider_key,
               const VerifyKey* receiver_key = nullptr)
      : config_(config), provider_key_(provider_key), receiver_key_(receiver_key) {
    if (config_.latency < 1) {
      throw std::invalid_argument("latency must be at least 1 ns");
    }
  }

  std::optional<Bytes> round_trip(BytesView request_frame, TimeNs& tau1,
                                  TimeNs& tau4) override;

  const std::optional<ExchangeTimes>& last_exchange() const { return last_; }

 private:
  Config config_;
  SigningKey provider_key_;
  const VerifyKey* receiver_key_;
  std::optional<ExchangeTimes> last_;
};

}  // namespace gictk::transport
