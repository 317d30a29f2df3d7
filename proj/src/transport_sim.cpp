#include "gictk/transport.hpp"

#include "gictk/clock.hpp"
#include "gictk/wire.hpp"

namespace gictk::transport {

std::optional<Bytes> SimTransport::round_trip(BytesView request_frame, TimeNs& tau1,
                                              TimeNs& tau4) {
  last_.reset();
  const GicClock receiver_clock(config_.theta);
  const TimeNs t1 = config_.start_time;
  tau1 = receiver_clock.measure(t1);

  auto request = wire::decode_sync_request(request_frame);
  if (!request) return std::nullopt;
  if (receiver_key_ != nullptr && !wire::verify(*request, *receiver_key_)) {
    return std::nullopt;  // provider drops unauthenticated queries
  }

  const auto t2 = adversary::delay_channel(config_.request_delay, t1, config_.latency);
  if (!t2) return std::nullopt;
  const TimeNs t3 = *t2 + config_.server_processing;
  const auto t4 = adversary::delay_channel(config_.response_delay, t3, config_.latency);
  if (!t4) return std::nullopt;
  tau4 = receiver_clock.measure(*t4);
  last_ = ExchangeTimes{t1, *t2, t3, *t4};

  wire::Nonce nonce = request->nonce;
  if (config_.tamper == Tamper::StaleNonce || config_.tamper == Tamper::WrongEcho) {
    nonce[0] ^= 0x5a;
  }
  wire::SyncResponse response = wire::make_sync_response(nonce, *t2, t3, provider_key_);
  if (config_.tamper == Tamper::BadSignature) {
    response.signature[0] ^= 0x5a;
  }
  return wire::encode(response);
}

}  // namespace gictk::transport
