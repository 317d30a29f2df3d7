#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "gictk/bytes.hpp"
#include "gictk/crypto.hpp"
#include "gictk/time.hpp"

namespace gictk::wire {

// Length-prefixed little-endian records; byte layouts are pinned in
// docs/FORMATS.md. The synchronization request deliberately carries nothing
// but the nonce and its signature: the send time stays on the receiver.

inline constexpr std::uint8_t kVersion = 1;

enum class Kind : std::uint8_t {
  SyncRequest = 1,
  SyncResponse = 2,
  BroadcastMessage = 3,
  BroadcastCommitment = 4,
  BroadcastKey = 5,
};

using Nonce = std::array<std::uint8_t, 16>;

Nonce random_nonce(Rng& rng);

struct SyncRequest {
  Nonce nonce{};
  Bytes signature;  // over (version, kind, nonce)
};

struct SyncResponse {
  Nonce nonce{};
  TimeNs t2 = 0;
  TimeNs t3 = 0;
  Bytes signature;  // over (version, kind, nonce, t2, t3)
};

SyncRequest make_sync_request(const Nonce& nonce, const SigningKey& receiver_key);
SyncResponse make_sync_response(const Nonce& nonce, TimeNs t2, TimeNs t3,
                                const SigningKey& provider_key);

bool verify(const SyncRequest& request, const VerifyKey& receiver_key);
bool verify(const SyncResponse& response, const VerifyKey& provider_key);

Bytes encode(const SyncRequest& request);
Bytes encode(const SyncResponse& response);

std::optional<SyncRequest> decode_sync_request(BytesView frame);
std::optional<SyncResponse> decode_sync_response(BytesView frame);

// Broadcast framing used by the simulator to carry TESLA objects. Not a real
// navigation-message encoding; just enough structure to associate messages,
// commitments, and delayed keys by explicit indices.
struct BroadcastRecord {
  Kind kind = Kind::BroadcastMessage;
  std::string label;           // TESLA instance label, <= 255 bytes
  std::uint32_t tuple_index = 0;
  std::uint32_t key_index = 0;
  TimeNs scheduled_at = 0;     // provider-frame broadcast time
  Bytes payload;
};

Bytes encode(const BroadcastRecord& record);
std::optional<BroadcastRecord> decode_broadcast(BytesView frame);

}  // namespace gictk::wire
