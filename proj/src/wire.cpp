#include "gictk/wire.hpp"

#include <cstring>

namespace gictk::wire {

namespace {

void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_i64(Bytes& out, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(BytesView data) : data_(data) {}

  bool u8(std::uint8_t& v) {
    if (pos_ + 1 > data_.size()) return false;
    v = data_[pos_++];
    return true;
  }
  bool u16(std::uint16_t& v) {
    if (pos_ + 2 > data_.size()) return false;
    v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return true;
  }
  bool u32(std::uint32_t& v) {
    if (pos_ + 4 > data_.size()) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return true;
  }
  bool i64(std::int64_t& v) {
    if (pos_ + 8 > data_.size()) return false;
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    v = static_cast<std::int64_t>(u);
    return true;
  }
  bool raw(std::size_t n, Bytes& out) {
    if (pos_ + n > data_.size()) return false;
    out.assign(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return true;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  BytesView data_;
  std::size_t pos_ = 0;
};

Bytes frame(const Bytes& body) {
  Bytes out;
  out.reserve(4 + body.size());
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

// Strips and checks the length prefix; returns the body.
std::optional<BytesView> unframe(BytesView data) {
  if (data.size() < 4) return std::nullopt;
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(data[i]) << (8 * i);
  if (data.size() != 4u + len) return std::nullopt;
  return data.subspan(4);
}

Bytes request_payload(const Nonce& nonce) {
  Bytes body;
  put_u8(body, kVersion);
  put_u8(body, static_cast<std::uint8_t>(Kind::SyncRequest));
  body.insert(body.end(), nonce.begin(), nonce.end());
  return body;
}

Bytes response_payload(const Nonce& nonce, TimeNs t2, TimeNs t3) {
  Bytes body;
  put_u8(body, kVersion);
  put_u8(body, static_cast<std::uint8_t>(Kind::SyncResponse));
  body.insert(body.end(), nonce.begin(), nonce.end());
  put_i64(body, t2);
  put_i64(body, t3);
  return body;
}

}  // namespace

Nonce random_nonce(Rng& rng) {
  Nonce n{};
  for (std::size_t i = 0; i < n.size(); i += 8) {
    const std::uint64_t word = rng();
    std::memcpy(n.data() + i, &word, 8);
  }
  return n;
}

SyncRequest make_sync_request(const Nonce& nonce, const SigningKey& receiver_key) {
  SyncRequest req;
  req.nonce = nonce;
  req.signature = receiver_key.sign(request_payload(nonce));
  return req;
}

SyncResponse make_sync_response(const Nonce& nonce, TimeNs t2, TimeNs t3,
                                const SigningKey& provider_key) {
  SyncResponse resp;
  resp.nonce = nonce;
  resp.t2 = t2;
  resp.t3 = t3;
  resp.signature = provider_key.sign(response_payload(nonce, t2, t3));
  return resp;
}

bool verify(const SyncRequest& request, const VerifyKey& receiver_key) {
  return receiver_key.verify(request_payload(request.nonce), request.signature);
}

bool verify(const SyncResponse& response, const VerifyKey& provider_key) {
  return provider_key.verify(
      response_payload(response.nonce, response.t2, response.t3),
      response.signature);
}

Bytes encode(const SyncRequest& request) {
  Bytes body = request_payload(request.nonce);
  put_u16(body, static_cast<std::uint16_t>(request.signature.size()));
  body.insert(body.end(), request.signature.begin(), request.signature.end());
  return frame(body);
}

Bytes encode(const SyncResponse& response) {
  Bytes body = response_payload(response.nonce, response.t2, response.t3);
  put_u16(body, static_cast<std::uint16_t>(response.signature.size()));
  body.insert(body.end(), response.signature.begin(), response.signature.end());
  return frame(body);
}

std::optional<SyncRequest> decode_sync_request(BytesView data) {
  auto body = unframe(data);
  if (!body) return std::nullopt;
  Reader r(*body);
  std::uint8_t version = 0, kind = 0;
  SyncRequest req;
  Bytes nonce;
  std::uint16_t sig_len = 0;
  if (!r.u8(version) || version != kVersion) return std::nullopt;
  if (!r.u8(kind) || kind != static_cast<std::uint8_t>(Kind::SyncRequest)) return std::nullopt;
  if (!r.raw(req.nonce.size(), nonce)) return std::nullopt;
  std::memcpy(req.nonce.data(), nonce.data(), req.nonce.size());
  if (!r.u16(sig_len) || !r.raw(sig_len, req.signature) || !r.done()) return std::nullopt;
  return req;
}

std::optional<SyncResponse> decode_sync_response(BytesView data) {
  auto body = unframe(data);
  if (!body) return std::nullopt;
  Reader r(*body);
  std::uint8_t version = 0, kind = 0;
  SyncResponse resp;
  Bytes nonce;
  std::uint16_t sig_len = 0;
  if (!r.u8(version) || version != kVersion) return std::nullopt;
  if (!r.u8(kind) || kind != static_cast<std::uint8_t>(Kind::SyncResponse)) return std::nullopt;
  if (!r.raw(resp.nonce.size(), nonce)) return std::nullopt;
  std::memcpy(resp.nonce.data(), nonce.data(), resp.nonce.size());
  if (!r.i64(resp.t2) || !r.i64(resp.t3)) return std::nullopt;
  if (!r.u16(sig_len) || !r.raw(sig_len, resp.signature) || !r.done()) return std::nullopt;
  return resp;
}

Bytes encode(const BroadcastRecord& record) {
  if (record.label.size() > 255) throw std::invalid_argument("label too long");
  Bytes body;
  put_u8(body, kVersion);
  put_u8(body, static_cast<std::uint8_t>(record.kind));
  put_u8(body, static_cast<std::uint8_t>(record.label.size()));
  body.insert(body.end(), record.label.begin(), record.label.end());
  put_u32(body, record.tuple_index);
  put_u32(body, record.key_index);
  put_i64(body, record.scheduled_at);
  put_u16(body, static_cast<std::uint16_t>(record.payload.size()));
  body.insert(body.end(), record.payload.begin(), record.payload.end());
  return frame(body);
}

std::optional<BroadcastRecord> decode_broadcast(BytesView data) {
  auto body = unframe(data);
  if (!body) return std::nullopt;
  Reader r(*body);
  std::uint8_t version = 0, kind = 0, label_len = 0;
  BroadcastRecord rec;
  if (!r.u8(version) || version != kVersion) return std::nullopt;
  if (!r.u8(kind)) return std::nullopt;
  if (kind < static_cast<std::uint8_t>(Kind::BroadcastMessage) ||
      kind > static_cast<std::uint8_t>(Kind::BroadcastKey)) {
    return std::nullopt;
  }
  rec.kind = static_cast<Kind>(kind);
  if (!r.u8(label_len)) return std::nullopt;
  Bytes label;
  if (!r.raw(label_len, label)) return std::nullopt;
  rec.label.assign(label.begin(), label.end());
  std::uint16_t payload_len = 0;
  if (!r.u32(rec.tuple_index) || !r.u32(rec.key_index) || !r.i64(rec.scheduled_at)) {
    return std::nullopt;
  }
  if (!r.u16(payload_len) || !r.raw(payload_len, rec.payload) || !r.done()) {
    return std::nullopt;
  }
  return rec;
}

}  // namespace gictk::wire
