#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>

#include "gictk/bytes.hpp"
#include "gictk/rng.hpp"

namespace gictk {

using Digest = std::array<std::uint8_t, 32>;

// Hash/MAC seam. Production code goes through default_crypto() (SHA-256 and
// HMAC-SHA256); tests may substitute counting or broken variants.
class CryptoSuite {
 public:
  virtual ~CryptoSuite() = default;
  virtual Digest hash(BytesView data) const = 0;
  virtual Digest mac(BytesView key, BytesView message) const = 0;
};

const CryptoSuite& default_crypto();

// High-order truncation of a digest to n_bits (must be a positive multiple
// of 8, at most 256).
Bytes truncate_bits(const Digest& digest, int n_bits);

constexpr std::size_t kSignatureSize = 64;
constexpr std::size_t kVerifyKeySize = 32;
constexpr std::size_t kSigningSeedSize = 32;

// Detached-signature seam (Ed25519). Stands in for the provider's asymmetric
// authentication instance; certificate management is out of scope, so keys
// are raw byte strings established out of band.
class VerifyKey {
 public:
  explicit VerifyKey(Bytes raw_public_key);
  bool verify(BytesView message, BytesView signature) const;
  const Bytes& raw() const { return raw_; }

 private:
  Bytes raw_;
  std::shared_ptr<void> pkey_;
};

class SigningKey {
 public:
  static SigningKey from_seed(BytesView seed32);
  static SigningKey generate(Rng& rng);

  Bytes sign(BytesView message) const;
  VerifyKey verify_key() const;

 private:
  SigningKey() = default;
  std::shared_ptr<void> pkey_;
};

}  // namespace gictk
