#include "gictk/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>

#include <cstring>

namespace gictk {
namespace {

struct PkeyDeleter {
  void operator()(void* p) const { EVP_PKEY_free(static_cast<EVP_PKEY*>(p)); }
};

struct MdCtx {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  ~MdCtx() { EVP_MD_CTX_free(ctx); }
};

class OpensslSuite final : public CryptoSuite {
 public:
  OpensslSuite() {
    hmac_ = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
    if (hmac_ == nullptr) throw std::runtime_error("HMAC unavailable");
  }
  ~OpensslSuite() override { EVP_MAC_free(hmac_); }

  Digest hash(BytesView data) const override {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                   nullptr) != 1 ||
        len != out.size()) {
      throw std::runtime_error("SHA-256 failed");
    }
    return out;
  }

  Digest mac(BytesView key, BytesView message) const override {
    Digest out{};
    EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(hmac_);
    if (ctx == nullptr) throw std::runtime_error("HMAC context allocation failed");
    char digest_name[] = "SHA256";
    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
        OSSL_PARAM_construct_end()};
    std::size_t len = 0;
    const bool ok = EVP_MAC_init(ctx, key.data(), key.size(), params) == 1 &&
                    EVP_MAC_update(ctx, message.data(), message.size()) == 1 &&
                    EVP_MAC_final(ctx, out.data(), &len, out.size()) == 1 &&
                    len == out.size();
    EVP_MAC_CTX_free(ctx);
    if (!ok) throw std::runtime_error("HMAC-SHA256 failed");
    return out;
  }

 private:
  EVP_MAC* hmac_;
};

}  // namespace

const CryptoSuite& default_crypto() {
  static const OpensslSuite suite;
  return suite;
}

Bytes truncate_bits(const Digest& digest, int n_bits) {
  if (n_bits <= 0 || n_bits > 256 || n_bits % 8 != 0) {
    throw std::invalid_argument("truncation width must be a multiple of 8 in (0,256]");
  }
  return Bytes(digest.begin(), digest.begin() + n_bits / 8);
}

VerifyKey::VerifyKey(Bytes raw_public_key) : raw_(std::move(raw_public_key)) {
  if (raw_.size() != kVerifyKeySize) {
    throw std::invalid_argument("verify key must be 32 bytes");
  }
  EVP_PKEY* k = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                            raw_.data(), raw_.size());
  if (k == nullptr) throw std::runtime_error("failed to load Ed25519 public key");
  pkey_ = std::shared_ptr<void>(k, PkeyDeleter{});
}

bool VerifyKey::verify(BytesView message, BytesView signature) const {
  if (signature.size() != kSignatureSize) return false;
  MdCtx md;
  if (EVP_DigestVerifyInit(md.ctx, nullptr, nullptr, nullptr,
                           static_cast<EVP_PKEY*>(pkey_.get())) != 1) {
    throw std::runtime_error("verify init failed");
  }
  return EVP_DigestVerify(md.ctx, signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

SigningKey SigningKey::from_seed(BytesView seed32) {
  if (seed32.size() != kSigningSeedSize) {
    throw std::invalid_argument("signing seed must be 32 bytes");
  }
  EVP_PKEY* k = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                             seed32.data(), seed32.size());
  if (k == nullptr) throw std::runtime_error("failed to load Ed25519 private key");
  SigningKey out;
  out.pkey_ = std::shared_ptr<void>(k, PkeyDeleter{});
  return out;
}

SigningKey SigningKey::generate(Rng& rng) {
  Bytes seed(kSigningSeedSize);
  for (std::size_t i = 0; i < seed.size(); i += 8) {
    const std::uint64_t word = rng();
    std::memcpy(seed.data() + i, &word, 8);
  }
  return from_seed(seed);
}

Bytes SigningKey::sign(BytesView message) const {
  MdCtx md;
  if (EVP_DigestSignInit(md.ctx, nullptr, nullptr, nullptr,
                         static_cast<EVP_PKEY*>(pkey_.get())) != 1) {
    throw std::runtime_error("sign init failed");
  }
  Bytes sig(kSignatureSize);
  std::size_t len = sig.size();
  if (EVP_DigestSign(md.ctx, sig.data(), &len, message.data(), message.size()) != 1 ||
      len != kSignatureSize) {
    throw std::runtime_error("Ed25519 signing failed");
  }
  return sig;
}

VerifyKey SigningKey::verify_key() const {
  Bytes raw(kVerifyKeySize);
  std::size_t len = raw.size();
  if (EVP_PKEY_get_raw_public_key(static_cast<EVP_PKEY*>(pkey_.get()), raw.data(),
                                  &len) != 1 ||
      len != kVerifyKeySize) {
    throw std::runtime_error("failed to export Ed25519 public key");
  }
  return VerifyKey(std::move(raw));
}

}  // namespace gictk
