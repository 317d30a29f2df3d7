#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gictk/crypto.hpp"
#include "gictk/time.hpp"

namespace gictk::tesla {

// One-way key chain: keys[i] = H(index i || keys[i+1]) truncated to n_k bits.
// keys[0] is the final-derived root that the provider signs and publishes.
// The link hash is domain-separated by the derived key's index.
struct KeyChain {
  int n_k_bits = 128;
  std::vector<Bytes> keys;  // front() is the root commitment
  Bytes root_signature;     // detached provider signature over the root

  const Bytes& root() const { return keys.front(); }
  std::size_t length() const { return keys.size(); }
};

Bytes chain_link(BytesView next_key, std::uint64_t derived_index, int n_k_bits,
                 const CryptoSuite& crypto = default_crypto());

// Deterministic derivation from an opaque seed. Rejects length == 0.
KeyChain derive_chain(BytesView seed, std::size_t length, int n_k_bits = 128,
                      const CryptoSuite& crypto = default_crypto());

void sign_root(KeyChain& chain, const SigningKey& provider);
bool verify_root(const KeyChain& chain, const VerifyKey& provider);

// Walks the chain from (released_key, index) down to index 0 and compares
// with the verified root. At most `index` link applications.
bool verify_released_key(BytesView root, BytesView released_key,
                         std::size_t key_index, int n_k_bits,
                         const CryptoSuite& crypto = default_crypto());

// One message / commitment / delayed-key association with its broadcast
// schedule, all in the provider clock frame.
struct MhkTuple {
  Bytes message;
  Bytes commitment;  // n_h-bit MAC tag
  std::size_t key_index = 0;
  TimeNs t_m = 0;
  TimeNs t_h = 0;
  TimeNs t_k = 0;
};

MhkTuple make_tuple(BytesView message, const KeyChain& chain,
                    std::size_t key_index, TimeNs t_m, TimeNs t_h, TimeNs t_k,
                    int n_h_bits, const CryptoSuite& crypto = default_crypto());

// Minimum spread min(t_k - t_h, t_k - t_m) over the schedule. Rejects empty
// schedules and tuples whose key does not strictly follow its content.
DurNs compute_theta(std::span<const MhkTuple> schedule);

struct TeslaInstance {
  std::vector<MhkTuple> schedule;
  KeyChain chain;
  DurNs theta_big = 0;
  std::string label;
  int n_h_bits = 32;
};

TeslaInstance make_instance(std::string label, KeyChain chain,
                            std::vector<MhkTuple> schedule, int n_h_bits);

enum class ReceiptVerdict {
  ReceiptSafe,
  ReceiptUnsafe,
  IntegrityFail,
  AuthenticityFail,
  Authentic,
};

const char* to_string(ReceiptVerdict v);

// max(tau_m', tau_h') < t_k - B_l, the dispositive timing check. Pure
// predicate; B_l comes from the caller's certification state.
bool receipt_safety_check(TimeNs tau_m_prime, TimeNs tau_h_prime, TimeNs t_k,
                          DurNs b_l);

// Variant for schedules that attach several objects to one key: the latest
// receipt time of any associated object is the one that must clear t_k - B_l.
bool receipt_safety_check(std::span<const TimeNs> receipt_times, TimeNs t_k,
                          DurNs b_l);

struct ReceiptTimes {
  TimeNs tau_m_prime = 0;
  TimeNs tau_h_prime = 0;
};

struct RootInfo {
  Bytes root;
  std::size_t chain_length = 0;
  int n_k_bits = 128;
};

// Full receiver pipeline: receipt safety, then commitment integrity, then
// key-chain authenticity. Returns the first failing stage.
ReceiptVerdict authenticate(const MhkTuple& received, BytesView released_key,
                            const RootInfo& root, DurNs b_l,
                            const ReceiptTimes& times, int n_h_bits,
                            const CryptoSuite& crypto = default_crypto());

// min(n_h, n_k): one forgery try per rigidly scheduled message, so the tag
// and the key preimage are the only attack surfaces.
int security_level(int n_h_bits, int n_k_bits);

}  // namespace gictk::tesla
