#include "gictk/tesla.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace gictk::tesla {

namespace {

Bytes with_index_prefix(std::uint64_t index, BytesView data) {
  Bytes buf(8 + data.size());
  for (int i = 0; i < 8; ++i) {
    buf[i] = static_cast<std::uint8_t>((index >> (8 * (7 - i))) & 0xff);
  }
  std::memcpy(buf.data() + 8, data.data(), data.size());
  return buf;
}

}  // namespace

Bytes chain_link(BytesView next_key, std::uint64_t derived_index, int n_k_bits,
                 const CryptoSuite& crypto) {
  return truncate_bits(crypto.hash(with_index_prefix(derived_index, next_key)),
                       n_k_bits);
}

KeyChain derive_chain(BytesView seed, std::size_t length, int n_k_bits,
                      const CryptoSuite& crypto) {
  if (length == 0) throw std::invalid_argument("key chain length must be >= 1");
  if (n_k_bits <= 0 || n_k_bits > 256 || n_k_bits % 8 != 0) {
    throw std::invalid_argument("n_k must be a multiple of 8 in (0,256]");
  }
  KeyChain chain;
  chain.n_k_bits = n_k_bits;
  chain.keys.resize(length);
  chain.keys[length - 1] = truncate_bits(crypto.hash(seed), n_k_bits);
  for (std::size_t i = length - 1; i > 0; --i) {
    chain.keys[i - 1] = chain_link(chain.keys[i], i - 1, n_k_bits, crypto);
  }
  return chain;
}

void sign_root(KeyChain& chain, const SigningKey& provider) {
  chain.root_signature = provider.sign(chain.root());
}

bool verify_root(const KeyChain& chain, const VerifyKey& provider) {
  return provider.verify(chain.root(), chain.root_signature);
}

bool verify_released_key(BytesView root, BytesView released_key,
                         std::size_t key_index, int n_k_bits,
                         const CryptoSuite& crypto) {
  Bytes current(released_key.begin(), released_key.end());
  if (current.size() != static_cast<std::size_t>(n_k_bits / 8)) return false;
  for (std::size_t i = key_index; i > 0; --i) {
    current = chain_link(current, i - 1, n_k_bits, crypto);
  }
  return current.size() == root.size() &&
         std::equal(current.begin(), current.end(), root.begin());
}

MhkTuple make_tuple(BytesView message, const KeyChain& chain,
                    std::size_t key_index, TimeNs t_m, TimeNs t_h, TimeNs t_k,
                    int n_h_bits, const CryptoSuite& crypto) {
  if (key_index >= chain.length()) throw std::invalid_argument("key index out of range");
  MhkTuple tuple;
  tuple.message.assign(message.begin(), message.end());
  tuple.commitment =
      truncate_bits(crypto.mac(chain.keys[key_index], message), n_h_bits);
  tuple.key_index = key_index;
  tuple.t_m = t_m;
  tuple.t_h = t_h;
  tuple.t_k = t_k;
  return tuple;
}

DurNs compute_theta(std::span<const MhkTuple> schedule) {
  if (schedule.empty()) throw std::invalid_argument("schedule is empty");
  DurNs theta = std::numeric_limits<DurNs>::max();
  for (const MhkTuple& t : schedule) {
    if (t.t_k <= std::max(t.t_m, t.t_h)) {
      throw std::invalid_argument("tuple key release does not follow its content");
    }
    theta = std::min(theta, std::min(t.t_k - t.t_h, t.t_k - t.t_m));
  }
  return theta;
}

TeslaInstance make_instance(std::string label, KeyChain chain,
                            std::vector<MhkTuple> schedule, int n_h_bits) {
  TeslaInstance inst;
  inst.theta_big = compute_theta(schedule);
  inst.schedule = std::move(schedule);
  inst.chain = std::move(chain);
  inst.label = std::move(label);
  inst.n_h_bits = n_h_bits;
  return inst;
}

const char* to_string(ReceiptVerdict v) {
  switch (v) {
    case ReceiptVerdict::ReceiptSafe: return "receipt_safe";
    case ReceiptVerdict::ReceiptUnsafe: return "receipt_unsafe";
    case ReceiptVerdict::IntegrityFail: return "integrity_fail";
    case ReceiptVerdict::AuthenticityFail: return "authenticity_fail";
    case ReceiptVerdict::Authentic: return "authentic";
  }
  return "?";
}

bool receipt_safety_check(TimeNs tau_m_prime, TimeNs tau_h_prime, TimeNs t_k,
                          DurNs b_l) {
  return std::max(tau_m_prime, tau_h_prime) < t_k - b_l;
}

bool receipt_safety_check(std::span<const TimeNs> receipt_times, TimeNs t_k,
                          DurNs b_l) {
  if (receipt_times.empty()) throw std::invalid_argument("no receipt times");
  const TimeNs latest = *std::max_element(receipt_times.begin(), receipt_times.end());
  return latest < t_k - b_l;
}

ReceiptVerdict authenticate(const MhkTuple& received, BytesView released_key,
                            const RootInfo& root, DurNs b_l,
                            const ReceiptTimes& times, int n_h_bits,
                            const CryptoSuite& crypto) {
  if (!receipt_safety_check(times.tau_m_prime, times.tau_h_prime, received.t_k, b_l)) {
    return ReceiptVerdict::ReceiptUnsafe;
  }
  const Bytes expected =
      truncate_bits(crypto.mac(released_key, received.message), n_h_bits);
  if (expected != received.commitment) {
    return ReceiptVerdict::IntegrityFail;
  }
  if (received.key_index >= root.chain_length ||
      !verify_released_key(root.root, released_key, received.key_index,
                           root.n_k_bits, crypto)) {
    return ReceiptVerdict::AuthenticityFail;
  }
  return ReceiptVerdict::Authentic;
}

int security_level(int n_h_bits, int n_k_bits) {
  if (n_h_bits <= 0 || n_k_bits <= 0) {
    throw std::invalid_argument("security levels must be positive");
  }
  return std::min(n_h_bits, n_k_bits);
}

}  // namespace gictk::tesla
