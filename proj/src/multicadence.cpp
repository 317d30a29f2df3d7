#include "gictk/multicadence.hpp"

#include <stdexcept>

#include "gictk/adversary.hpp"

namespace gictk::multicadence {

namespace {

void validate(const CadencePair& pair) {
  if (pair.theta_red <= 0 || pair.theta_blue <= 0) {
    throw std::invalid_argument("cadence delays must be positive");
  }
}

}  // namespace

std::optional<ForgeryRegion> forgery_region(const CadencePair& pair) {
  validate(pair);
  if (pair.theta_red >= pair.theta_blue) return std::nullopt;

  const Ratio red(pair.theta_red);
  const Ratio blue(pair.theta_blue);
  const Ratio half_red = red / 2;
  const Ratio half_blue = blue / 2;

  // Pairwise intersections of theta = -theta_blue/2, delta = theta_red, and
  // delta + theta = theta_red/2.
  ForgeryRegion region;
  region.vertices[0] = {-half_red, red};
  region.vertices[1] = {-half_blue, red};
  region.vertices[2] = {-half_blue, half_red + half_blue};

  Ratio ctheta = 0;
  Ratio cdelta = 0;
  for (const RegionPoint& v : region.vertices) {
    ctheta = ctheta + v.theta_ns;
    cdelta = cdelta + v.delta_ns;
  }
  region.centroid = {ctheta / 3, cdelta / 3};
  return region;
}

bool satisfies_forgery_conditions(const CadencePair& pair, const Ratio& theta_ns,
                                  const Ratio& delta_ns) {
  validate(pair);
  const Ratio red(pair.theta_red);
  const Ratio blue(pair.theta_blue);
  return delta_ns + theta_ns < red / 2 && delta_ns >= red &&
         -(blue / 2) < theta_ns && theta_ns < -(red / 2);
}

bool in_closed_triangle(const CadencePair& pair, const Ratio& theta_ns,
                        const Ratio& delta_ns) {
  validate(pair);
  const Ratio red(pair.theta_red);
  const Ratio blue(pair.theta_blue);
  return delta_ns + theta_ns <= red / 2 && delta_ns >= red &&
         theta_ns >= -(blue / 2);
}

int classify_scenario(DurNs theta, const CadencePair& pair) {
  validate(pair);
  if (theta > -(pair.theta_red / 2)) return 1;
  if (theta > -(pair.theta_blue / 2)) return 2;
  return 3;
}

AttackOutcome simulate_scenario2_attack(const CadencePair& pair, DurNs theta,
                                        DurNs delta, ReceiverPolicy policy,
                                        DurNs latency) {
  validate(pair);
  if (delta < 0) throw std::invalid_argument("adversary delay must be >= 0");
  if (pair.theta_red >= pair.theta_blue) {
    throw std::invalid_argument("red cadence must be faster than blue");
  }

  const CryptoSuite& crypto = default_crypto();
  const int n_h = 32;
  tesla::KeyChain chain = tesla::derive_chain(bytes_of("multicadence-demo"), 2);

  // One message signed by both instances against the shared delayed key:
  // message and blue commitment lead the key by theta_blue, the red
  // commitment by theta_red.
  const TimeNs t_k = 10 * kNsPerSec + pair.theta_blue;
  const TimeNs t_m = t_k - pair.theta_blue;
  const Bytes message = bytes_of("nav-payload");
  const tesla::MhkTuple blue_tuple =
      tesla::make_tuple(message, chain, 1, t_m, t_k - pair.theta_blue, t_k, n_h, crypto);
  const tesla::MhkTuple red_tuple =
      tesla::make_tuple(message, chain, 1, t_m, t_k - pair.theta_red, t_k, n_h, crypto);
  const tesla::TeslaInstance red_inst =
      tesla::make_instance("red", chain, {red_tuple}, n_h);
  const tesla::TeslaInstance blue_inst =
      tesla::make_instance("blue", chain, {blue_tuple}, n_h);
  const Bytes& key = chain.keys[1];

  // The adversary forwards each object delta after broadcast and may only
  // substitute commitments it can compute, i.e. those forwarded at or after
  // the key release.
  const bool red_forgeable = red_tuple.t_h + delta >= t_k;
  const bool blue_forgeable = blue_tuple.t_h + delta >= t_k;
  const bool attack = red_forgeable;  // substituting content needs a payoff

  const Bytes forged_message = bytes_of("spoofed-payload");
  tesla::MhkTuple red_rx = red_tuple;
  tesla::MhkTuple blue_rx = blue_tuple;
  if (attack) {
    red_rx = adversary::forge_after_release(red_inst, 0, key, forged_message,
                                            red_tuple.t_h + delta, crypto);
    blue_rx.message = forged_message;
    if (blue_forgeable) {
      blue_rx = adversary::forge_after_release(blue_inst, 0, key, forged_message,
                                               blue_tuple.t_h + delta, crypto);
    }
  }

  const auto deliver = [&](TimeNs sent) { return sent + delta + latency; };
  const TimeNs tau_m = deliver(t_m) + theta;
  const TimeNs tau_h_red = deliver(red_tuple.t_h) + theta;
  const TimeNs tau_h_blue = deliver(blue_tuple.t_h) + theta;
  const TimeNs key_arrival = deliver(t_k);

  const tesla::RootInfo root{chain.root(), chain.length(), chain.n_k_bits};

  AttackOutcome out;
  out.red.verdict =
      tesla::authenticate(red_rx, key, root, pair.theta_red / 2,
                          {tau_m, tau_h_red}, n_h, crypto);
  out.red.content_forged = attack;
  out.red.decided_at = key_arrival;
  out.blue.verdict =
      tesla::authenticate(blue_rx, key, root, pair.theta_blue / 2,
                          {tau_m, tau_h_blue}, n_h, crypto);
  out.blue.content_forged = attack;
  out.blue.decided_at = key_arrival;

  const bool red_ok = out.red.verdict == tesla::ReceiptVerdict::Authentic;
  const bool blue_ok = out.blue.verdict == tesla::ReceiptVerdict::Authentic;
  out.accepted = policy == ReceiverPolicy::FastOnly ? red_ok : (red_ok && blue_ok);
  out.forgery_accepted = out.accepted && attack;
  out.detection_time = key_arrival;
  return out;
}

}  // namespace gictk::multicadence
