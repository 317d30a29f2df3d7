#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gictk/rng.hpp"
#include "gictk/tesla.hpp"
#include "gictk/time.hpp"

namespace gictk::adversary {

// A non-negative hold time, or a drop (the response-blocking move). Negative
// delays are not physically achievable and are rejected at construction.
class Delay {
 public:
  static Delay of(DurNs ns) {
    if (ns < 0) throw std::invalid_argument("adversary delay must be >= 0");
    Delay d;
    d.ns_ = ns;
    return d;
  }
  static Delay drop() {
    Delay d;
    d.dropped_ = true;
    return d;
  }

  bool dropped() const { return dropped_; }
  DurNs ns() const { return ns_; }

 private:
  DurNs ns_ = 0;
  bool dropped_ = false;
};

// Per-leg delays; the broadcast delay may be overridden per event index.
struct DelayPolicy {
  Delay broadcast = Delay::of(0);
  Delay request_leg = Delay::of(0);
  Delay response_leg = Delay::of(0);
  std::map<std::uint64_t, Delay> broadcast_by_index;

  const Delay& broadcast_delay(std::uint64_t event_index) const {
    auto it = broadcast_by_index.find(event_index);
    return it == broadcast_by_index.end() ? broadcast : it->second;
  }
};

// Every simulated leg passes through the adversary: delivery happens at
// send + base latency + held delay, content untouched. nullopt == dropped.
std::optional<TimeNs> delay_channel(const Delay& delay, TimeNs send_time,
                                    DurNs base_latency);

// Forge a tuple from a released key. Only allowed at or after the key's
// release in the (GNSS-synchronized) adversary frame; the simulator enforces
// the no-primitive-breaking limit here. The forged commitment verifies
// against integrity and authenticity; only receipt safety can reject it.
tesla::MhkTuple forge_after_release(const tesla::TeslaInstance& instance,
                                    std::size_t tuple_index,
                                    BytesView released_key, BytesView forged_message,
                                    TimeNs now_adversary_frame,
                                    const CryptoSuite& crypto = default_crypto());

struct TransitModel {
  DurNs epsilon_bound = 100'000'000;  // request transit below this w.p. confidence
  double confidence = 0.99;
};

struct TauPosterior {
  TimeNs lo = 0;  // uniform support over the unseen send time
  TimeNs hi = 0;
};

// One overheard synchronization request. Legacy traffic carries the send
// time in the clear; hardened traffic leaves only a scheduling model.
struct EavesdropObservation {
  TimeNs t2a = 0;
  std::optional<TimeNs> tau1_exact;
  std::optional<TauPosterior> tau1_posterior;
};

struct Vulnerability {
  double probability = 0.0;
};

// Decide whether the observed receiver lags beyond theta_big/2. Legacy mode
// applies the transit-bound test to the disclosed send time; hardened mode
// integrates the uniform posterior and reports the vulnerable mass.
// nullopt == inconclusive (no mass in the vulnerable region).
std::optional<Vulnerability> infer_vulnerability(const EavesdropObservation& obs,
                                                 const TransitModel& model,
                                                 DurNs theta_big);

struct PoissonFit {
  double mean_interarrival_s = 0.0;  // MLE of the mean gap between events
  double rate_per_s = 0.0;
  double expected_wait_s = 0.0;  // expected wait to the next event
  std::size_t events = 0;
};

// Maximum-likelihood fit of exponential inter-arrivals from an ordered event
// stream: observed span divided by the number of gaps. Needs >= 2 events.
PoissonFit poisson_mle(std::span<const TimeNs> event_times);

// Synthetic synchronization-traffic generator standing in for live NTP
// captures: a mixture of send-time behaviors plus a planted population of
// lagging clocks arriving as a Poisson stream.
struct TrafficConfig {
  double weight_faithful = 0.60;
  double weight_null = 0.26;
  double weight_integer_second = 0.05;
  double weight_uniform_random = 0.09;

  double safe_theta_span_s = 0.3;        // faithful population offset range
  double uniform_random_span_s = 3.0e7;  // +- span of junk send times

  std::size_t planted_events = 0;
  double planted_mean_interarrival_s = 0.57;
  double planted_theta_lo_s = -4.5;  // strictly below the detectable band
  double planted_theta_hi_s = -3.3;

  double background_rate_per_s = 2.0;
  double epoch_s = 1.0e6;  // stream start, away from zero so null send times fall out
  std::uint64_t seed = 1;
};

struct TrafficRequest {
  TimeNs t2a = 0;         // adversary-frame arrival
  TimeNs tau1_field = 0;  // as transmitted
  DurNs true_theta = 0;
  bool planted = false;
};

std::vector<TrafficRequest> generate_traffic(const TrafficConfig& config);

struct TrafficStudy {
  std::size_t total = 0;
  std::size_t in_window = 0;
  std::size_t flagged = 0;
  std::size_t flagged_planted = 0;
  std::vector<double> offsets_s;       // -(t2a - tau1) for in-window requests
  std::vector<TimeNs> flagged_times;   // t2a of flagged requests
  std::optional<PoissonFit> fit;       // over flagged_times when >= 2
  double threshold_s = 0.0;            // flag when offset < threshold
};

// Applies the plausibility window and the legacy vulnerability test to a
// traffic stream; fits the Poisson waiting model on the flagged arrivals.
TrafficStudy run_traffic_study(std::span<const TrafficRequest> requests,
                               const TransitModel& model, DurNs theta_big,
                               double window_s = 20.0);

}  // namespace gictk::adversary
