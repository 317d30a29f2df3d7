#pragma once

#include <array>
#include <optional>

#include "gictk/ratio.hpp"
#include "gictk/tesla.hpp"
#include "gictk/time.hpp"

namespace gictk::multicadence {

// Two TESLA instances in one signal: red authenticates faster (smaller
// key-release delay) than blue.
struct CadencePair {
  DurNs theta_red = 0;
  DurNs theta_blue = 0;
};

struct RegionPoint {
  Ratio theta_ns;
  Ratio delta_ns;
};

// Triangle of (theta, delta) states where a receiver that is compliant for
// blue but applies only the red check accepts a red forgery.
struct ForgeryRegion {
  std::array<RegionPoint, 3> vertices;
  RegionPoint centroid;
};

// nullopt when theta_red >= theta_blue (no cadence gap to exploit).
std::optional<ForgeryRegion> forgery_region(const CadencePair& pair);

// The conjunction defining the exploitable states: delta + theta <
// theta_red/2, delta >= theta_red, -theta_blue/2 < theta < -theta_red/2.
// Evaluated exactly.
bool satisfies_forgery_conditions(const CadencePair& pair, const Ratio& theta_ns,
                                  const Ratio& delta_ns);

// Closed hull of the region, for sampling complements.
bool in_closed_triangle(const CadencePair& pair, const Ratio& theta_ns,
                        const Ratio& delta_ns);

// 1: clock good for both cadences. 2: good for blue only. 3: good for
// neither. Boundary offsets classify pessimistically (attacker-favorable).
int classify_scenario(DurNs theta, const CadencePair& pair);

enum class ReceiverPolicy { FastOnly, FastAndSlow };

struct InstanceOutcome {
  tesla::ReceiptVerdict verdict = tesla::ReceiptVerdict::ReceiptUnsafe;
  bool content_forged = false;
  TimeNs decided_at = 0;  // provider-frame arrival of the shared key
};

struct AttackOutcome {
  InstanceOutcome red;
  InstanceOutcome blue;
  bool accepted = false;         // final accept under the receiver policy
  bool forgery_accepted = false; // accepted with substituted content
  TimeNs detection_time = 0;     // blue decision time when the blue check trips
};

// End-to-end run of the cross-cadence attack: one message signed by both
// instances with a shared delayed key; the adversary delays the whole stream
// by delta and forges every commitment whose forward time falls at or after
// the key release. Latency defaults to the zero-latency worst case.
AttackOutcome simulate_scenario2_attack(const CadencePair& pair, DurNs theta,
                                        DurNs delta, ReceiverPolicy policy,
                                        DurNs latency = 0);

}  // namespace gictk::multicadence
