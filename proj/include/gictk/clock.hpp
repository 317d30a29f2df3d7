#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gictk/drift.hpp"
#include "gictk/rng.hpp"
#include "gictk/time.hpp"

namespace gictk {

// The simulated GNSS-independent clock. The true offset is simulator ground
// truth: receiver-side protocol code never takes a GicClock, only the
// receiver-frame stamps produced by measure(). Values are immutable;
// operations return adjusted copies.
class GicClock {
 public:
  explicit GicClock(DurNs theta_ns, TimeNs last_sync_time = 0)
      : theta_(theta_ns), last_sync_(last_sync_time) {}

  DurNs theta() const { return theta_; }
  TimeNs last_sync_time() const { return last_sync_; }
  const std::vector<std::pair<TimeNs, DurNs>>& adjustment_log() const {
    return adjustments_;
  }

  // Receiver-frame reading of provider-frame instant t.
  TimeNs measure(TimeNs t) const { return t + theta_; }

  // New clock with delta_theta subtracted from all future output.
  GicClock apply_adjustment(DurNs delta_theta, TimeNs at = 0) const {
    GicClock next = *this;
    next.theta_ -= delta_theta;
    next.last_sync_ = at;
    next.adjustments_.emplace_back(at, delta_theta);
    return next;
  }

  struct DriftPolicy {
    enum class Kind { WorstCaseLagging, WorstCaseLeading, UniformRandom };
    Kind kind = Kind::UniformRandom;
    double epsilon_margin = 1e-6;  // fraction held back from the bound edge

    static DriftPolicy lagging(double margin = 1e-6) {
      return {Kind::WorstCaseLagging, margin};
    }
    static DriftPolicy leading(double margin = 1e-6) {
      return {Kind::WorstCaseLeading, margin};
    }
    static DriftPolicy uniform() { return {Kind::UniformRandom, 0.0}; }
  };

  // Advance dt and apply a drift increment strictly inside (-B(dt), B(dt)).
  GicClock drift_evolve(DurNs dt, const DriftPolicy& policy,
                        const DriftBound& bound, Rng& rng) const {
    if (dt <= 0) throw std::invalid_argument("drift_evolve requires dt > 0");
    const double b = bound.eval_ns(dt);
    double step = 0.0;
    switch (policy.kind) {
      case DriftPolicy::Kind::WorstCaseLagging:
        step = -b * (1.0 - policy.epsilon_margin);
        break;
      case DriftPolicy::Kind::WorstCaseLeading:
        step = b * (1.0 - policy.epsilon_margin);
        break;
      case DriftPolicy::Kind::UniformRandom:
        step = b * (2.0 * uniform01(rng) - 1.0);
        break;
    }
    DurNs step_ns = static_cast<DurNs>(std::llround(step));
    // Containment is strict; keep the rounded step inside the open bound.
    const DurNs b_edge = static_cast<DurNs>(std::ceil(b));
    if (b_edge > 0) {
      if (step_ns >= b_edge) step_ns = b_edge - 1;
      if (step_ns <= -b_edge) step_ns = -(b_edge - 1);
    } else {
      step_ns = 0;
    }
    GicClock next = *this;
    next.theta_ += step_ns;
    return next;
  }

 private:
  DurNs theta_;
  TimeNs last_sync_;
  std::vector<std::pair<TimeNs, DurNs>> adjustments_;
};

}  // namespace gictk
