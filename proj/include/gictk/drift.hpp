#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "gictk/time.hpp"

namespace gictk {

// Bound on clock-offset growth since the last synchronization: the offset at
// elapsed time dt is guaranteed to stay strictly inside +/- eval(dt). The
// bound must be non-negative and non-decreasing; the linear form with a zero
// rate is admitted as the degenerate "no drift budget" case used when a check
// happens at the instant of synchronization.
class DriftBound {
 public:
  static DriftBound linear(double rate_s_per_s) {
    if (rate_s_per_s < 0) throw std::invalid_argument("drift rate must be >= 0");
    DriftBound b;
    b.kind_ = Kind::Linear;
    b.rate_ = rate_s_per_s;
    return b;
  }

  static DriftBound affine(double floor_s, double rate_s_per_s) {
    if (floor_s <= 0) throw std::invalid_argument("affine drift floor must be > 0");
    if (rate_s_per_s < 0) throw std::invalid_argument("drift rate must be >= 0");
    DriftBound b;
    b.kind_ = Kind::Affine;
    b.floor_ns_ = floor_s * static_cast<double>(kNsPerSec);
    b.rate_ = rate_s_per_s;
    return b;
  }

  // Arbitrary monotone bound, seconds -> seconds. Strict monotonicity is the
  // caller's contract; the inverse falls back to bisection.
  static DriftBound custom(std::function<double(double)> fn_seconds) {
    if (!fn_seconds) throw std::invalid_argument("custom drift bound is empty");
    DriftBound b;
    b.kind_ = Kind::Custom;
    b.fn_ = std::move(fn_seconds);
    return b;
  }

  enum class Kind { Linear, Affine, Custom };
  Kind kind() const { return kind_; }
  double rate() const { return rate_; }

  // Maximum offset growth (in ns) after dt ns of unsynchronized operation.
  double eval_ns(DurNs dt) const {
    if (dt < 0) throw std::invalid_argument("drift bound evaluated at negative dt");
    switch (kind_) {
      case Kind::Linear:
        return rate_ * static_cast<double>(dt);
      case Kind::Affine:
        return floor_ns_ + rate_ * static_cast<double>(dt);
      case Kind::Custom:
        return fn_(seconds(dt)) * static_cast<double>(kNsPerSec);
    }
    return 0.0;
  }

  double eval_s(double dt_s) const {
    if (dt_s < 0) throw std::invalid_argument("drift bound evaluated at negative dt");
    switch (kind_) {
      case Kind::Linear:
        return rate_ * dt_s;
      case Kind::Affine:
        return floor_ns_ / static_cast<double>(kNsPerSec) + rate_ * dt_s;
      case Kind::Custom:
        return fn_(dt_s);
    }
    return 0.0;
  }

  // Largest dt (ns) with eval(dt) < budget_ns, in closed form. Returns kNever
  // when the bound never reaches the budget, and 0 when the budget is already
  // exhausted at dt = 0.
  DurNs invert_closed_ns(double budget_ns) const {
    if (kind_ == Kind::Custom) {
      throw std::logic_error("closed-form inverse requires linear or affine bound");
    }
    const double base = (kind_ == Kind::Affine) ? floor_ns_ : 0.0;
    if (budget_ns <= base) return 0;
    if (rate_ <= 0.0) return kNever;
    const double dt = (budget_ns - base) / rate_;
    if (dt >= static_cast<double>(kNever)) return kNever;
    return static_cast<DurNs>(dt);
  }

  // Bisection inverse for any monotone bound. Finds the largest dt with
  // eval(dt) < budget_ns to within tol_ns.
  DurNs invert_bisect_ns(double budget_ns, DurNs tol_ns = 1000) const {
    if (eval_ns(0) >= budget_ns) return 0;
    DurNs lo = 0;
    DurNs hi = 1;
    // Expand until the budget is crossed or the horizon is absurdly far out
    // (~292 years), which we report as "never".
    while (eval_ns(hi) < budget_ns) {
      if (hi >= kNever / 2) return kNever;
      lo = hi;
      hi *= 2;
    }
    while (hi - lo > tol_ns) {
      const DurNs mid = lo + (hi - lo) / 2;
      if (eval_ns(mid) < budget_ns) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

 private:
  DriftBound() = default;

  Kind kind_ = Kind::Linear;
  double rate_ = 0.0;      // seconds per second (== ns per ns)
  double floor_ns_ = 0.0;  // affine offset
  std::function<double(double)> fn_;
};

}  // namespace gictk
