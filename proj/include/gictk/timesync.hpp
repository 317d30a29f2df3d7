#pragma once

#include <cmath>
#include <optional>
#include <variant>

#include "gictk/crypto.hpp"
#include "gictk/drift.hpp"
#include "gictk/rng.hpp"
#include "gictk/time.hpp"
#include "gictk/wire.hpp"

namespace gictk::timesync {

// The four event times of one synchronization. tau1 is measured by the
// receiver at the moment of sending and is never serialized; t2/t3 arrive in
// the signed response; tau4 is measured at receipt.
struct SyncRecord {
  TimeNs tau1 = 0;
  TimeNs t2 = 0;
  TimeNs t3 = 0;
  TimeNs tau4 = 0;
};

struct ThetaBounds {
  DurNs lower = 0;  // -(t2 - tau1)
  DurNs upper = 0;  // tau4 - t3
  bool contains(DurNs theta) const { return lower < theta && theta < upper; }
};

// Provable open bounds on the true offset; delays only widen them.
ThetaBounds theta_bounds(const SyncRecord& record);

// Trapezoid-midpoint estimate, the midpoint of theta_bounds. Floor-rounded
// to whole nanoseconds.
DurNs nts_midpoint(const SyncRecord& record);

DurNs round_trip(const SyncRecord& record);

// Post-synchronization bound state: leg slacks (already corrected by any
// applied adjustment) plus the drift budget growing from the provider-frame
// anchor of synchronization l.
class CertificationState {
 public:
  CertificationState(SyncRecord record, DriftBound bound, TimeNs sync_time,
                     DurNs applied_delta_theta = 0)
      : record_(record),
        bound_(std::move(bound)),
        sync_time_(sync_time),
        delta_theta_(applied_delta_theta) {}

  const SyncRecord& record() const { return record_; }
  const DriftBound& drift_bound() const { return bound_; }
  TimeNs sync_time() const { return sync_time_; }
  DurNs applied_delta_theta() const { return delta_theta_; }

  DurNs lag_slack() const { return record_.t2 - record_.tau1 + delta_theta_; }
  DurNs lead_slack() const { return record_.tau4 - record_.t3 - delta_theta_; }

  // Time-varying bounds: -B_l(t) < theta(t) < B_u(t).
  double b_l_ns(TimeNs t) const {
    return static_cast<double>(lag_slack()) + bound_.eval_ns(t - sync_time_);
  }
  double b_u_ns(TimeNs t) const {
    return static_cast<double>(lead_slack()) + bound_.eval_ns(t - sync_time_);
  }

 private:
  SyncRecord record_;
  DriftBound bound_;
  TimeNs sync_time_;
  DurNs delta_theta_;
};

enum class UnsafeReason { LagRisk, FalseAlarmRisk };

struct Certification {
  bool safe = false;
  TimeNs safe_until = kNever;        // meaningful when safe
  UnsafeReason reason = UnsafeReason::LagRisk;  // meaningful when unsafe
};

// Both certification conditions at t_now: the lead slack plus drift budget
// must stay under theta_big/2 (false alerts), and so must the lag slack
// (security). Never adjusts the clock. When unsafe, the security reason wins
// ties.
Certification certify_clock_safety(const CertificationState& state, TimeNs t_now,
                                   DurNs theta_big);

enum class SolverRoute { ClosedForm, Bisection };

// Latest provider-frame time at which both certification conditions still
// hold, i.e. the unique boundary crossing of the binding condition.
TimeNs next_safe_time(const CertificationState& state, DurNs theta_big,
                      SolverRoute route = SolverRoute::ClosedForm,
                      DurNs tol_ns = 1000);

enum class AdjustPolicy { Midpoint, Lower, Upper };

const char* to_string(AdjustPolicy policy);

struct Adjustment {
  DurNs delta_theta = 0;
  DurNs interval_lower = 0;  // open safe interval for delta_theta
  DurNs interval_upper = 0;
};

struct SyncRefused {};

// Safe adjustment selection. Refuses when the round trip reaches theta_big
// (the safe interval is empty, boundary included). Lower/upper sit one
// nanosecond inside the interval ends; midpoint equals the trapezoid
// estimate.
std::variant<Adjustment, SyncRefused> select_adjustment(const SyncRecord& record,
                                                        DurNs theta_big,
                                                        AdjustPolicy policy);

// One blocking request/response over some duplex transport. Implementations
// stamp tau1/tau4 with the receiver clock and return the raw response frame,
// or nullopt when no response arrives.
class SyncTransport {
 public:
  virtual ~SyncTransport() = default;
  virtual std::optional<Bytes> round_trip(BytesView request_frame, TimeNs& tau1,
                                          TimeNs& tau4) = 0;
};

enum class TimeoutPosture { Shutdown, RandomizedRetry };

struct SyncConfig {
  DurNs theta_big = kNsPerSec;
  DriftBound drift_bound = DriftBound::linear(0.0);
  AdjustPolicy policy = AdjustPolicy::Midpoint;
  TimeoutPosture timeout_posture = TimeoutPosture::Shutdown;
  SolverRoute solver = SolverRoute::ClosedForm;
};

struct SyncSuccess {
  CertificationState state;
  DurNs delta_theta = 0;
  TimeNs next_sync_time = kNever;
  ThetaBounds bounds;
};

enum class SyncFailure { Refused, ResponseInvalid, Timeout };

using SyncResult = std::variant<SyncSuccess, SyncFailure>;

// The exchange alone (nonce draw, request, response validation), without the
// refusal check or any adjustment: what certification queries run.
// nullopt == timeout; ResponseInvalid surfaces as nullopt with `invalid` set.
struct ExchangeOutcome {
  std::optional<SyncRecord> record;
  bool invalid = false;
};

ExchangeOutcome perform_exchange(SyncTransport& transport,
                                 const SigningKey& receiver_key,
                                 const VerifyKey& provider_key, Rng& rng);

// Full hardened exchange: nonce draw, request without the send time,
// response validation, round-trip refusal check, adjustment selection, and
// the next-synchronization solve.
SyncResult run_synchronization(SyncTransport& transport, const SyncConfig& config,
                               const SigningKey& receiver_key,
                               const VerifyKey& provider_key, Rng& rng);

// Randomized query scheduling: aim the next request at next_required_t - u
// with u uniform on (0, 2 * lambda * theta_big), so an eavesdropper's
// conditional model of the send time stays flat.
TimeNs schedule_next_query(TimeNs next_required_t, double lambda_slack,
                           DurNs theta_big, Rng& rng);

}  // namespace gictk::timesync
