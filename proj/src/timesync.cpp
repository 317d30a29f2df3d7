#include "gictk/timesync.hpp"

#include <algorithm>
#include <stdexcept>

namespace gictk::timesync {

ThetaBounds theta_bounds(const SyncRecord& record) {
  return {-(record.t2 - record.tau1), record.tau4 - record.t3};
}

DurNs nts_midpoint(const SyncRecord& record) {
  const DurNs spread = (record.tau1 + record.tau4) - (record.t2 + record.t3);
  // Floor division keeps the estimate deterministic for odd spreads.
  return spread >= 0 ? spread / 2 : -((-spread + 1) / 2);
}

DurNs round_trip(const SyncRecord& record) {
  return (record.tau4 - record.t3) + (record.t2 - record.tau1);
}

Certification certify_clock_safety(const CertificationState& state, TimeNs t_now,
                                   DurNs theta_big) {
  if (t_now < state.sync_time()) {
    throw std::invalid_argument("certification time precedes synchronization");
  }
  const double budget = static_cast<double>(theta_big) / 2.0;
  const double growth = state.drift_bound().eval_ns(t_now - state.sync_time());
  const double lag = static_cast<double>(state.lag_slack()) + growth;
  const double lead = static_cast<double>(state.lead_slack()) + growth;

  Certification out;
  if (!(lag < budget)) {
    out.safe = false;
    out.reason = UnsafeReason::LagRisk;
    return out;
  }
  if (!(lead < budget)) {
    out.safe = false;
    out.reason = UnsafeReason::FalseAlarmRisk;
    return out;
  }
  out.safe = true;
  out.safe_until = next_safe_time(state, theta_big);
  return out;
}

TimeNs next_safe_time(const CertificationState& state, DurNs theta_big,
                      SolverRoute route, DurNs tol_ns) {
  const double budget = static_cast<double>(theta_big) / 2.0;
  const double slack =
      static_cast<double>(std::max(state.lag_slack(), state.lead_slack()));
  const double headroom = budget - slack;
  if (headroom <= 0) return state.sync_time();

  const DriftBound& b = state.drift_bound();
  DurNs dt = 0;
  if (route == SolverRoute::ClosedForm && b.kind() != DriftBound::Kind::Custom) {
    dt = b.invert_closed_ns(headroom);
  } else {
    dt = b.invert_bisect_ns(headroom, tol_ns);
  }
  if (dt == kNever || dt > kNever - state.sync_time()) return kNever;
  return state.sync_time() + dt;
}

const char* to_string(AdjustPolicy policy) {
  switch (policy) {
    case AdjustPolicy::Midpoint: return "midpoint";
    case AdjustPolicy::Lower: return "lower";
    case AdjustPolicy::Upper: return "upper";
  }
  return "?";
}

std::variant<Adjustment, SyncRefused> select_adjustment(const SyncRecord& record,
                                                        DurNs theta_big,
                                                        AdjustPolicy policy) {
  if (round_trip(record) >= theta_big) return SyncRefused{};
  const DurNs half = theta_big / 2;
  Adjustment adj;
  adj.interval_lower = (record.tau4 - record.t3) - half;
  adj.interval_upper = -(record.t2 - record.tau1) + half;
  const DurNs width = adj.interval_upper - adj.interval_lower;
  switch (policy) {
    case AdjustPolicy::Midpoint:
      adj.delta_theta = nts_midpoint(record);
      break;
    case AdjustPolicy::Lower:
      adj.delta_theta = adj.interval_lower + std::min<DurNs>(1, width - 1);
      break;
    case AdjustPolicy::Upper:
      adj.delta_theta = adj.interval_upper - std::min<DurNs>(1, width - 1);
      break;
  }
  return adj;
}

ExchangeOutcome perform_exchange(SyncTransport& transport,
                                 const SigningKey& receiver_key,
                                 const VerifyKey& provider_key, Rng& rng) {
  const wire::Nonce nonce = wire::random_nonce(rng);
  const Bytes request = wire::encode(wire::make_sync_request(nonce, receiver_key));

  TimeNs tau1 = 0;
  TimeNs tau4 = 0;
  std::optional<Bytes> reply = transport.round_trip(request, tau1, tau4);
  if (!reply) return {};

  std::optional<wire::SyncResponse> response = wire::decode_sync_response(*reply);
  if (!response || response->nonce != nonce || !wire::verify(*response, provider_key) ||
      response->t3 < response->t2 || tau4 <= tau1) {
    ExchangeOutcome out;
    out.invalid = true;
    return out;
  }
  ExchangeOutcome out;
  out.record = SyncRecord{tau1, response->t2, response->t3, tau4};
  return out;
}

SyncResult run_synchronization(SyncTransport& transport, const SyncConfig& config,
                               const SigningKey& receiver_key,
                               const VerifyKey& provider_key, Rng& rng) {
  const ExchangeOutcome exchange =
      perform_exchange(transport, receiver_key, provider_key, rng);
  if (!exchange.record) {
    return exchange.invalid ? SyncFailure::ResponseInvalid : SyncFailure::Timeout;
  }

  const SyncRecord record = *exchange.record;
  auto selected = select_adjustment(record, config.theta_big, config.policy);
  if (std::holds_alternative<SyncRefused>(selected)) return SyncFailure::Refused;
  const Adjustment adj = std::get<Adjustment>(selected);

  SyncSuccess success{
      CertificationState(record, config.drift_bound, record.t3, adj.delta_theta),
      adj.delta_theta,
      kNever,
      theta_bounds(record),
  };
  success.next_sync_time =
      next_safe_time(success.state, config.theta_big, config.solver);
  return success;
}

TimeNs schedule_next_query(TimeNs next_required_t, double lambda_slack,
                           DurNs theta_big, Rng& rng) {
  if (lambda_slack < 1.0) {
    throw std::invalid_argument("lambda slack must be >= 1");
  }
  const double span = 2.0 * lambda_slack * static_cast<double>(theta_big);
  DurNs u = static_cast<DurNs>(std::llround(uniform_open(rng, 0.0, span)));
  u = std::clamp<DurNs>(u, 1, static_cast<DurNs>(span) - 1);
  return next_required_t - u;
}

}  // namespace gictk::timesync
