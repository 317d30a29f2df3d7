#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "gictk/sim.hpp"

namespace gictk::sim {

namespace {

std::string format_margin(double margin_ns) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", margin_ns / 1e9);
  return buf;
}

}  // namespace

const char* to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::ReceiptSafety: return "receipt_safety";
    case SweepKind::ClockSafety: return "clock_safety";
    case SweepKind::PostSync: return "post_sync";
    case SweepKind::Multicadence: return "multicadence";
  }
  return "?";
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Safe: return "safe";
    case Classification::ForgeryAccepted: return "forgery_accepted";
    case Classification::ForgeryRejected: return "forgery_rejected";
    case Classification::FalseAlarm: return "false_alarm";
    case Classification::SyncRefused: return "sync_refused";
  }
  return "?";
}

std::string to_csv(const std::vector<SweepOutcome>& outcomes) {
  std::string out = "theta,delta,policy,classification,post_sync_theta,detection_margin\n";
  for (const SweepOutcome& o : outcomes) {
    out += format_seconds(o.theta);
    out += ',';
    out += format_seconds(o.delta);
    out += ',';
    if (o.policy) out += timesync::to_string(*o.policy);
    out += ',';
    out += to_string(o.classification);
    out += ',';
    if (o.post_sync_theta) out += format_seconds(*o.post_sync_theta);
    out += ',';
    if (o.detection_margin_ns) out += format_margin(*o.detection_margin_ns);
    out += '\n';
  }
  return out;
}

double boundary_agreement_ns(const ScenarioConfig& config,
                             const std::vector<SweepOutcome>& outcomes) {
  if (config.kind != SweepKind::ReceiptSafety) return 0.0;
  const DurNs line_intercept = config.theta_big - config.effective_receiver_bound();
  const DurNs delta_min = config.delta_grid.front();
  const DurNs delta_max = config.delta_grid.back();

  std::map<DurNs, DurNs> first_rejected;  // theta -> smallest rejected delta
  for (const SweepOutcome& o : outcomes) {
    const bool rejected = o.classification == Classification::ForgeryRejected ||
                          o.classification == Classification::FalseAlarm;
    if (!rejected) continue;
    auto [it, inserted] = first_rejected.try_emplace(o.theta, o.delta);
    if (!inserted) it->second = std::min(it->second, o.delta);
  }

  double worst = 0.0;
  for (DurNs theta : config.theta_grid) {
    const DurNs line_delta = line_intercept - theta;
    if (line_delta <= delta_min || line_delta > delta_max) continue;
    const auto it = first_rejected.find(theta);
    if (it == first_rejected.end()) {
      // No rejection observed although the line crosses this column.
      worst = std::max(worst, static_cast<double>(delta_max + 1 - line_delta));
      continue;
    }
    worst = std::max(worst, std::abs(static_cast<double>(it->second - line_delta)));
  }
  return worst;
}

bool forgery_in_safe_region(const std::vector<SweepOutcome>& outcomes,
                            DurNs theta_big) {
  const DurNs half = theta_big / 2;
  return std::any_of(outcomes.begin(), outcomes.end(), [&](const SweepOutcome& o) {
    return o.classification == Classification::ForgeryAccepted && -half < o.theta &&
           o.theta < half;
  });
}

std::string summary_json(const ScenarioConfig& config,
                         const std::vector<SweepOutcome>& outcomes) {
  nlohmann::ordered_json counts;
  for (Classification c :
       {Classification::Safe, Classification::ForgeryAccepted,
        Classification::ForgeryRejected, Classification::FalseAlarm,
        Classification::SyncRefused}) {
    counts[to_string(c)] = 0;
  }
  for (const SweepOutcome& o : outcomes) {
    counts[to_string(o.classification)] = counts[to_string(o.classification)].get<int>() + 1;
  }

  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["kind"] = to_string(config.kind);
  doc["theta_big"] = format_seconds(config.theta_big);
  doc["points"] = outcomes.size();
  doc["counts"] = counts;
  if (config.kind == SweepKind::ReceiptSafety) {
    doc["boundary_agreement"] =
        format_margin(boundary_agreement_ns(config, outcomes));
  }
  doc["forgery_in_safe_region"] = forgery_in_safe_region(outcomes, config.theta_big);
  return doc.dump(2) + "\n";
}

}  // namespace gictk::sim
