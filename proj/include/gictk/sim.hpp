#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gictk/adversary.hpp"
#include "gictk/drift.hpp"
#include "gictk/tesla.hpp"
#include "gictk/time.hpp"
#include "gictk/timesync.hpp"

namespace gictk::sim {

struct TraceEntry {
  TimeNs at = 0;
  std::uint64_t seq = 0;
  std::string label;
};

// Deterministic discrete-event queue: nondecreasing time order, ties broken
// by insertion sequence, scheduling into the past rejected.
class EventQueue {
 public:
  using Handler = std::function<void()>;

  void schedule(TimeNs at, std::string label, Handler fn);
  std::vector<TraceEntry> run();
  TimeNs now() const { return now_; }

 private:
  struct Pending {
    TimeNs at;
    std::uint64_t seq;
    std::string label;
    Handler fn;
  };
  std::vector<Pending> heap_;
  std::uint64_t next_seq_ = 0;
  TimeNs now_ = std::numeric_limits<TimeNs>::min();
};

std::string format_trace(const std::vector<TraceEntry>& trace);

enum class SweepKind { ReceiptSafety, ClockSafety, PostSync, Multicadence };
enum class Classification { Safe, ForgeryAccepted, ForgeryRejected, FalseAlarm, SyncRefused };

const char* to_string(SweepKind kind);
const char* to_string(Classification c);

struct ScenarioConfig {
  SweepKind kind = SweepKind::ReceiptSafety;
  DurNs theta_big = kNsPerSec;
  DurNs theta_blue = 0;  // multicadence sweeps only
  std::vector<DurNs> theta_grid;
  std::vector<DurNs> delta_grid;
  DurNs base_latency = 10'000'000;
  // Lag bound the receipt check subtracts from the key release time. Default
  // is the certification ceiling theta_big/2, the design decision line.
  std::optional<DurNs> receiver_bound;
  DriftBound drift = DriftBound::linear(0.0);
  DurNs certify_elapsed = 0;  // clock-safety variant with drift growth
  std::uint64_t seed = 1;
  bool record_trace = false;

  DurNs effective_receiver_bound() const {
    return receiver_bound.value_or(theta_big / 2);
  }
};

std::vector<DurNs> make_grid(DurNs lo, DurNs hi, DurNs step);

struct SweepOutcome {
  DurNs theta = 0;
  DurNs delta = 0;
  std::optional<timesync::AdjustPolicy> policy;
  Classification classification = Classification::Safe;
  std::optional<DurNs> post_sync_theta;
  std::optional<double> detection_margin_ns;

  bool operator==(const SweepOutcome&) const = default;
};

struct SweepResult {
  std::vector<SweepOutcome> outcomes;
  std::vector<TraceEntry> trace;  // populated when the config asks for it
};

enum class ExecMode { Serial, Parallel };

// Full sweep over the configured grid. Grid points are independent; the
// parallel driver splits them across OpenMP threads and merges in grid
// order, so both modes produce identical results.
SweepResult run_sweep(const ScenarioConfig& config, ExecMode mode = ExecMode::Parallel);

// Per-point kernels, exposed so tests can pin single scenarios.
SweepOutcome receipt_point(const ScenarioConfig& config,
                           const tesla::TeslaInstance& instance, DurNs theta,
                           DurNs delta, std::vector<TraceEntry>* trace);
SweepOutcome clock_point(const ScenarioConfig& config, const SigningKey& provider,
                         const VerifyKey& provider_pub, DurNs theta, DurNs delta_34,
                         std::uint64_t point_seed);
SweepOutcome post_sync_point(const ScenarioConfig& config, const SigningKey& provider,
                             const VerifyKey& provider_pub, DurNs theta,
                             DurNs delta_34, timesync::AdjustPolicy policy,
                             std::uint64_t point_seed);
SweepOutcome multicadence_point(const ScenarioConfig& config, DurNs theta,
                                DurNs delta);

// Serial closed-form classifiers, kept as the reference the simulated path
// is checked against.
Classification receipt_point_analytic(const ScenarioConfig& config, DurNs theta,
                                      DurNs delta);
Classification clock_point_analytic(const ScenarioConfig& config, DurNs theta,
                                    DurNs delta_34);
Classification post_sync_point_analytic(const ScenarioConfig& config, DurNs theta,
                                        DurNs delta_34);

// The TESLA instance all receipt-safety grid points share.
tesla::TeslaInstance make_sweep_instance(const ScenarioConfig& config);

std::string to_csv(const std::vector<SweepOutcome>& outcomes);

// Largest gap between the first rejected delta in a theta column and the
// stated decision line delta + theta = theta_big - receiver_bound.
double boundary_agreement_ns(const ScenarioConfig& config,
                             const std::vector<SweepOutcome>& outcomes);

// Regression guard: a forgery accepted while the clock was inside the
// synchronization band means a check has been broken.
bool forgery_in_safe_region(const std::vector<SweepOutcome>& outcomes,
                            DurNs theta_big);

std::string summary_json(const ScenarioConfig& config,
                         const std::vector<SweepOutcome>& outcomes);

}  // namespace gictk::sim
