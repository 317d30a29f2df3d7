#include <omp.h>

#include <cstring>
#include <stdexcept>

#include "gictk/clock.hpp"
#include "gictk/multicadence.hpp"
#include "gictk/sim.hpp"
#include "gictk/transport.hpp"
#include "gictk/wire.hpp"

namespace gictk::sim {

namespace {

constexpr int kSweepTagBits = 32;

bool in_sync_band(DurNs theta, DurNs theta_big) {
  const DurNs half = theta_big / 2;
  return -half < theta && theta < half;
}

Classification classify_broadcast(bool forged, bool authentic) {
  if (forged) {
    return authentic ? Classification::ForgeryAccepted : Classification::ForgeryRejected;
  }
  return authentic ? Classification::Safe : Classification::FalseAlarm;
}

SigningKey sweep_provider_key(const ScenarioConfig& config) {
  Bytes seed(kSigningSeedSize);
  std::uint64_t word = config.seed;
  for (std::size_t i = 0; i < seed.size(); i += 8) {
    word = splitmix64(word);
    std::memcpy(seed.data() + i, &word, 8);
  }
  return SigningKey::from_seed(seed);
}

}  // namespace

std::vector<DurNs> make_grid(DurNs lo, DurNs hi, DurNs step) {
  if (step <= 0) throw std::invalid_argument("grid step must be positive");
  if (hi < lo) throw std::invalid_argument("grid range is empty");
  std::vector<DurNs> grid;
  for (DurNs v = lo; v <= hi; v += step) grid.push_back(v);
  return grid;
}

tesla::TeslaInstance make_sweep_instance(const ScenarioConfig& config) {
  tesla::KeyChain chain = tesla::derive_chain(bytes_of("sweep-chain"), 3);
  // Message and commitment share a broadcast slot; the commitment is the
  // latest object associated with the key, the conservative cadence.
  const TimeNs t_h = kNsPerSec;
  const tesla::MhkTuple tuple =
      tesla::make_tuple(bytes_of("nav-msg"), chain, 2, t_h, t_h,
                        t_h + config.theta_big, kSweepTagBits);
  return tesla::make_instance("sweep", std::move(chain), {tuple}, kSweepTagBits);
}

SweepOutcome receipt_point(const ScenarioConfig& config,
                           const tesla::TeslaInstance& instance, DurNs theta,
                           DurNs delta, std::vector<TraceEntry>* trace) {
  const tesla::MhkTuple& scheduled = instance.schedule.front();
  const Bytes& key = instance.chain.keys[scheduled.key_index];
  const DurNs eps = config.base_latency;
  const DurNs bound = config.effective_receiver_bound();
  const GicClock clock(theta);

  EventQueue q;
  Bytes content_frame;     // message+commitment records as forwarded
  Bytes key_frame;
  bool forged = false;
  TimeNs tau_m = 0;
  TimeNs tau_h = 0;
  tesla::ReceiptVerdict verdict = tesla::ReceiptVerdict::ReceiptUnsafe;

  const auto broadcast = [&](wire::Kind kind, BytesView payload) {
    wire::BroadcastRecord rec;
    rec.kind = kind;
    rec.label = instance.label;
    rec.tuple_index = 0;
    rec.key_index = static_cast<std::uint32_t>(scheduled.key_index);
    rec.scheduled_at = q.now();
    rec.payload.assign(payload.begin(), payload.end());
    return wire::encode(rec);
  };

  q.schedule(scheduled.t_h, "bcast_mh", [&] {
    q.schedule(q.now() + delta, "fwd_mh", [&] {
      // The adversary commits content at forward time; it can substitute a
      // forgery only once the key is out.
      tesla::MhkTuple carried = scheduled;
      if (q.now() >= scheduled.t_k) {
        forged = true;
        carried = adversary::forge_after_release(instance, 0, key,
                                                 bytes_of("spoofed"), q.now());
      }
      Bytes frame = broadcast(wire::Kind::BroadcastMessage, carried.message);
      Bytes commit = broadcast(wire::Kind::BroadcastCommitment, carried.commitment);
      frame.insert(frame.end(), commit.begin(), commit.end());
      content_frame = std::move(frame);
      q.schedule(q.now() + eps, "recv_mh", [&] {
        tau_m = clock.measure(q.now());
        tau_h = tau_m;
      });
    });
  });
  q.schedule(scheduled.t_k, "bcast_k", [&] {
    key_frame = broadcast(wire::Kind::BroadcastKey, key);
    q.schedule(q.now() + delta + eps, "recv_k", [&] {
      // Receiver reassembles the tuple from the framing and runs the full
      // pipeline against the published schedule.
      const std::size_t first_len = 4 + (static_cast<std::size_t>(content_frame[0]) |
                                         content_frame[1] << 8 | content_frame[2] << 16 |
                                         static_cast<std::size_t>(content_frame[3]) << 24);
      auto msg_rec = wire::decode_broadcast(
          BytesView(content_frame.data(), first_len));
      auto commit_rec = wire::decode_broadcast(
          BytesView(content_frame.data() + first_len, content_frame.size() - first_len));
      auto key_rec = wire::decode_broadcast(key_frame);
      if (!msg_rec || !commit_rec || !key_rec) {
        throw std::logic_error("broadcast framing round-trip failed");
      }
      tesla::MhkTuple received = scheduled;
      received.message = msg_rec->payload;
      received.commitment = commit_rec->payload;
      const tesla::RootInfo root{instance.chain.root(), instance.chain.length(),
                                 instance.chain.n_k_bits};
      verdict = tesla::authenticate(received, key_rec->payload, root, bound,
                                    {tau_m, tau_h}, instance.n_h_bits);
    });
  });

  std::vector<TraceEntry> local = q.run();
  if (trace != nullptr) {
    local.push_back(TraceEntry{q.now(), local.size(),
                               std::string("verdict=") + tesla::to_string(verdict)});
    trace->insert(trace->end(), local.begin(), local.end());
  }

  SweepOutcome out;
  out.theta = theta;
  out.delta = delta;
  out.classification =
      classify_broadcast(forged, verdict == tesla::ReceiptVerdict::Authentic);
  return out;
}

Classification receipt_point_analytic(const ScenarioConfig& config, DurNs theta,
                                      DurNs delta) {
  const bool forged = delta >= config.theta_big;
  // tau_h' - t_k = delta + eps + theta - theta_big; accept iff < -bound.
  const bool accepted = delta + config.base_latency + theta <
                        config.theta_big - config.effective_receiver_bound();
  return classify_broadcast(forged, accepted);
}

SweepOutcome clock_point(const ScenarioConfig& config, const SigningKey& provider,
                         const VerifyKey& provider_pub, DurNs theta, DurNs delta_34,
                         std::uint64_t point_seed) {
  transport::SimTransport::Config tc;
  tc.theta = theta;
  tc.latency = config.base_latency;
  tc.server_processing = config.base_latency;
  tc.response_delay = adversary::Delay::of(delta_34);
  transport::SimTransport channel(tc, provider);

  Rng rng = make_rng(config.seed, point_seed);
  const SigningKey receiver_key = SigningKey::generate(rng);
  const auto exchange =
      timesync::perform_exchange(channel, receiver_key, provider_pub, rng);
  if (!exchange.record) throw std::logic_error("clock-safety exchange failed");

  const timesync::SyncRecord record = *exchange.record;
  const timesync::CertificationState state(record, config.drift, record.t3);
  const TimeNs t_now = channel.last_exchange()->t4 + config.certify_elapsed;
  const timesync::Certification cert =
      timesync::certify_clock_safety(state, t_now, config.theta_big);

  const double budget = static_cast<double>(config.theta_big) / 2.0;
  const double growth = config.drift.eval_ns(t_now - state.sync_time());
  const double margin =
      std::min(budget - (static_cast<double>(state.lag_slack()) + growth),
               budget - (static_cast<double>(state.lead_slack()) + growth));

  SweepOutcome out;
  out.theta = theta;
  out.delta = delta_34;
  out.detection_margin_ns = margin;
  const bool compliant = in_sync_band(theta, config.theta_big);
  if (cert.safe) {
    out.classification = compliant ? Classification::Safe : Classification::ForgeryAccepted;
  } else {
    out.classification = compliant ? Classification::FalseAlarm : Classification::ForgeryRejected;
  }
  return out;
}

Classification clock_point_analytic(const ScenarioConfig& config, DurNs theta,
                                    DurNs delta_34) {
  const double eps = static_cast<double>(config.base_latency);
  const double budget = static_cast<double>(config.theta_big) / 2.0;
  const double growth = config.drift.eval_ns(config.certify_elapsed);
  const double lag = eps - static_cast<double>(theta) + growth;
  const double lead = eps + static_cast<double>(delta_34 + theta) + growth;
  const bool safe = lag < budget && lead < budget;
  const bool compliant = in_sync_band(theta, config.theta_big);
  if (safe) return compliant ? Classification::Safe : Classification::ForgeryAccepted;
  return compliant ? Classification::FalseAlarm : Classification::ForgeryRejected;
}

SweepOutcome post_sync_point(const ScenarioConfig& config, const SigningKey& provider,
                             const VerifyKey& provider_pub, DurNs theta,
                             DurNs delta_34, timesync::AdjustPolicy policy,
                             std::uint64_t point_seed) {
  transport::SimTransport::Config tc;
  tc.theta = theta;
  tc.latency = config.base_latency;
  tc.server_processing = config.base_latency;
  tc.response_delay = adversary::Delay::of(delta_34);
  transport::SimTransport channel(tc, provider);

  Rng rng = make_rng(config.seed, point_seed);
  const SigningKey receiver_key = SigningKey::generate(rng);
  timesync::SyncConfig sc;
  sc.theta_big = config.theta_big;
  sc.drift_bound = config.drift;
  sc.policy = policy;
  const timesync::SyncResult result = timesync::run_synchronization(
      channel, sc, receiver_key, provider_pub, rng);

  SweepOutcome out;
  out.theta = theta;
  out.delta = delta_34;
  out.policy = policy;
  if (std::holds_alternative<timesync::SyncFailure>(result)) {
    if (std::get<timesync::SyncFailure>(result) != timesync::SyncFailure::Refused) {
      throw std::logic_error("post-sync exchange failed");
    }
    out.classification = Classification::SyncRefused;
    out.post_sync_theta = theta;  // clock untouched
    return out;
  }
  const auto& success = std::get<timesync::SyncSuccess>(result);
  const DurNs post = theta - success.delta_theta;
  out.post_sync_theta = post;
  out.classification = in_sync_band(post, config.theta_big)
                           ? Classification::Safe
                           : Classification::ForgeryAccepted;
  return out;
}

Classification post_sync_point_analytic(const ScenarioConfig& config, DurNs /*theta*/,
                                        DurNs delta_34) {
  const DurNs rt = 2 * config.base_latency + delta_34;
  if (rt >= config.theta_big) return Classification::SyncRefused;
  // Any in-interval adjustment lands the offset inside the band.
  return Classification::Safe;
}

SweepOutcome multicadence_point(const ScenarioConfig& config, DurNs theta,
                                DurNs delta) {
  const multicadence::CadencePair pair{config.theta_big, config.theta_blue};
  const multicadence::AttackOutcome attack = multicadence::simulate_scenario2_attack(
      pair, theta, delta, multicadence::ReceiverPolicy::FastOnly, config.base_latency);
  SweepOutcome out;
  out.theta = theta;
  out.delta = delta;
  out.classification =
      classify_broadcast(attack.red.content_forged, attack.accepted);
  return out;
}

SweepResult run_sweep(const ScenarioConfig& config, ExecMode mode) {
  if (config.theta_grid.empty() || config.delta_grid.empty()) {
    throw std::invalid_argument("sweep grids must be non-empty");
  }
  if (config.base_latency < 0) throw std::invalid_argument("latency must be >= 0");
  if (config.kind == SweepKind::Multicadence &&
      config.theta_blue <= config.theta_big) {
    throw std::invalid_argument("multicadence sweep needs theta_blue > theta_big");
  }

  const tesla::TeslaInstance instance = config.kind == SweepKind::ReceiptSafety
                                            ? make_sweep_instance(config)
                                            : tesla::TeslaInstance{};
  const SigningKey provider = sweep_provider_key(config);
  const VerifyKey provider_pub = provider.verify_key();

  static constexpr timesync::AdjustPolicy kPolicies[] = {
      timesync::AdjustPolicy::Midpoint, timesync::AdjustPolicy::Lower,
      timesync::AdjustPolicy::Upper};
  const std::size_t n_pol = config.kind == SweepKind::PostSync ? 3 : 1;
  const std::size_t n_delta = config.delta_grid.size();
  const std::size_t total = config.theta_grid.size() * n_delta * n_pol;

  SweepResult result;
  result.outcomes.resize(total);
  std::vector<std::vector<TraceEntry>> traces(config.record_trace ? total : 0);

  const bool parallel = mode == ExecMode::Parallel;
  const long long n = static_cast<long long>(total);
#pragma omp parallel for schedule(static) if (parallel)
  for (long long i = 0; i < n; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    const std::size_t ti = idx / (n_delta * n_pol);
    const std::size_t di = (idx / n_pol) % n_delta;
    const std::size_t pi = idx % n_pol;
    const DurNs theta = config.theta_grid[ti];
    const DurNs delta = config.delta_grid[di];
    switch (config.kind) {
      case SweepKind::ReceiptSafety:
        result.outcomes[idx] = receipt_point(
            config, instance, theta, delta,
            config.record_trace ? &traces[idx] : nullptr);
        break;
      case SweepKind::ClockSafety:
        result.outcomes[idx] =
            clock_point(config, provider, provider_pub, theta, delta, idx);
        break;
      case SweepKind::PostSync:
        result.outcomes[idx] = post_sync_point(config, provider, provider_pub,
                                               theta, delta, kPolicies[pi], idx);
        break;
      case SweepKind::Multicadence:
        result.outcomes[idx] = multicadence_point(config, theta, delta);
        break;
    }
  }

  if (config.record_trace) {
    for (const auto& t : traces) {
      result.trace.insert(result.trace.end(), t.begin(), t.end());
    }
  }
  return result;
}

}  // namespace gictk::sim
