#include "gictk/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gictk::adversary {

std::optional<TimeNs> delay_channel(const Delay& delay, TimeNs send_time,
                                    DurNs base_latency) {
  if (base_latency < 0) throw std::invalid_argument("latency must be >= 0");
  if (delay.dropped()) return std::nullopt;
  return send_time + base_latency + delay.ns();
}

tesla::MhkTuple forge_after_release(const tesla::TeslaInstance& instance,
                                    std::size_t tuple_index,
                                    BytesView released_key, BytesView forged_message,
                                    TimeNs now_adversary_frame,
                                    const CryptoSuite& crypto) {
  if (tuple_index >= instance.schedule.size()) {
    throw std::invalid_argument("tuple index out of range");
  }
  const tesla::MhkTuple& authentic = instance.schedule[tuple_index];
  if (now_adversary_frame < authentic.t_k) {
    throw std::logic_error("forgery attempted before key release");
  }
  tesla::MhkTuple forged = authentic;
  forged.message.assign(forged_message.begin(), forged_message.end());
  forged.commitment = truncate_bits(crypto.mac(released_key, forged_message),
                                    instance.n_h_bits);
  return forged;
}

std::optional<Vulnerability> infer_vulnerability(const EavesdropObservation& obs,
                                                 const TransitModel& model,
                                                 DurNs theta_big) {
  if (model.confidence <= 0.0 || model.confidence >= 1.0) {
    throw std::invalid_argument("transit-model confidence must be in (0,1)");
  }
  const DurNs half = theta_big / 2;
  if (obs.tau1_exact) {
    // theta = -(t2a - tau1) + transit, transit < bound w.p. confidence.
    const DurNs evidence = -(obs.t2a - *obs.tau1_exact);
    if (evidence + model.epsilon_bound < -half) {
      return Vulnerability{model.confidence};
    }
    return std::nullopt;
  }
  if (obs.tau1_posterior) {
    const TauPosterior& post = *obs.tau1_posterior;
    if (post.hi <= post.lo) throw std::invalid_argument("empty tau1 posterior");
    // Vulnerable whenever tau1 < t2a - bound - theta_big/2; take the uniform
    // mass of that slice.
    const TimeNs cutoff = obs.t2a - model.epsilon_bound - half;
    if (cutoff <= post.lo) return std::nullopt;
    const double width = static_cast<double>(post.hi - post.lo);
    const double below = static_cast<double>(std::min(cutoff, post.hi) - post.lo);
    return Vulnerability{model.confidence * below / width};
  }
  throw std::invalid_argument("observation carries no tau1 information");
}

PoissonFit poisson_mle(std::span<const TimeNs> event_times) {
  if (event_times.size() < 2) {
    throw std::invalid_argument("Poisson fit needs at least two events");
  }
  if (!std::is_sorted(event_times.begin(), event_times.end())) {
    throw std::invalid_argument("event times must be ordered");
  }
  PoissonFit fit;
  fit.events = event_times.size();
  const double span = seconds(event_times.back() - event_times.front());
  if (span <= 0.0) throw std::invalid_argument("event span must be positive");
  fit.mean_interarrival_s = span / static_cast<double>(event_times.size() - 1);
  fit.rate_per_s = 1.0 / fit.mean_interarrival_s;
  fit.expected_wait_s = fit.mean_interarrival_s;
  return fit;
}

std::vector<TrafficRequest> generate_traffic(const TrafficConfig& config) {
  const double wsum = config.weight_faithful + config.weight_null +
                      config.weight_integer_second + config.weight_uniform_random;
  if (wsum <= 0.0) throw std::invalid_argument("population weights sum to zero");

  Rng rng = make_rng(config.seed);
  std::vector<TrafficRequest> out;

  // Planted lagging clocks: Poisson arrivals, faithful send times.
  TimeNs t = ns_from_seconds(config.epoch_s);
  double span_s = 0.0;
  for (std::size_t i = 0; i < config.planted_events; ++i) {
    const double gap = -config.planted_mean_interarrival_s * std::log(uniform01(rng));
    t += ns_from_seconds(gap);
    span_s += gap;
    TrafficRequest req;
    req.true_theta = ns_from_seconds(
        uniform_open(rng, config.planted_theta_lo_s, config.planted_theta_hi_s));
    const TimeNs t1 = t;
    req.tau1_field = t1 + req.true_theta;
    req.t2a = t1 + ns_from_seconds(uniform_open(rng, 0.0, 0.1));
    req.planted = true;
    out.push_back(req);
  }

  // Background mixture over the same interval.
  const double duration =
      config.planted_events > 0 ? span_s : 1000.0;
  const std::size_t n_background = static_cast<std::size_t>(
      config.background_rate_per_s * duration);
  const TimeNs t0 = ns_from_seconds(config.epoch_s);
  for (std::size_t i = 0; i < n_background; ++i) {
    TrafficRequest req;
    const TimeNs t1 = t0 + ns_from_seconds(uniform_open(rng, 0.0, duration));
    req.true_theta = ns_from_seconds(
        uniform_open(rng, -config.safe_theta_span_s, config.safe_theta_span_s));
    req.t2a = t1 + ns_from_seconds(uniform_open(rng, 0.0, 0.1));

    const double pick = uniform01(rng) * wsum;
    if (pick < config.weight_faithful) {
      req.tau1_field = t1 + req.true_theta;
    } else if (pick < config.weight_faithful + config.weight_null) {
      req.tau1_field = 0;
    } else if (pick <
               config.weight_faithful + config.weight_null + config.weight_integer_second) {
      const TimeNs tau1 = t1 + req.true_theta;
      req.tau1_field = (tau1 / kNsPerSec) * kNsPerSec;
    } else {
      req.tau1_field =
          t1 + ns_from_seconds(uniform_open(rng, -config.uniform_random_span_s,
                                            config.uniform_random_span_s));
    }
    out.push_back(req);
  }

  std::sort(out.begin(), out.end(),
            [](const TrafficRequest& a, const TrafficRequest& b) { return a.t2a < b.t2a; });
  return out;
}

TrafficStudy run_traffic_study(std::span<const TrafficRequest> requests,
                               const TransitModel& model, DurNs theta_big,
                               double window_s) {
  TrafficStudy study;
  study.total = requests.size();
  study.threshold_s =
      -(seconds(theta_big) / 2.0 + seconds(model.epsilon_bound));
  for (const TrafficRequest& req : requests) {
    const double offset = seconds(req.tau1_field - req.t2a);  // -(t2a - tau1)
    if (offset < -window_s || offset > window_s) continue;
    ++study.in_window;
    study.offsets_s.push_back(offset);
    EavesdropObservation obs;
    obs.t2a = req.t2a;
    obs.tau1_exact = req.tau1_field;
    if (infer_vulnerability(obs, model, theta_big)) {
      ++study.flagged;
      if (req.planted) ++study.flagged_planted;
      study.flagged_times.push_back(req.t2a);
    }
  }
  if (study.flagged_times.size() >= 2) {
    study.fit = poisson_mle(study.flagged_times);
  }
  return study;
}

}  // namespace gictk::adversary
