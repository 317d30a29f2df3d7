#include <doctest.h>

#include "gictk/adversary.hpp"

using namespace gictk;
using namespace gictk::adversary;

TEST_CASE("delay channel adds latency plus the held delay") {
  CHECK(*delay_channel(Delay::of(0), 0, ns_from_seconds(0.01)) ==
        ns_from_seconds(0.01));
  // A full key-delay hold lands the content after the release.
  const TimeNs arrival =
      *delay_channel(Delay::of(kNsPerSec), 0, ns_from_seconds(0.01));
  CHECK(arrival >= kNsPerSec);
  CHECK_FALSE(delay_channel(Delay::drop(), 0, 0).has_value());
  CHECK_THROWS_AS(Delay::of(-1), std::invalid_argument);
}

TEST_CASE("per-index overrides select the broadcast delay") {
  DelayPolicy policy;
  policy.broadcast = Delay::of(5);
  policy.broadcast_by_index.emplace(3, Delay::of(9));
  CHECK(policy.broadcast_delay(0).ns() == 5);
  CHECK(policy.broadcast_delay(3).ns() == 9);
}

TEST_CASE("forgery is gated on the key release") {
  const tesla::KeyChain chain = tesla::derive_chain(bytes_of("gate"), 3);
  const TimeNs t_h = kNsPerSec;
  const TimeNs t_k = 2 * kNsPerSec;
  const tesla::MhkTuple tuple =
      tesla::make_tuple(bytes_of("m"), chain, 1, t_h, t_h, t_k, 32);
  const tesla::TeslaInstance inst = tesla::make_instance("x", chain, {tuple}, 32);

  CHECK_THROWS_AS(forge_after_release(inst, 0, chain.keys[1], bytes_of("f"), t_k - 1),
                  std::logic_error);

  const tesla::MhkTuple forged =
      forge_after_release(inst, 0, chain.keys[1], bytes_of("f"), t_k);
  // Integrity and authenticity pass; only receipt safety can reject it.
  const tesla::RootInfo root{chain.root(), chain.length(), chain.n_k_bits};
  const TimeNs early = t_h + 1;
  CHECK(tesla::authenticate(forged, chain.keys[1], root, 0, {early, early}, 32) ==
        tesla::ReceiptVerdict::Authentic);
}

TEST_CASE("vulnerability inference from disclosed send times") {
  const DurNs theta_big = ns_from_seconds(6.0);
  TransitModel model;  // 100 ms, 0.99

  SUBCASE("a -3.2 s observation clears the -3.1 s threshold") {
    EavesdropObservation obs;
    obs.t2a = ns_from_seconds(100.0);
    obs.tau1_exact = obs.t2a - ns_from_seconds(3.2);
    const auto v = infer_vulnerability(obs, model, theta_big);
    REQUIRE(v.has_value());
    CHECK(v->probability == doctest::Approx(0.99));
  }
  SUBCASE("a synchronized clock is inconclusive") {
    EavesdropObservation obs;
    obs.t2a = ns_from_seconds(100.0);
    obs.tau1_exact = obs.t2a;
    CHECK_FALSE(infer_vulnerability(obs, model, theta_big).has_value());
  }
  SUBCASE("hardened mode integrates the posterior") {
    EavesdropObservation obs;
    obs.t2a = ns_from_seconds(100.0);
    // Support entirely in the safe region: nothing to conclude.
    obs.tau1_posterior = TauPosterior{obs.t2a - ns_from_seconds(2.0), obs.t2a};
    CHECK_FALSE(infer_vulnerability(obs, model, theta_big).has_value());
    // Support straddling the cutoff: a quarter of it lies below
    // t2a - 0.1 - 3.0.
    const TimeNs cutoff = obs.t2a - ns_from_seconds(3.1);
    obs.tau1_posterior =
        TauPosterior{cutoff - ns_from_seconds(1.0), cutoff + ns_from_seconds(3.0)};
    const auto v = infer_vulnerability(obs, model, theta_big);
    REQUIRE(v.has_value());
    CHECK(v->probability == doctest::Approx(0.99 * 0.25));
  }
  SUBCASE("bad inputs are rejected") {
    EavesdropObservation obs;
    obs.t2a = 0;
    CHECK_THROWS_AS(infer_vulnerability(obs, model, theta_big), std::invalid_argument);
    obs.tau1_posterior = TauPosterior{5, 5};
    CHECK_THROWS_AS(infer_vulnerability(obs, model, theta_big), std::invalid_argument);
  }
}

TEST_CASE("poisson waiting-time fit") {
  SUBCASE("two events one second apart") {
    const std::vector<TimeNs> events{0, kNsPerSec};
    const PoissonFit fit = poisson_mle(events);
    CHECK(fit.mean_interarrival_s == doctest::Approx(1.0));
    CHECK(fit.expected_wait_s == doctest::Approx(1.0));
  }
  SUBCASE("regular unit stream") {
    std::vector<TimeNs> events;
    for (int i = 0; i < 100; ++i) events.push_back(i * kNsPerSec);
    CHECK(poisson_mle(events).mean_interarrival_s == doctest::Approx(1.0));
  }
  SUBCASE("recovers the generating mean") {
    Rng rng = make_rng(71);
    std::vector<TimeNs> events;
    TimeNs t = 0;
    for (int i = 0; i < 100'000; ++i) {
      t += ns_from_seconds(-0.57 * std::log(uniform01(rng)));
      events.push_back(t);
    }
    const PoissonFit fit = poisson_mle(events);
    CHECK(std::abs(fit.mean_interarrival_s - 0.57) < 0.01);
    CHECK(fit.rate_per_s == doctest::Approx(1.0 / fit.mean_interarrival_s));
  }
  SUBCASE("rejects degenerate streams") {
    const std::vector<TimeNs> one{5};
    CHECK_THROWS_AS(poisson_mle(one), std::invalid_argument);
    const std::vector<TimeNs> unsorted{5, 4};
    CHECK_THROWS_AS(poisson_mle(unsorted), std::invalid_argument);
  }
}

TEST_CASE("traffic study flags exactly the sub-threshold population") {
  TrafficConfig cfg;
  cfg.planted_events = 2000;
  cfg.seed = 81;
  const auto requests = generate_traffic(cfg);
  const TransitModel model;
  const DurNs theta_big = ns_from_seconds(6.0);
  const TrafficStudy study = run_traffic_study(requests, model, theta_big);

  CHECK(study.threshold_s == doctest::Approx(-3.1));
  CHECK(study.flagged == cfg.planted_events);
  CHECK(study.flagged_planted == cfg.planted_events);

  // Flagging must coincide with the raw threshold rule on in-window offsets.
  std::size_t manual = 0;
  for (double v : study.offsets_s) {
    if (v < study.threshold_s) ++manual;
  }
  CHECK(manual == study.flagged);

  REQUIRE(study.fit.has_value());
  CHECK(std::abs(study.fit->mean_interarrival_s - 0.57) < 0.05);
}

TEST_CASE("no false accusations on faithful traffic") {
  TrafficConfig cfg;
  cfg.planted_events = 500;
  cfg.weight_faithful = 1.0;
  cfg.weight_null = 0.0;
  cfg.weight_integer_second = 0.0;
  cfg.weight_uniform_random = 0.0;
  cfg.seed = 91;
  const auto requests = generate_traffic(cfg);
  const TransitModel model;
  const DurNs theta_big = ns_from_seconds(6.0);

  for (const TrafficRequest& req : requests) {
    EavesdropObservation obs;
    obs.t2a = req.t2a;
    obs.tau1_exact = req.tau1_field;
    if (infer_vulnerability(obs, model, theta_big)) {
      CHECK(req.true_theta < -theta_big / 2);
    }
  }
}

TEST_CASE("all-safe all-faithful traffic raises zero flags") {
  TrafficConfig cfg;
  cfg.planted_events = 0;
  cfg.weight_faithful = 1.0;
  cfg.weight_null = 0.0;
  cfg.weight_integer_second = 0.0;
  cfg.weight_uniform_random = 0.0;
  cfg.background_rate_per_s = 50.0;
  cfg.seed = 92;
  const auto requests = generate_traffic(cfg);
  CHECK(requests.size() > 1000);
  const TrafficStudy study =
      run_traffic_study(requests, TransitModel{}, ns_from_seconds(6.0));
  CHECK(study.flagged == 0);
}
