#include <doctest.h>

#include "gictk/clock.hpp"
#include "gictk/drift.hpp"
#include "gictk/ratio.hpp"
#include "gictk/sim.hpp"
#include "gictk/time.hpp"

using namespace gictk;

TEST_CASE("nanosecond formatting is exact") {
  CHECK(format_seconds(0) == "0.000000000");
  CHECK(format_seconds(-750'000'000) == "-0.750000000");
  CHECK(format_seconds(1'000'000'001) == "1.000000001");
  CHECK(format_seconds(ns_from_seconds(-0.45)) == "-0.450000000");
}

TEST_CASE("seconds round trip") {
  CHECK(ns_from_seconds(0.01) == 10'000'000);
  CHECK(seconds(ns_from_seconds(1.5)) == doctest::Approx(1.5));
  CHECK_THROWS_AS(ns_from_seconds(1e12), std::out_of_range);
}

TEST_CASE("ratio arithmetic is exact and normalized") {
  const Ratio a(2, 4);
  CHECK(a.num() == 1);
  CHECK(a.den() == 2);
  CHECK(a + Ratio(1, 2) == Ratio(1));
  CHECK(Ratio(-7, 3) * 3 == Ratio(-7));
  CHECK(Ratio(1, 3) < Ratio(1, 2));
  CHECK(Ratio(5, -10) == Ratio(-1, 2));
  CHECK(Ratio(-7'000'000'000, 3).str() == "-7000000000/3");
  CHECK_THROWS_AS(Ratio(1, 0), std::invalid_argument);
}

TEST_CASE("clock measurement follows the offset exactly") {
  CHECK(GicClock(0).measure(ns_from_seconds(100)) == ns_from_seconds(100));
  CHECK(GicClock(ns_from_seconds(-0.75)).measure(ns_from_seconds(10)) ==
        ns_from_seconds(9.25));
  CHECK(GicClock(ns_from_seconds(0.3)).measure(0) == ns_from_seconds(0.3));
}

TEST_CASE("measurement is affine in provider time") {
  const GicClock clock(123'456'789);
  const TimeNs t1 = 5'000'000'000;
  const TimeNs t2 = 7'250'000'013;
  CHECK(clock.measure(t2) - clock.measure(t1) == t2 - t1);
}

TEST_CASE("adjustments subtract and are logged") {
  const GicClock start(ns_from_seconds(-0.4));
  const GicClock fixed = start.apply_adjustment(ns_from_seconds(-0.4));
  CHECK(fixed.theta() == 0);
  CHECK(fixed.adjustment_log().size() == 1);

  CHECK(GicClock(0).apply_adjustment(0).theta() == 0);
  CHECK(GicClock(ns_from_seconds(-0.9)).apply_adjustment(ns_from_seconds(-0.5)).theta() ==
        ns_from_seconds(-0.4));
}

TEST_CASE("adjustment then measure equals measure minus delta") {
  const GicClock clock(77'000'001);
  const DurNs delta = -13'000'007;
  const GicClock adjusted = clock.apply_adjustment(delta);
  for (TimeNs t : {TimeNs{0}, TimeNs{1'000'000'000}, TimeNs{123'456'789'000}}) {
    CHECK(adjusted.measure(t) == clock.measure(t) - delta);
  }
}

TEST_CASE("drift evolution stays strictly inside the bound") {
  Rng rng = make_rng(42);
  const DriftBound bound = DriftBound::linear(0.1);  // B(1s) = 0.1s
  const DurNs dt = kNsPerSec;
  const DurNs edge = ns_from_seconds(0.1);

  SUBCASE("worst-case lagging with zero margin stays off the boundary") {
    const GicClock clock(0);
    const GicClock next =
        clock.drift_evolve(dt, GicClock::DriftPolicy::lagging(0.0), bound, rng);
    CHECK(next.theta() > -edge);
    CHECK(next.theta() < 0);
  }
  SUBCASE("uniform draw is contained") {
    const GicClock clock(ns_from_seconds(0.05));
    const DriftBound small = DriftBound::linear(0.02);
    for (int i = 0; i < 200; ++i) {
      const GicClock next =
          clock.drift_evolve(dt, GicClock::DriftPolicy::uniform(), small, rng);
      CHECK(next.theta() > ns_from_seconds(0.03));
      CHECK(next.theta() < ns_from_seconds(0.07));
    }
  }
  SUBCASE("worst-case leading pushes forward inside the bound") {
    const GicClock clock(0);
    const GicClock next =
        clock.drift_evolve(dt, GicClock::DriftPolicy::leading(0.0), bound, rng);
    CHECK(next.theta() > 0);
    CHECK(next.theta() < edge);
  }
  SUBCASE("vanishing step leaves theta unchanged") {
    const GicClock clock(123);
    const GicClock next =
        clock.drift_evolve(1, GicClock::DriftPolicy::leading(), bound, rng);
    CHECK(next.theta() == 123);  // B(1ns) < 1ns, nothing representable
  }
  SUBCASE("rejects non-positive dt") {
    const GicClock clock(0);
    CHECK_THROWS_AS(
        clock.drift_evolve(0, GicClock::DriftPolicy::uniform(), bound, rng),
        std::invalid_argument);
  }
}

TEST_CASE("accumulated drift respects a linear bound by summation") {
  Rng rng = make_rng(7);
  const DriftBound bound = DriftBound::linear(1e-3);
  GicClock clock(0);
  const DurNs step = 250'000'000;
  const int steps = 40;
  for (int i = 0; i < steps; ++i) {
    clock = clock.drift_evolve(step, GicClock::DriftPolicy::uniform(), bound, rng);
  }
  CHECK(std::abs(clock.theta()) <
        static_cast<DurNs>(bound.eval_ns(steps * step)));
}

TEST_CASE("drift bound forms") {
  const DriftBound linear = DriftBound::linear(1e-6);
  CHECK(linear.eval_ns(kNsPerSec) == doctest::Approx(1e3));
  const DriftBound affine = DriftBound::affine(0.001, 1e-6);
  CHECK(affine.eval_ns(0) == doctest::Approx(1e6));
  CHECK(affine.eval_ns(kNsPerSec) == doctest::Approx(1e6 + 1e3));
  CHECK_THROWS_AS(DriftBound::linear(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(DriftBound::affine(0.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(linear.eval_ns(-1), std::invalid_argument);
}

TEST_CASE("drift bound inverses agree") {
  Rng rng = make_rng(3);
  for (int i = 0; i < 200; ++i) {
    const double rate = uniform_open(rng, 1e-9, 1e-4);
    const double floor_s = uniform_open(rng, 1e-6, 1e-2);
    const DriftBound b = (i % 2 == 0) ? DriftBound::linear(rate)
                                      : DriftBound::affine(floor_s, rate);
    const double budget = uniform_open(rng, 2e7, 5e8);
    const DurNs closed = b.invert_closed_ns(budget);
    const DurNs bisect = b.invert_bisect_ns(budget);
    if (closed == kNever) {
      CHECK(bisect == kNever);
    } else {
      CHECK(std::abs(closed - bisect) <= 1000);
    }
  }
  CHECK(DriftBound::linear(0.0).invert_closed_ns(1.0) == kNever);
  CHECK(DriftBound::affine(0.5, 1e-6).invert_closed_ns(1e8) == 0);
}

TEST_CASE("event queue processes in time order with insertion ties") {
  sim::EventQueue q;
  SUBCASE("empty queue yields empty trace") { CHECK(q.run().empty()); }

  SUBCASE("ties preserve insertion order") {
    std::vector<int> seen;
    q.schedule(10, "b", [&] { seen.push_back(2); });
    q.schedule(5, "a", [&] { seen.push_back(1); });
    q.schedule(10, "c", [&] { seen.push_back(3); });
    const auto trace = q.run();
    CHECK(seen == std::vector<int>{1, 2, 3});
    CHECK(trace[1].label == "b");
    CHECK(trace[2].label == "c");
  }

  SUBCASE("rejects events scheduled in the past") {
    q.schedule(10, "x", [&] {
      CHECK_THROWS_AS(q.schedule(9, "late", nullptr), std::invalid_argument);
      q.schedule(10, "same-time-ok", nullptr);
    });
    q.run();
  }
}
