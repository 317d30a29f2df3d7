#include <doctest.h>

#include "gictk/udp.hpp"

using namespace gictk;
using namespace gictk::timesync;

namespace {

struct DemoKeys {
  SigningKey provider;
  SigningKey receiver;
};

DemoKeys demo_keys() {
  Rng rng = make_rng(201);
  SigningKey provider = SigningKey::generate(rng);
  SigningKey receiver = SigningKey::generate(rng);
  return {provider, receiver};
}

}  // namespace

TEST_CASE("loopback synchronization end to end") {
  const DemoKeys keys = demo_keys();
  udp::TimeServer server(keys.provider, keys.receiver.verify_key());

  const DurNs theta = ns_from_seconds(-0.25);
  udp::Transport transport(server.port(), theta, ns_from_seconds(2.0));

  SyncConfig cfg;
  cfg.theta_big = kNsPerSec;
  cfg.drift_bound = DriftBound::linear(1e-6);
  Rng rng = make_rng(202);
  const SyncResult result = run_synchronization(transport, cfg, keys.receiver,
                                                keys.provider.verify_key(), rng);
  REQUIRE(std::holds_alternative<SyncSuccess>(result));
  const auto& ok = std::get<SyncSuccess>(result);
  CHECK(ok.bounds.contains(theta));
  const DurNs post = theta - ok.delta_theta;
  CHECK(post > -ns_from_seconds(0.5));
  CHECK(post < ns_from_seconds(0.5));
  CHECK(ok.next_sync_time > ok.state.sync_time());
}

TEST_CASE("proxy hold on the request leg forces a refusal") {
  const DemoKeys keys = demo_keys();
  udp::TimeServer server(keys.provider, keys.receiver.verify_key());
  udp::DelayProxy::Config pc;
  pc.target_port = server.port();
  pc.request_hold = ns_from_seconds(0.25);
  udp::DelayProxy proxy(pc);

  udp::Transport transport(proxy.port(), 0, ns_from_seconds(2.0));
  SyncConfig cfg;
  cfg.theta_big = ns_from_seconds(0.2);  // round trip will exceed this
  Rng rng = make_rng(203);
  const SyncResult result = run_synchronization(transport, cfg, keys.receiver,
                                                keys.provider.verify_key(), rng);
  REQUIRE(std::holds_alternative<SyncFailure>(result));
  CHECK(std::get<SyncFailure>(result) == SyncFailure::Refused);
}

TEST_CASE("dropped responses surface as timeouts") {
  const DemoKeys keys = demo_keys();
  udp::TimeServer server(keys.provider, keys.receiver.verify_key());
  udp::DelayProxy::Config pc;
  pc.target_port = server.port();
  pc.mode = udp::DelayProxy::Mode::DropResponse;
  udp::DelayProxy proxy(pc);

  udp::Transport transport(proxy.port(), 0, ns_from_seconds(0.5));
  SyncConfig cfg;
  Rng rng = make_rng(204);
  const SyncResult result = run_synchronization(transport, cfg, keys.receiver,
                                                keys.provider.verify_key(), rng);
  REQUIRE(std::holds_alternative<SyncFailure>(result));
  CHECK(std::get<SyncFailure>(result) == SyncFailure::Timeout);
}

TEST_CASE("replayed responses fail the nonce echo") {
  const DemoKeys keys = demo_keys();
  udp::TimeServer server(keys.provider, keys.receiver.verify_key());
  udp::DelayProxy::Config pc;
  pc.target_port = server.port();
  pc.mode = udp::DelayProxy::Mode::ReplayResponse;
  udp::DelayProxy proxy(pc);

  udp::Transport transport(proxy.port(), 0, ns_from_seconds(2.0));
  SyncConfig cfg;
  Rng rng = make_rng(205);
  // First pass primes the proxy with a response; it answers the second
  // request with the first response, whose nonce is stale.
  const SyncResult first = run_synchronization(transport, cfg, keys.receiver,
                                               keys.provider.verify_key(), rng);
  REQUIRE(std::holds_alternative<SyncSuccess>(first));
  const SyncResult second = run_synchronization(transport, cfg, keys.receiver,
                                                keys.provider.verify_key(), rng);
  REQUIRE(std::holds_alternative<SyncFailure>(second));
  CHECK(std::get<SyncFailure>(second) == SyncFailure::ResponseInvalid);
}
