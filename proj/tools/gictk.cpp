#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>

#include "gictk/config.hpp"
#include "gictk/multicadence.hpp"
#include "gictk/sim.hpp"
#include "gictk/udp.hpp"

namespace {

using namespace gictk;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSafetyRegression = 2;

std::string resolve_config_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  const char* dir = std::getenv("GICTK_CONFIG_DIR");
  if (dir != nullptr && fs::path(path).is_relative()) {
    const fs::path joined = fs::path(dir) / path;
    if (fs::exists(joined)) return joined.string();
  }
  return path;
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

std::string outcomes_json(const std::vector<sim::SweepOutcome>& outcomes) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const sim::SweepOutcome& o : outcomes) {
    nlohmann::ordered_json row;
    row["theta"] = format_seconds(o.theta);
    row["delta"] = format_seconds(o.delta);
    row["policy"] = o.policy ? timesync::to_string(*o.policy) : "";
    row["classification"] = sim::to_string(o.classification);
    if (o.post_sync_theta) row["post_sync_theta"] = format_seconds(*o.post_sync_theta);
    if (o.detection_margin_ns) row["detection_margin"] = *o.detection_margin_ns / 1e9;
    rows.push_back(row);
  }
  return rows.dump(2) + "\n";
}

struct SweepOptions {
  std::string config_path;
  std::string output_path = "-";
  std::string summary_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  bool serial = false;
};

int cmd_sweep(const SweepOptions& opt) {
  sim::ScenarioConfig cfg;
  try {
    cfg = config::load_scenario(config::read_file(resolve_config_path(opt.config_path)));
    if (opt.seed) cfg.seed = *opt.seed;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  const sim::SweepResult result =
      sim::run_sweep(cfg, opt.serial ? sim::ExecMode::Serial : sim::ExecMode::Parallel);
  write_file(opt.output_path, opt.format == "json" ? outcomes_json(result.outcomes)
                                                   : sim::to_csv(result.outcomes));
  if (!opt.summary_path.empty()) {
    write_file(opt.summary_path, sim::summary_json(cfg, result.outcomes));
  }

  if (sim::forgery_in_safe_region(result.outcomes, cfg.theta_big)) {
    std::cerr << "SAFETY REGRESSION: forgery accepted inside the synchronization band\n";
    return kExitSafetyRegression;
  }
  return kExitOk;
}

struct SyncDemoOptions {
  double theta_s = -0.3;
  double theta_big_s = 1.0;
  double delta_12_s = 0.0;
  double delta_34_s = 0.0;
  bool drop_response = false;
  bool replay_response = false;
  double timeout_s = 1.0;
  std::string policy = "midpoint";
  std::string posture = "shutdown";
  double drift_rate = 1e-6;
  std::uint64_t seed = 0;
  bool reveal_ground_truth = false;
};

int cmd_sync_demo(const SyncDemoOptions& opt) {
  Rng rng = opt.seed != 0 ? make_rng(opt.seed) : make_rng(std::random_device{}());
  const SigningKey provider = SigningKey::generate(rng);
  const SigningKey receiver = SigningKey::generate(rng);
  const DurNs theta = ns_from_seconds(opt.theta_s);
  const DurNs theta_big = ns_from_seconds(opt.theta_big_s);

  udp::TimeServer server(provider, receiver.verify_key());
  std::optional<udp::DelayProxy> proxy;
  std::uint16_t port = server.port();
  if (opt.delta_12_s > 0 || opt.delta_34_s > 0 || opt.drop_response ||
      opt.replay_response) {
    udp::DelayProxy::Config pc;
    pc.target_port = server.port();
    pc.request_hold = ns_from_seconds(opt.delta_12_s);
    pc.response_hold = ns_from_seconds(opt.delta_34_s);
    pc.mode = opt.drop_response ? udp::DelayProxy::Mode::DropResponse
              : opt.replay_response ? udp::DelayProxy::Mode::ReplayResponse
                                    : udp::DelayProxy::Mode::Forward;
    proxy.emplace(pc);
    port = proxy->port();
  }

  // The hardened request carries only the nonce: frames built at two
  // different send instants are byte-identical.
  {
    Rng nonce_rng = make_rng(7);
    const wire::Nonce nonce = wire::random_nonce(nonce_rng);
    const Bytes frame_a = wire::encode(wire::make_sync_request(nonce, receiver));
    std::this_thread::sleep_for(std::chrono::milliseconds(3));
    const Bytes frame_b = wire::encode(wire::make_sync_request(nonce, receiver));
    std::cout << "request opacity: " << (frame_a == frame_b ? "ok" : "LEAK")
              << " (" << frame_a.size() << "-byte frame, no send-time field)\n";
  }

  timesync::SyncConfig cfg;
  cfg.theta_big = theta_big;
  cfg.drift_bound = DriftBound::linear(opt.drift_rate);
  if (opt.policy == "midpoint") {
    cfg.policy = timesync::AdjustPolicy::Midpoint;
  } else if (opt.policy == "lower") {
    cfg.policy = timesync::AdjustPolicy::Lower;
  } else if (opt.policy == "upper") {
    cfg.policy = timesync::AdjustPolicy::Upper;
  } else {
    std::cerr << "unknown policy: " << opt.policy << "\n";
    return kExitUsage;
  }
  cfg.timeout_posture = opt.posture == "randomized-retry"
                            ? timesync::TimeoutPosture::RandomizedRetry
                            : timesync::TimeoutPosture::Shutdown;

  udp::Transport transport(port, theta, ns_from_seconds(opt.timeout_s));
  const timesync::SyncResult result = timesync::run_synchronization(
      transport, cfg, receiver, provider.verify_key(), rng);

  if (std::holds_alternative<timesync::SyncSuccess>(result)) {
    const auto& ok = std::get<timesync::SyncSuccess>(result);
    std::cout << "sync accepted\n"
              << "  theta bounds: (" << format_seconds(ok.bounds.lower) << ", "
              << format_seconds(ok.bounds.upper) << ") s\n"
              << "  delta_theta:  " << format_seconds(ok.delta_theta) << " s\n";
    if (ok.next_sync_time == kNever) {
      std::cout << "  next sync:    unconstrained (drift bound never crosses)\n";
    } else {
      std::cout << "  next sync:    +"
                << format_seconds(ok.next_sync_time - ok.state.sync_time())
                << " s after this synchronization\n";
    }
    if (opt.reveal_ground_truth) {
      std::cout << "  [ground truth] theta was " << format_seconds(theta)
                << " s, post-sync " << format_seconds(theta - ok.delta_theta)
                << " s\n";
    }
    return kExitOk;
  }

  switch (std::get<timesync::SyncFailure>(result)) {
    case timesync::SyncFailure::Refused:
      std::cout << "SyncRefused: round trip reaches the key-release delay; "
                   "clock untouched, future messages cannot be authenticated\n";
      break;
    case timesync::SyncFailure::ResponseInvalid:
      std::cout << "ResponseInvalid: bad signature or nonce mismatch\n";
      break;
    case timesync::SyncFailure::Timeout:
      std::cout << "Timeout: no response; posture = "
                << (cfg.timeout_posture == timesync::TimeoutPosture::Shutdown
                        ? "shutdown"
                        : "randomized-retry")
                << "\n";
      if (cfg.timeout_posture == timesync::TimeoutPosture::RandomizedRetry) {
        const TimeNs target =
            timesync::schedule_next_query(udp::steady_now() + theta_big, 1.0,
                                          theta_big, rng);
        std::cout << "  next randomized query target: "
                  << format_seconds(target) << " (receiver frame)\n";
      }
      break;
  }
  return kExitOk;
}

struct MulticadenceOptions {
  double theta_red_s = 2.0;
  double theta_blue_s = 6.0;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::string output_path = "-";
};

int cmd_multicadence(const MulticadenceOptions& opt) {
  const multicadence::CadencePair pair{ns_from_seconds(opt.theta_red_s),
                                       ns_from_seconds(opt.theta_blue_s)};
  const auto region = multicadence::forgery_region(pair);
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["theta_red"] = format_seconds(pair.theta_red);
  doc["theta_blue"] = format_seconds(pair.theta_blue);
  if (!region) {
    doc["region"] = nullptr;
    doc["note"] = "no cadence gap: the forgery region is empty";
    write_file(opt.output_path, doc.dump(2) + "\n");
    return kExitOk;
  }

  nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
  for (const auto& v : region->vertices) {
    vertices.push_back({{"theta_ns", v.theta_ns.str()}, {"delta_ns", v.delta_ns.str()}});
  }
  doc["region"]["vertices"] = vertices;
  doc["region"]["centroid"] = {{"theta_ns", region->centroid.theta_ns.str()},
                               {"delta_ns", region->centroid.delta_ns.str()}};

  // Random interior points must all satisfy the forgery conditions.
  Rng rng = make_rng(opt.seed);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const std::int64_t a = 1 + static_cast<std::int64_t>(rng() % 997);
    const std::int64_t b = 1 + static_cast<std::int64_t>(rng() % 997);
    const std::int64_t c = 1 + static_cast<std::int64_t>(rng() % 997);
    const Ratio w(a + b + c);
    const Ratio theta = (region->vertices[0].theta_ns * a +
                         region->vertices[1].theta_ns * b +
                         region->vertices[2].theta_ns * c) / w;
    const Ratio delta = (region->vertices[0].delta_ns * a +
                         region->vertices[1].delta_ns * b +
                         region->vertices[2].delta_ns * c) / w;
    if (!multicadence::satisfies_forgery_conditions(pair, theta, delta)) ++violations;
  }
  doc["interior_samples"] = opt.samples;
  doc["interior_violations"] = violations;

  // Attack demonstration at the centroid under both receiver policies.
  const DurNs ctheta = static_cast<DurNs>(region->centroid.theta_ns.to_double());
  const DurNs cdelta = static_cast<DurNs>(region->centroid.delta_ns.to_double());
  const auto fast_only = multicadence::simulate_scenario2_attack(
      pair, ctheta, cdelta, multicadence::ReceiverPolicy::FastOnly);
  const auto fast_slow = multicadence::simulate_scenario2_attack(
      pair, ctheta, cdelta, multicadence::ReceiverPolicy::FastAndSlow);
  doc["centroid_attack"]["scenario"] =
      multicadence::classify_scenario(ctheta, pair);
  doc["centroid_attack"]["fast_only"] = {
      {"red_verdict", tesla::to_string(fast_only.red.verdict)},
      {"blue_verdict", tesla::to_string(fast_only.blue.verdict)},
      {"forgery_accepted", fast_only.forgery_accepted}};
  doc["centroid_attack"]["fast_and_slow"] = {
      {"red_verdict", tesla::to_string(fast_slow.red.verdict)},
      {"blue_verdict", tesla::to_string(fast_slow.blue.verdict)},
      {"forgery_accepted", fast_slow.forgery_accepted},
      {"detected_at", format_seconds(fast_slow.detection_time)}};

  write_file(opt.output_path, doc.dump(2) + "\n");
  return violations == 0 ? kExitOk : kExitSafetyRegression;
}

struct TrafficOptions {
  std::string config_path;
  std::string output_path = "-";
  std::optional<std::uint64_t> seed;
};

int cmd_traffic_study(const TrafficOptions& opt) {
  adversary::TrafficConfig cfg;
  try {
    cfg = config::load_traffic(config::read_file(resolve_config_path(opt.config_path)));
    if (opt.seed) cfg.seed = *opt.seed;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto requests = adversary::generate_traffic(cfg);
  const adversary::TransitModel model;  // 100 ms bound, 0.99 confidence
  const DurNs theta_big = ns_from_seconds(6.0);
  const auto study = adversary::run_traffic_study(requests, model, theta_big);

  // Histogram of -(t2 - tau1) over the plausibility window, 0.1 s bins.
  constexpr double kBin = 0.1;
  constexpr double kWindow = 20.0;
  std::vector<std::size_t> hist(static_cast<std::size_t>(2 * kWindow / kBin), 0);
  for (double v : study.offsets_s) {
    const auto bin = static_cast<std::size_t>((v + kWindow) / kBin);
    if (bin < hist.size()) ++hist[bin];
  }

  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["total_requests"] = study.total;
  doc["in_window"] = study.in_window;
  doc["flag_threshold"] = study.threshold_s;
  doc["flagged"] = study.flagged;
  doc["flagged_planted"] = study.flagged_planted;
  if (study.fit) {
    doc["poisson"]["mean_interarrival_s"] = study.fit->mean_interarrival_s;
    doc["poisson"]["rate_per_s"] = study.fit->rate_per_s;
    doc["poisson"]["expected_wait_s"] = study.fit->expected_wait_s;
    doc["poisson"]["events"] = study.fit->events;
  } else {
    doc["poisson"] = nullptr;
  }
  doc["histogram"]["bin_width_s"] = kBin;
  doc["histogram"]["lo_s"] = -kWindow;
  doc["histogram"]["counts"] = hist;
  write_file(opt.output_path, doc.dump(2) + "\n");
  return kExitOk;
}

struct ChainToolOptions {
  std::string action = "derive";
  std::string seed_hex = "00";
  std::size_t length = 8;
  int n_k = 128;
  bool show_keys = false;
  std::string root_hex;
  std::string key_hex;
  std::size_t index = 0;
};

int cmd_chain_tool(const ChainToolOptions& opt) {
  if (opt.action == "derive") {
    const tesla::KeyChain chain =
        tesla::derive_chain(from_hex(opt.seed_hex), opt.length, opt.n_k);
    std::cout << "root " << to_hex(chain.root()) << "\n";
    if (opt.show_keys) {
      for (std::size_t i = 0; i < chain.keys.size(); ++i) {
        std::cout << "key[" << i << "] " << to_hex(chain.keys[i]) << "\n";
      }
    }
    return kExitOk;
  }
  if (opt.action == "verify") {
    const bool ok = tesla::verify_released_key(from_hex(opt.root_hex),
                                               from_hex(opt.key_hex), opt.index, opt.n_k);
    std::cout << (ok ? "valid" : "invalid") << "\n";
    return kExitOk;
  }
  std::cerr << "unknown chain-tool action: " << opt.action << "\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receiver timing-safety toolkit for broadcast-only TESLA"};
  app.require_subcommand(1);

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a (theta, delta) scenario sweep");
  sweep_cmd->add_option("--config", sweep.config_path, "Scenario config (JSON)")->required();
  sweep_cmd->add_option("--output", sweep.output_path, "Outcome table path ('-' = stdout)");
  sweep_cmd->add_option("--summary", sweep.summary_path, "Summary JSON path");
  sweep_cmd->add_option("--format", sweep.format, "Table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  std::uint64_t sweep_seed = 0;
  CLI::Option* sweep_seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "Seed override");
  sweep_cmd->add_flag("--serial", sweep.serial, "Use the serial reference driver");

  SyncDemoOptions demo;
  CLI::App* demo_cmd =
      app.add_subcommand("sync-demo", "One hardened exchange over a loopback socket");
  demo_cmd->add_option("--theta", demo.theta_s, "True receiver offset (s)");
  demo_cmd->add_option("--theta-big", demo.theta_big_s, "Key-release delay (s)");
  demo_cmd->add_option("--delta-12", demo.delta_12_s, "Adversary hold on the request leg (s)");
  demo_cmd->add_option("--delta-34", demo.delta_34_s, "Adversary hold on the response leg (s)");
  demo_cmd->add_flag("--drop-response", demo.drop_response, "Block the response leg");
  demo_cmd->add_flag("--replay-response", demo.replay_response,
                     "Replay the previous response (stale nonce)");
  demo_cmd->add_option("--timeout", demo.timeout_s, "Receive timeout (s)");
  demo_cmd->add_option("--policy", demo.policy, "Adjustment policy: midpoint|lower|upper");
  demo_cmd->add_option("--timeout-posture", demo.posture, "shutdown|randomized-retry");
  demo_cmd->add_option("--drift-rate", demo.drift_rate, "Linear drift-bound rate (s/s)");
  demo_cmd->add_option("--seed", demo.seed, "Deterministic seed (0 = entropy)");
  demo_cmd->add_flag("--reveal-ground-truth", demo.reveal_ground_truth,
                     "Print the simulated true offset");

  MulticadenceOptions mc;
  CLI::App* mc_cmd = app.add_subcommand("multicadence", "Paired-cadence forgery analysis");
  mc_cmd->add_option("--theta-red", mc.theta_red_s, "Fast-instance key delay (s)");
  mc_cmd->add_option("--theta-blue", mc.theta_blue_s, "Slow-instance key delay (s)");
  mc_cmd->add_option("--samples", mc.samples, "Interior sample count");
  mc_cmd->add_option("--seed", mc.seed, "Sample seed");
  mc_cmd->add_option("--output", mc.output_path, "Report path ('-' = stdout)");

  TrafficOptions traffic;
  CLI::App* traffic_cmd =
      app.add_subcommand("traffic-study", "Vulnerability study on synthetic traffic");
  traffic_cmd->add_option("--config", traffic.config_path, "Traffic config (JSON)")->required();
  traffic_cmd->add_option("--output", traffic.output_path, "Report path ('-' = stdout)");
  std::uint64_t traffic_seed = 0;
  CLI::Option* traffic_seed_opt =
      traffic_cmd->add_option("--seed", traffic_seed, "Seed override");

  ChainToolOptions chain;
  CLI::App* chain_cmd = app.add_subcommand("chain-tool", "Derive or verify key chains");
  chain_cmd->add_option("--action", chain.action, "derive|verify");
  chain_cmd->add_option("--seed-hex", chain.seed_hex, "Chain seed (hex)");
  chain_cmd->add_option("--length", chain.length, "Chain length");
  chain_cmd->add_option("--nk", chain.n_k, "Key width in bits");
  chain_cmd->add_flag("--show-keys", chain.show_keys, "Print every key");
  chain_cmd->add_option("--root-hex", chain.root_hex, "Root commitment (hex)");
  chain_cmd->add_option("--key-hex", chain.key_hex, "Released key (hex)");
  chain_cmd->add_option("--index", chain.index, "Released key index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage problems (unknown flags or subcommands included) are exit 1;
    // --help stays 0.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sweep_cmd->parsed()) {
      if (sweep_seed_opt->count() > 0) sweep.seed = sweep_seed;
      return cmd_sweep(sweep);
    }
    if (demo_cmd->parsed()) return cmd_sync_demo(demo);
    if (mc_cmd->parsed()) return cmd_multicadence(mc);
    if (traffic_cmd->parsed()) {
      if (traffic_seed_opt->count() > 0) traffic.seed = traffic_seed;
      return cmd_traffic_study(traffic);
    }
    if (chain_cmd->parsed()) return cmd_chain_tool(chain);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
