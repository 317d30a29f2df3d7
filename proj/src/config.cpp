#include "gictk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gictk::config {

namespace {

using nlohmann::json;

json parse_versioned(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1) {
    throw std::invalid_argument("config must declare \"version\": 1");
  }
  return doc;
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) {
      throw std::invalid_argument("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double require_number(const json& doc, const std::string& key) {
  if (!doc.contains(key) || !doc[key].is_number()) {
    throw std::invalid_argument("missing numeric key \"" + key + "\"");
  }
  return doc[key].get<double>();
}

double number_or(const json& doc, const std::string& key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) throw std::invalid_argument("key \"" + key + "\" must be a number");
  return doc[key].get<double>();
}

DriftBound parse_drift(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("\"drift\" must be an object");
  reject_unknown_keys(doc, {"form", "rate", "floor"}, "drift");
  const std::string form = doc.value("form", "linear");
  const double rate = number_or(doc, "rate", 0.0);
  if (form == "linear") return DriftBound::linear(rate);
  if (form == "affine") return DriftBound::affine(require_number(doc, "floor"), rate);
  throw std::invalid_argument("drift form must be \"linear\" or \"affine\"");
}

}  // namespace

sim::ScenarioConfig load_scenario(const std::string& text) {
  const json doc = parse_versioned(text);
  reject_unknown_keys(doc,
                      {"version", "kind", "theta_big", "theta_blue", "theta_min",
                       "theta_max", "theta_step", "delta_min", "delta_max",
                       "delta_step", "base_latency", "receiver_bound", "drift",
                       "certify_elapsed", "seed", "record_trace"},
                      "scenario config");

  sim::ScenarioConfig cfg;
  const std::string kind = doc.value("kind", "receipt-safety");
  if (kind == "receipt-safety") {
    cfg.kind = sim::SweepKind::ReceiptSafety;
  } else if (kind == "clock-safety") {
    cfg.kind = sim::SweepKind::ClockSafety;
  } else if (kind == "post-sync") {
    cfg.kind = sim::SweepKind::PostSync;
  } else if (kind == "multicadence") {
    cfg.kind = sim::SweepKind::Multicadence;
  } else {
    throw std::invalid_argument("unknown sweep kind \"" + kind + "\"");
  }

  cfg.theta_big = ns_from_seconds(require_number(doc, "theta_big"));
  cfg.theta_blue = ns_from_seconds(number_or(doc, "theta_blue", 0.0));
  cfg.theta_grid = sim::make_grid(ns_from_seconds(require_number(doc, "theta_min")),
                                  ns_from_seconds(require_number(doc, "theta_max")),
                                  ns_from_seconds(require_number(doc, "theta_step")));
  cfg.delta_grid = sim::make_grid(ns_from_seconds(require_number(doc, "delta_min")),
                                  ns_from_seconds(require_number(doc, "delta_max")),
                                  ns_from_seconds(require_number(doc, "delta_step")));
  cfg.base_latency = ns_from_seconds(number_or(doc, "base_latency", 0.01));
  if (doc.contains("receiver_bound")) {
    cfg.receiver_bound = ns_from_seconds(require_number(doc, "receiver_bound"));
  }
  if (doc.contains("drift")) cfg.drift = parse_drift(doc["drift"]);
  cfg.certify_elapsed = ns_from_seconds(number_or(doc, "certify_elapsed", 0.0));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw std::invalid_argument("\"seed\" must be a non-negative integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("record_trace")) {
    if (!doc["record_trace"].is_boolean()) {
      throw std::invalid_argument("\"record_trace\" must be a boolean");
    }
    cfg.record_trace = doc["record_trace"].get<bool>();
  }
  return cfg;
}

adversary::TrafficConfig load_traffic(const std::string& text) {
  const json doc = parse_versioned(text);
  reject_unknown_keys(doc,
                      {"version", "weights", "safe_theta_span", "uniform_random_span",
                       "planted_events", "planted_mean_interarrival",
                       "planted_theta_lo", "planted_theta_hi", "background_rate",
                       "epoch", "seed"},
                      "traffic config");

  adversary::TrafficConfig cfg;
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    reject_unknown_keys(w, {"faithful", "null", "integer_second", "uniform_random"},
                        "weights");
    cfg.weight_faithful = number_or(w, "faithful", cfg.weight_faithful);
    cfg.weight_null = number_or(w, "null", cfg.weight_null);
    cfg.weight_integer_second = number_or(w, "integer_second", cfg.weight_integer_second);
    cfg.weight_uniform_random = number_or(w, "uniform_random", cfg.weight_uniform_random);
  }
  cfg.safe_theta_span_s = number_or(doc, "safe_theta_span", cfg.safe_theta_span_s);
  cfg.uniform_random_span_s =
      number_or(doc, "uniform_random_span", cfg.uniform_random_span_s);
  cfg.planted_events = static_cast<std::size_t>(number_or(doc, "planted_events", 0));
  cfg.planted_mean_interarrival_s =
      number_or(doc, "planted_mean_interarrival", cfg.planted_mean_interarrival_s);
  cfg.planted_theta_lo_s = number_or(doc, "planted_theta_lo", cfg.planted_theta_lo_s);
  cfg.planted_theta_hi_s = number_or(doc, "planted_theta_hi", cfg.planted_theta_hi_s);
  cfg.background_rate_per_s = number_or(doc, "background_rate", cfg.background_rate_per_s);
  cfg.epoch_s = number_or(doc, "epoch", cfg.epoch_s);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw std::invalid_argument("\"seed\" must be a non-negative integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gictk::config
