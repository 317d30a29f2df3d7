#pragma once

#include <string>

#include "gictk/adversary.hpp"
#include "gictk/sim.hpp"

namespace gictk::config {

// Structured-text configuration loading. Files are versioned JSON objects;
// unknown keys are hard errors so that a typo never silently changes a
// safety parameter. Throws std::invalid_argument with a readable message.
sim::ScenarioConfig load_scenario(const std::string& text);
adversary::TrafficConfig load_traffic(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace gictk::config
