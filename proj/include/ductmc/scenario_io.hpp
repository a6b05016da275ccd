#pragma once

#include <string>
#include <vector>

#include "ductmc/types.hpp"

namespace ductmc {

// Scenario files are JSON with the exact field names of SimulationScenario.
// serialize_scenario emits a canonical form (fixed key order, two-space
// indent, shortest round-trip numbers), so serialize -> parse -> serialize
// is byte-identical.
std::string serialize_scenario(const SimulationScenario& scenario);
SimulationScenario parse_scenario(const std::string& json_text);

SimulationScenario load_scenario_file(const std::string& path);
void save_scenario_file(const SimulationScenario& scenario, const std::string& path);

// FNV-1a 64 over the canonical serialization, as a 16-digit hex string.
std::string scenario_digest(const SimulationScenario& scenario);
std::uint64_t fnv1a64(const std::string& data);

// Built-in presets: "vein" (the reference vessel), "capillary" and
// "artery-distal" (illustrative). Unknown names raise Error("UnknownPreset").
SimulationScenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ductmc
