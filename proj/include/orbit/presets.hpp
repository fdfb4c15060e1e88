#pragma once

#include <string>
#include <vector>

#include "orbit/fidelity.hpp"
#include "orbit/scenario.hpp"

namespace orbit {

/// A ready-to-run experiment: scenario plus the measurement plan that goes
/// with it. Presets are pure functions of nothing — every call returns the
/// same value, so generated scenario files are byte-identical across runs.
struct ScenarioPreset {
    std::string name;
    Scenario scenario;
    FidelityOptions fidelity;
};

/// Bent-pipe fidelity experiment: a 10-plane slice of the 72x22 / 53deg /
/// 550 km shell (RAAN arc 10/72 of a turn starting at 225deg) over two
/// German ground stations ~90 km apart, one simulated hour at 5 s steps.
/// Links are loss-free and delay changes below 10 ms are quantized away, so
/// the RTT series is exactly flat between GSL handovers and every handover
/// shows up as a discontinuity.
ScenarioPreset scenario_wetlinks();

/// EU-US multihop experiment: a budget-sized full-arc 16x22 / 53deg / 550 km
/// shell with ground stations near Hameln (DE) and Los Angeles (US), 10
/// simulated minutes. Grid-mode pings cross the Atlantic over the +grid
/// mesh; star mode reports the same end-to-end delay as a 2-hop path.
ScenarioPreset scenario_transatlantic();

ScenarioPreset preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace orbit
