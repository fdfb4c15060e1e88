#pragma once

#include <cstdint>
#include <string>

#include "orbit/scenario.hpp"
#include "orbit/trace.hpp"

namespace orbit {

/// Render scenario + trace as a CZML document for globe viewers: one
/// document packet with the run's clock, one point entity per satellite with
/// time-tagged geodetic positions sampled every `sample_every_ms`, one
/// static entity per ground station, and one polyline per link whose
/// availability intervals mirror the link's lifetime in the trace. Pure
/// export — nothing here feeds back into emulation.
std::string export_viz_czml(const Scenario& scenario, const TraceFile& trace,
                            std::int64_t sample_every_ms);

void write_viz_czml(const Scenario& scenario, const TraceFile& trace,
                    std::int64_t sample_every_ms, const std::string& path);

}  // namespace orbit
