#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbit/scenario.hpp"
#include "orbit/simulated_backend.hpp"
#include "orbit/trace.hpp"

namespace orbit {

/// A ground station's GSL switching satellites (or appearing/disappearing)
/// at virtual time t_s. `from` empty = acquisition, `to` empty = loss of
/// visibility.
struct HandoverEvent {
    double t_s{0.0};
    int gs_index{0};
    std::optional<SatelliteId> from;
    std::optional<SatelliteId> to;
};

/// Extract every GSL change in one diff. `t_s` stamps the events.
std::vector<HandoverEvent> handovers_in_diff(const StepDiff& d, double t_s);

struct FidelityOptions {
    double mark_interval_s{180.0};  // measurement cadence along the run
    int ping_count{250};
    double ping_interval_s{0.1};
    int throughput_intervals{10};
    double uplink_target_mbps{100.0};
    double downlink_target_mbps{500.0};
    int gs_src{0};
    int gs_dst{1};
    std::uint64_t seed{1};
    TopologyMode mode{TopologyMode::grid};
    std::int64_t per_hop_processing_us{100};
    int workers{1};
};

/// Direction tag for throughput records ("uplink" src->dst, "downlink"
/// dst->src); ping records carry "both".
struct RecordMeta {
    std::size_t record_index{0};
    std::string direction;
    double target_mbps{0.0};
};

struct FidelityResult {
    std::vector<MeasurementRecord> records;
    std::vector<RecordMeta> meta;       // parallel to records
    std::vector<HandoverEvent> handovers;
};

/// Replay the trace in virtual time and interleave the measurement plan: at
/// every mark, concurrent uplink+downlink transfers followed by a ping
/// train, with topology diffs folded in exactly when they fall due.
/// Wall-clock speed does not influence any measured value, so results are a
/// pure function of (scenario, trace, options).
FidelityResult fidelity_run(const Scenario& scenario, const TraceFile& trace,
                            const FidelityOptions& opts);

void write_handovers_csv(const std::vector<HandoverEvent>& events, const std::string& path);
void write_sessions_jsonl(const FidelityResult& result, const std::string& path);

}  // namespace orbit
