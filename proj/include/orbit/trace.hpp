#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orbit/scenario.hpp"
#include "orbit/topology.hpp"

namespace orbit {

/// State delta between two consecutive snapshots. Applying diff k to the
/// folded state after k-1 yields exactly the stored state for step k. All
/// lists are sorted by key; a link appears in at most one of them.
struct StepDiff {
    std::int64_t step_index{0};
    std::vector<std::pair<NodeRef, NodeState>> node_transitions;
    std::vector<std::pair<LinkKey, LinkProps>> links_added;
    std::vector<LinkKey> links_removed;
    std::vector<std::pair<LinkKey, LinkProps>> props_changed;

    bool empty() const {
        return node_transitions.empty() && links_added.empty() && links_removed.empty() &&
               props_changed.empty();
    }
    std::size_t op_count() const {
        return node_transitions.size() + links_added.size() + links_removed.size() +
               props_changed.size();
    }
};

struct TraceHeader {
    int format_version{1};
    std::string scenario_digest;
    std::string epoch_utc;
    std::int64_t step_ms{0};
    std::int64_t step_count{0};  // number of steps; the body holds step_count+1 records
};

/// Precomputed replayable trace: header plus one StepDiff per step index
/// 0..step_count, where record 0 is the full build from the empty state.
struct TraceFile {
    TraceHeader header;
    std::vector<StepDiff> diffs;
};

/// Delta from snapshot `a` to snapshot `b`. Delay-only changes smaller than
/// `quantization_us` are suppressed (the folded state keeps a's delay), which
/// is what bounds per-step update churn. 0 disables suppression.
StepDiff diff(const TopologySnapshot& a, const TopologySnapshot& b,
              std::int64_t quantization_us = 0);

/// Fold one diff into `state`. Inverse of diff up to quantization.
void apply_diff(TopologySnapshot& state, const StepDiff& d);

/// Evaluate all snapshots and encode the diff stream. Snapshot evaluation is
/// data-parallel across steps (OpenMP, `workers` threads); diffing and
/// encoding stay sequential in step order, so the output bytes are identical
/// for every workers value. Scenarios with sticky ground stations fall back
/// to sequential evaluation because selections thread across steps.
TraceFile precompute(const Scenario& scenario, int workers);

/// Plain serial implementation kept as the reference for the parallel
/// kernel; must produce byte-identical traces.
TraceFile precompute_reference(const Scenario& scenario);

std::string serialize_trace(const TraceFile& t);
TraceFile parse_trace(const std::string& text);

void write_trace(const TraceFile& t, const std::string& path);
TraceFile read_trace(const std::string& path);

/// Read and verify the header digest against `expected`; throws ConfigError
/// with "digest mismatch" on disagreement.
TraceFile read_trace(const std::string& path, const Scenario& expected);

}  // namespace orbit
