#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orbit/backend.hpp"
#include "orbit/scenario.hpp"
#include "orbit/trace.hpp"

namespace orbit {

/// Which container/profile each node is created with. Overrides are keyed by
/// node name ("g0", "s0.1.2").
struct NodeProfiles {
    std::string default_profile{"default"};
    std::map<std::string, std::string> overrides;

    const std::string& profile_for(const NodeRef& n) const;
};

struct BringUpReport {
    double node_phase_s{0.0};     // create+start+initial suspend of every node
    double network_phase_s{0.0};  // initial link adds
    std::size_t node_count{0};
    std::size_t link_count{0};
};

struct StepReport {
    std::int64_t step_index{0};
    double scheduled_s{0.0};  // target wall offset from run start
    double applied_s{0.0};    // wall offset when the apply finished
    double lag_ms{0.0};       // applied - scheduled; 0 when running unpaced
    std::size_t ops{0};       // backend operations issued for this step
};

struct RunOptions {
    double realtime_factor{1.0};  // virtual seconds per wall second; <= 0 -> unpaced
    int workers{1};               // threads for link batches within one step
};

/// Applies a precomputed trace to a backend. bring_up replays the full-build
/// diff (step 0), run paces the remaining diffs against the wall clock (diff
/// k at T0 + k*step/r) without ever skipping one, and tear_down removes
/// everything best-effort. apply_next_step exposes manual stepping for
/// virtual-time drivers.
class Engine {
public:
    Engine(const Scenario& scenario, const TraceFile& trace, BackendOps& backend);

    BringUpReport bring_up(const NodeProfiles& profiles = {});
    std::vector<StepReport> run(const RunOptions& opts = {});
    void tear_down();

    std::int64_t applied_step() const { return applied_step_; }
    std::int64_t last_step() const { return static_cast<std::int64_t>(trace_->diffs.size()) - 1; }
    bool done() const { return applied_step_ >= last_step(); }

    /// Virtual time (seconds since scenario start) of the next pending diff.
    double next_step_time_s() const;

    StepReport apply_next_step(int workers = 1);

    /// Apply an arbitrary diff against the backend and the engine's mirror;
    /// exposed for live (non-trace) update drivers. Returns ops issued.
    std::size_t apply_diff_now(const StepDiff& d, int workers);

    const std::map<NodeRef, NodeState>& node_states() const { return node_states_; }
    const std::map<LinkKey, LinkProps>& links() const { return links_; }

private:
    const Scenario* scenario_;
    const TraceFile* trace_;
    BackendOps* backend_;
    NodeProfiles profiles_;
    bool brought_up_{false};
    std::int64_t applied_step_{-1};
    std::map<NodeRef, NodeState> node_states_;
    std::map<LinkKey, LinkProps> links_;
};

void write_step_reports_jsonl(const std::vector<StepReport>& reports, const std::string& path);

/// One aggregate row: steps, ops, lag percentiles (nearest-rank) and max.
void write_run_summary_csv(const std::vector<StepReport>& reports, const std::string& path);

}  // namespace orbit
