#include "orbit/engine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "orbit/errors.hpp"
#include "orbit/log.hpp"

namespace orbit {

using Clock = std::chrono::steady_clock;

const std::string& NodeProfiles::profile_for(const NodeRef& n) const {
    auto it = overrides.find(node_name(n));
    return it == overrides.end() ? default_profile : it->second;
}

Engine::Engine(const Scenario& scenario, const TraceFile& trace, BackendOps& backend)
    : scenario_(&scenario), trace_(&trace), backend_(&backend) {
    if (trace.header.scenario_digest != scenario_digest(scenario))
        throw ConfigError("trace does not match scenario (digest mismatch)");
    if (trace.header.step_ms != scenario.step_ms)
        throw ConfigError("trace step size disagrees with scenario");
}

namespace {

// Run f over [0, n) with the requested parallelism, stopping after the
// first failure and rethrowing it on the calling thread.
template <typename F>
void parallel_batch(std::size_t n, int workers, F&& f) {
    if (n == 0) return;
    std::exception_ptr error;
    bool failed = false;
    const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for num_threads(std::max(workers, 1)) schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        if (failed) continue;
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            {
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::size_t Engine::apply_diff_now(const StepDiff& d, int workers) {
    // Nodes first (creations, starts, resumes), then link changes, then
    // suspensions: a link may reference a node resumed this step, and a node
    // suspended this step sheds its links first.
    std::vector<std::pair<NodeRef, NodeState>> suspends;
    for (const auto& [ref, target] : d.node_transitions) {
        auto cur = node_states_.find(ref);
        if (cur == node_states_.end()) {
            backend_->create_node(ref, profiles_.profile_for(ref));
            if (target != NodeState::created) backend_->start_node(ref);
            if (target == NodeState::suspended) backend_->suspend_node(ref);
            node_states_[ref] = target;
            continue;
        }
        if (cur->second == target) continue;
        if (target == NodeState::suspended) {
            suspends.emplace_back(ref, target);  // deferred past link removals
            continue;
        }
        if (cur->second == NodeState::created && target == NodeState::started)
            backend_->start_node(ref);
        else if (cur->second == NodeState::suspended && target == NodeState::started)
            backend_->resume_node(ref);
        else
            throw BackendError("unsupported node transition for " + node_name(ref));
        cur->second = target;
    }

    parallel_batch(d.links_removed.size(), workers,
                   [&](std::size_t i) { backend_->remove_link(d.links_removed[i]); });
    for (const auto& key : d.links_removed) links_.erase(key);

    parallel_batch(d.props_changed.size(), workers, [&](std::size_t i) {
        backend_->update_link(d.props_changed[i].first, d.props_changed[i].second);
    });
    for (const auto& [key, props] : d.props_changed) links_[key] = props;

    for (const auto& [ref, target] : suspends) {
        backend_->suspend_node(ref);
        node_states_[ref] = target;
    }

    parallel_batch(d.links_added.size(), workers, [&](std::size_t i) {
        backend_->add_link(d.links_added[i].first, d.links_added[i].second);
    });
    for (const auto& [key, props] : d.links_added) links_[key] = props;

    return d.op_count();
}

BringUpReport Engine::bring_up(const NodeProfiles& profiles) {
    if (brought_up_) throw BackendError("bring_up already completed");
    profiles_ = profiles;

    BringUpReport report;
    if (trace_->diffs.empty()) {
        brought_up_ = true;
        return report;
    }
    const StepDiff& full = trace_->diffs.front();
    if (full.step_index != 0 || !full.links_removed.empty() || !full.props_changed.empty())
        throw ConfigError("trace does not start with a full-build diff");

    StepDiff nodes_only;
    nodes_only.node_transitions = full.node_transitions;
    StepDiff links_only;
    links_only.links_added = full.links_added;

    const auto t0 = Clock::now();
    apply_diff_now(nodes_only, 1);
    const auto t1 = Clock::now();
    apply_diff_now(links_only, 1);
    const auto t2 = Clock::now();

    report.node_phase_s = std::chrono::duration<double>(t1 - t0).count();
    report.network_phase_s = std::chrono::duration<double>(t2 - t1).count();
    report.node_count = full.node_transitions.size();
    report.link_count = full.links_added.size();
    applied_step_ = 0;
    brought_up_ = true;
    log::info("bring-up: " + std::to_string(report.node_count) + " nodes, " +
              std::to_string(report.link_count) + " links on " + backend_->name());
    return report;
}

double Engine::next_step_time_s() const {
    return static_cast<double>((applied_step_ + 1) * scenario_->step_ms) / 1000.0;
}

StepReport Engine::apply_next_step(int workers) {
    if (!brought_up_) throw BackendError("bring_up has not run");
    if (done()) throw BackendError("no steps left to apply");
    const std::int64_t k = applied_step_ + 1;
    const StepDiff& d = trace_->diffs[static_cast<std::size_t>(k)];
    StepReport r;
    r.step_index = k;
    try {
        r.ops = apply_diff_now(d, workers);
    } catch (const BackendError& e) {
        throw BackendError("step " + std::to_string(k) + ": " + e.what());
    }
    applied_step_ = k;
    return r;
}

std::vector<StepReport> Engine::run(const RunOptions& opts) {
    if (!brought_up_) throw BackendError("bring_up has not run");
    const bool paced = opts.realtime_factor > 0.0;
    const double step_s = static_cast<double>(scenario_->step_ms) / 1000.0;

    std::vector<StepReport> reports;
    reports.reserve(static_cast<std::size_t>(last_step() - applied_step_));
    const auto t0 = Clock::now();
    while (!done()) {
        const std::int64_t k = applied_step_ + 1;
        double scheduled_s = 0.0;
        if (paced) {
            scheduled_s = static_cast<double>(k) * step_s / opts.realtime_factor;
            std::this_thread::sleep_until(t0 + std::chrono::duration<double>(scheduled_s));
        }
        StepReport r = apply_next_step(opts.workers);
        r.applied_s = std::chrono::duration<double>(Clock::now() - t0).count();
        if (paced) {
            r.scheduled_s = scheduled_s;
            r.lag_ms = (r.applied_s - scheduled_s) * 1000.0;
        } else {
            r.scheduled_s = r.applied_s;
        }
        reports.push_back(r);
    }
    return reports;
}

void Engine::tear_down() {
    std::size_t failures = 0;
    std::string first_error;
    auto attempt = [&](auto&& op) {
        try {
            op();
        } catch (const std::exception& e) {
            if (failures++ == 0) first_error = e.what();
        }
    };
    for (const auto& [key, props] : links_) {
        (void)props;
        attempt([&] { backend_->remove_link(key); });
    }
    for (const auto& [ref, state] : node_states_) {
        (void)state;
        attempt([&] { backend_->destroy_node(ref); });
    }
    links_.clear();
    node_states_.clear();
    brought_up_ = false;
    applied_step_ = -1;
    if (failures > 0)
        throw BackendError("tear_down: " + std::to_string(failures) +
                           " operations failed; first: " + first_error);
}

void write_step_reports_jsonl(const std::vector<StepReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (const auto& r : reports) {
        nlohmann::json j{{"step", r.step_index},
                         {"scheduled_s", r.scheduled_s},
                         {"applied_s", r.applied_s},
                         {"lag_ms", r.lag_ms},
                         {"ops", r.ops}};
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("short write to " + path);
}

void write_run_summary_csv(const std::vector<StepReport>& reports, const std::string& path) {
    std::vector<double> lags;
    lags.reserve(reports.size());
    std::size_t ops = 0;
    double wall = 0.0;
    for (const auto& r : reports) {
        lags.push_back(r.lag_ms);
        ops += r.ops;
        wall = std::max(wall, r.applied_s);
    }
    std::sort(lags.begin(), lags.end());
    // Nearest-rank percentile over the sorted lag list.
    auto pct = [&](double p) {
        if (lags.empty()) return 0.0;
        std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * lags.size()));
        if (rank == 0) rank = 1;
        return lags[rank - 1];
    };
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "steps,ops,lag_p50_ms,lag_p99_ms,lag_max_ms,wall_s\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.3f,%.3f,%.3f,%.3f\n", reports.size(), ops,
                  pct(50.0), pct(99.0), lags.empty() ? 0.0 : lags.back(), wall);
    out << buf;
    if (!out) throw IoError("short write to " + path);
}

}  // namespace orbit
