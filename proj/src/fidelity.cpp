#include "orbit/fidelity.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "orbit/engine.hpp"
#include "orbit/errors.hpp"
#include "orbit/log.hpp"

namespace orbit {

std::vector<HandoverEvent> handovers_in_diff(const StepDiff& d, double t_s) {
    // Pair removals and additions per ground station: both present = switch,
    // one side only = acquisition or loss.
    std::map<int, HandoverEvent> by_gs;
    auto slot = [&](const NodeRef& gs) -> HandoverEvent& {
        auto [it, inserted] = by_gs.try_emplace(gs.gs_index);
        if (inserted) {
            it->second.t_s = t_s;
            it->second.gs_index = gs.gs_index;
        }
        return it->second;
    };
    for (const auto& key : d.links_removed) {
        if (!key.is_gsl()) continue;
        slot(key.a).from = key.b.sat;  // key.a is the ground end after normalization
    }
    for (const auto& [key, props] : d.links_added) {
        if (!key.is_gsl()) continue;
        slot(key.a).to = key.b.sat;
    }
    std::vector<HandoverEvent> events;
    events.reserve(by_gs.size());
    for (auto& [gs, ev] : by_gs) events.push_back(std::move(ev));
    return events;
}

FidelityResult fidelity_run(const Scenario& scenario, const TraceFile& trace,
                            const FidelityOptions& opts) {
    if (opts.gs_src == opts.gs_dst ||
        opts.gs_src >= static_cast<int>(scenario.ground_stations.size()) ||
        opts.gs_dst >= static_cast<int>(scenario.ground_stations.size()) ||
        opts.gs_src < 0 || opts.gs_dst < 0)
        throw ConfigError("fidelity run needs two distinct ground stations");

    SimParams params;
    params.mode = opts.mode;
    params.per_hop_processing_us = opts.per_hop_processing_us;
    params.gsl_contention = scenario.gsl_contention;
    SimulatedBackend backend(params);

    Engine engine(scenario, trace, backend);
    engine.bring_up();

    FidelityResult result;
    for (auto& ev : handovers_in_diff(trace.diffs.front(), 0.0))
        result.handovers.push_back(std::move(ev));

    const double step_s = static_cast<double>(scenario.step_ms) / 1000.0;
    // Fold in every diff scheduled at or before virtual time t.
    auto advance = [&](double t) {
        while (!engine.done() && engine.next_step_time_s() <= t + 1e-9) {
            const double due = engine.next_step_time_s();
            const StepDiff& d = trace.diffs[static_cast<std::size_t>(engine.applied_step() + 1)];
            for (auto& ev : handovers_in_diff(d, due)) result.handovers.push_back(std::move(ev));
            engine.apply_next_step(opts.workers);
        }
    };

    const NodeRef src = NodeRef::ground(opts.gs_src);
    const NodeRef dst = NodeRef::ground(opts.gs_dst);
    const double duration_s = static_cast<double>(scenario.duration_ms) / 1000.0;
    const double span_s = opts.throughput_intervals +
                          static_cast<double>(opts.ping_count) * opts.ping_interval_s;

    for (int mark = 0;; ++mark) {
        const double t_mark = mark * opts.mark_interval_s;
        if (t_mark + span_s > duration_s + 1e-9) break;

        // Uplink and downlink share the air for the same intervals.
        advance(t_mark);
        MeasurementRecord up, down;
        up.kind = down.kind = MeasKind::throughput;
        up.t_start_s = down.t_start_s = t_mark;
        up.requested = down.requested = opts.throughput_intervals;
        if (auto p = backend.path(src, dst)) {
            up.path_hops = p->hops;
            up.loss_pct = p->loss_one_way * 100.0;
        }
        if (auto p = backend.path(dst, src)) {
            down.path_hops = p->hops;
            down.loss_pct = p->loss_one_way * 100.0;
        }
        const int up_id = backend.open_session(src, dst, opts.uplink_target_mbps);
        const int down_id = backend.open_session(dst, src, opts.downlink_target_mbps);
        for (int i = 0; i < opts.throughput_intervals; ++i) {
            const double t = t_mark + i;
            advance(t);
            auto goodput = backend.interval_goodput(t);
            up.series.push_back(goodput.at(up_id));
            down.series.push_back(goodput.at(down_id));
        }
        backend.close_session(up_id);
        backend.close_session(down_id);

        result.meta.push_back({result.records.size(), "uplink", opts.uplink_target_mbps});
        result.records.push_back(std::move(up));
        result.meta.push_back({result.records.size(), "downlink", opts.downlink_target_mbps});
        result.records.push_back(std::move(down));

        const double t_ping = t_mark + opts.throughput_intervals;
        MeasurementRecord ping =
            backend.sim_ping(src, dst, opts.ping_count, opts.ping_interval_s,
                             opts.seed * 1000003 + static_cast<std::uint64_t>(mark), t_ping,
                             advance);
        result.meta.push_back({result.records.size(), "both", 0.0});
        result.records.push_back(std::move(ping));
        log::info("fidelity mark " + std::to_string(mark) + " at t=" + std::to_string(t_mark));
    }

    advance(duration_s + step_s);  // flush remaining handovers to the end
    engine.tear_down();
    return result;
}

namespace {

std::string sat_or_empty(const std::optional<SatelliteId>& s) {
    if (!s) return "";
    return node_name(NodeRef::satellite(*s));
}

}  // namespace

void write_handovers_csv(const std::vector<HandoverEvent>& events, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "t_s,gs,from,to\n";
    char buf[128];
    for (const auto& ev : events) {
        std::snprintf(buf, sizeof(buf), "%.3f,g%d,%s,%s\n", ev.t_s, ev.gs_index,
                      sat_or_empty(ev.from).c_str(), sat_or_empty(ev.to).c_str());
        out << buf;
    }
    if (!out) throw IoError("short write to " + path);
}

void write_sessions_jsonl(const FidelityResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& rec = result.records[i];
        const auto& meta = result.meta[i];
        nlohmann::json j{{"record", i},
                         {"kind", rec.kind == MeasKind::ping ? "ping" : "throughput"},
                         {"direction", meta.direction},
                         {"t_start_s", rec.t_start_s},
                         {"target_mbps", meta.target_mbps},
                         {"requested", rec.requested},
                         {"samples", rec.series.size()},
                         {"loss_pct", rec.loss_pct},
                         {"hops", rec.path_hops}};
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("short write to " + path);
}

}  // namespace orbit
