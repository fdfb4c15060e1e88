#include "orbit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#ifdef __linux__
#include <unistd.h>
#endif

#include "orbit/errors.hpp"
#include "orbit/log.hpp"
#include "orbit/trace.hpp"

namespace orbit {

double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * values.size()));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

Scenario with_planes(const Scenario& base, int planes) {
    if (base.shells.empty()) throw ConfigError("benchmark scenario needs at least one shell");
    Scenario sc = base;
    sc.shells[0].planes = planes;
    ScenarioModel model(sc);
    sc.budget.max_nodes = std::max(sc.budget.max_nodes, sc.total_nodes());
    sc.budget.max_links = std::max(
        sc.budget.max_links,
        static_cast<int>(model.isl_pair_count() + sc.ground_stations.size()));
    return sc;
}

std::vector<BringupRow> bench_bringup(const Scenario& base, const std::vector<int>& plane_counts,
                                      const BackendFactory& make_backend) {
    std::vector<BringupRow> rows;
    for (int planes : plane_counts) {
        Scenario sc = with_planes(base, planes);
        sc.duration_ms = 0;  // full build only
        TraceFile trace = precompute(sc, 1);
        auto backend = make_backend();
        Engine engine(sc, trace, *backend);
        BringUpReport report = engine.bring_up();
        engine.tear_down();
        BringupRow row;
        row.planes = planes;
        row.nodes = report.node_count;
        row.links = report.link_count;
        row.node_phase_s = report.node_phase_s;
        row.network_phase_s = report.network_phase_s;
        rows.push_back(row);
        log::info("bringup planes=" + std::to_string(planes) + " nodes=" +
                  std::to_string(row.nodes) + " links=" + std::to_string(row.links));
    }
    return rows;
}

UpdateMode parse_update_mode(const std::string& s) {
    if (s == "trace") return UpdateMode::trace;
    if (s == "online") return UpdateMode::online;
    throw ConfigError("unknown update mode '" + s + "' (trace|online)");
}

namespace {

UpdateRow summarize(int planes, const std::vector<StepReport>& reports,
                    const std::vector<double>& compute_ms) {
    UpdateRow row;
    row.planes = planes;
    row.steps = reports.size();
    std::vector<double> lags;
    lags.reserve(reports.size());
    double ops = 0.0;
    for (const auto& r : reports) {
        lags.push_back(r.lag_ms);
        ops += static_cast<double>(r.ops);
    }
    row.lag_p50_ms = percentile_nearest_rank(lags, 50.0);
    row.lag_p99_ms = percentile_nearest_rank(lags, 99.0);
    row.lag_max_ms = lags.empty() ? 0.0 : *std::max_element(lags.begin(), lags.end());
    row.mean_ops = reports.empty() ? 0.0 : ops / static_cast<double>(reports.size());
    row.compute_p99_ms = percentile_nearest_rank(compute_ms, 99.0);
    return row;
}

// Paced loop that evaluates each step's snapshot and diff inside the loop
// instead of replaying a trace; per-step compute time is what grows with
// constellation size.
UpdateRow run_online(const Scenario& sc, int planes, double realtime_factor, int workers,
                     BackendOps& backend) {
    using Clock = std::chrono::steady_clock;
    ScenarioModel model(sc);

    TraceFile stub;
    stub.header.format_version = 1;
    stub.header.scenario_digest = scenario_digest(sc);
    stub.header.epoch_utc = sc.epoch_utc;
    stub.header.step_ms = sc.step_ms;
    stub.header.step_count = sc.step_count();

    GslSelection selection(sc.ground_stations.size());
    GslSelection next(sc.ground_stations.size());
    TopologySnapshot emitted;
    TopologySnapshot snap = model.snapshot_at(0, &selection, &next);
    StepDiff d0 = diff(emitted, snap, sc.delay_quantization_us);
    apply_diff(emitted, d0);
    selection = next;
    stub.diffs.push_back(std::move(d0));

    Engine engine(sc, stub, backend);
    engine.bring_up();

    const bool paced = realtime_factor > 0.0;
    const double step_s = static_cast<double>(sc.step_ms) / 1000.0;
    std::vector<StepReport> reports;
    std::vector<double> compute_ms;
    const auto t0 = Clock::now();
    for (std::int64_t k = 1; k <= sc.step_count(); ++k) {
        double scheduled_s = 0.0;
        if (paced) {
            scheduled_s = static_cast<double>(k) * step_s / realtime_factor;
            std::this_thread::sleep_until(t0 + std::chrono::duration<double>(scheduled_s));
        }
        const auto c0 = Clock::now();
        snap = model.snapshot_at(k * sc.step_ms, &selection, &next);
        StepDiff d = diff(emitted, snap, sc.delay_quantization_us);
        d.step_index = k;
        const auto c1 = Clock::now();
        StepReport r;
        r.step_index = k;
        r.ops = engine.apply_diff_now(d, workers);
        apply_diff(emitted, d);
        selection = next;
        r.applied_s = std::chrono::duration<double>(Clock::now() - t0).count();
        r.scheduled_s = paced ? scheduled_s : r.applied_s;
        r.lag_ms = paced ? (r.applied_s - scheduled_s) * 1000.0 : 0.0;
        reports.push_back(r);
        compute_ms.push_back(std::chrono::duration<double, std::milli>(c1 - c0).count());
    }
    engine.tear_down();
    return summarize(planes, reports, compute_ms);
}

}  // namespace

std::vector<UpdateRow> bench_updates(const Scenario& base, const std::vector<int>& plane_counts,
                                     UpdateMode mode, double realtime_factor, int workers,
                                     const BackendFactory& make_backend) {
    std::vector<UpdateRow> rows;
    for (int planes : plane_counts) {
        Scenario sc = with_planes(base, planes);
        auto backend = make_backend();
        if (mode == UpdateMode::online) {
            rows.push_back(run_online(sc, planes, realtime_factor, workers, *backend));
        } else {
            TraceFile trace = precompute(sc, workers);
            Engine engine(sc, trace, *backend);
            engine.bring_up();
            std::vector<StepReport> reports = engine.run({realtime_factor, workers});
            engine.tear_down();
            rows.push_back(summarize(planes, reports, {}));
        }
        log::info("updates planes=" + std::to_string(planes) + " p99_lag_ms=" +
                  std::to_string(rows.back().lag_p99_ms));
    }
    return rows;
}

void write_bringup_csv(const std::vector<BringupRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "planes,nodes,links,node_phase_s,network_phase_s,total_s\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%zu,%.6f,%.6f,%.6f\n", r.planes, r.nodes, r.links,
                      r.node_phase_s, r.network_phase_s, r.node_phase_s + r.network_phase_s);
        out << buf;
    }
    if (!out) throw IoError("short write to " + path);
}

void write_updates_csv(const std::vector<UpdateRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "planes,steps,lag_p50_ms,lag_p99_ms,lag_max_ms,mean_ops,compute_p99_ms\n";
    char buf[200];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%.3f,%.3f,%.3f,%.1f,%.3f\n", r.planes, r.steps,
                      r.lag_p50_ms, r.lag_p99_ms, r.lag_max_ms, r.mean_ops, r.compute_p99_ms);
        out << buf;
    }
    if (!out) throw IoError("short write to " + path);
}

#ifdef __linux__

namespace {

struct SystemTicks {
    long long user{0}, nice{0}, system{0}, irq{0}, softirq{0}, total{0};
};

bool read_system_ticks(SystemTicks& t) {
    std::ifstream in("/proc/stat");
    std::string cpu;
    long long user, nice, sys, idle, iowait, irq, softirq, steal = 0;
    if (!(in >> cpu >> user >> nice >> sys >> idle >> iowait >> irq >> softirq)) return false;
    in >> steal;
    t.user = user;
    t.nice = nice;
    t.system = sys;
    t.irq = irq;
    t.softirq = softirq;
    t.total = user + nice + sys + idle + iowait + irq + softirq + steal;
    return true;
}

bool read_pid_ticks(int pid, long long& utime, long long& stime) {
    std::ifstream in("/proc/" + std::to_string(pid) + "/stat");
    std::string line;
    if (!std::getline(in, line)) return false;
    const auto close = line.rfind(')');  // comm may contain spaces
    if (close == std::string::npos) return false;
    std::istringstream rest(line.substr(close + 1));
    std::string tok;
    // After comm: field 3 is state; utime and stime are fields 14 and 15.
    for (int field = 3; field <= 15 && rest >> tok; ++field) {
        if (field == 14) utime = std::stoll(tok);
        if (field == 15) stime = std::stoll(tok);
    }
    return rest.good() || rest.eof();
}

}  // namespace

CpuSeries sample_cpu(const std::vector<int>& pids, double interval_s, double duration_s) {
    CpuSeries series;
    const double hz = static_cast<double>(sysconf(_SC_CLK_TCK));

    SystemTicks prev_sys;
    std::vector<std::pair<long long, long long>> prev_pid(pids.size());
    if (pids.empty()) {
        if (!read_system_ticks(prev_sys)) {
            series.supported = false;
            return series;
        }
    } else {
        for (std::size_t i = 0; i < pids.size(); ++i) {
            if (!read_pid_ticks(pids[i], prev_pid[i].first, prev_pid[i].second)) {
                series.supported = false;
                return series;
            }
        }
    }

    for (double t = interval_s; t <= duration_s + 1e-9; t += interval_s) {
        std::this_thread::sleep_for(std::chrono::duration<double>(interval_s));
        CpuSample sample;
        sample.t_s = t;
        if (pids.empty()) {
            SystemTicks cur;
            if (!read_system_ticks(cur)) {
                series.truncated = true;
                break;
            }
            const double total = static_cast<double>(cur.total - prev_sys.total);
            if (total > 0) {
                sample.user_pct = 100.0 *
                                  static_cast<double>((cur.user + cur.nice) -
                                                      (prev_sys.user + prev_sys.nice)) / total;
                sample.system_pct = 100.0 *
                                    static_cast<double>((cur.system + cur.irq + cur.softirq) -
                                                        (prev_sys.system + prev_sys.irq +
                                                         prev_sys.softirq)) / total;
            }
            prev_sys = cur;
        } else {
            bool ok = true;
            for (std::size_t i = 0; i < pids.size(); ++i) {
                long long utime = 0, stime = 0;
                if (!read_pid_ticks(pids[i], utime, stime)) {
                    ok = false;
                    break;
                }
                sample.user_pct += 100.0 * static_cast<double>(utime - prev_pid[i].first) /
                                   (hz * interval_s);
                sample.system_pct += 100.0 * static_cast<double>(stime - prev_pid[i].second) /
                                     (hz * interval_s);
                prev_pid[i] = {utime, stime};
            }
            if (!ok) {
                series.truncated = true;
                break;
            }
        }
        series.samples.push_back(sample);
    }
    return series;
}

#else

CpuSeries sample_cpu(const std::vector<int>&, double, double) {
    CpuSeries series;
    series.supported = false;
    return series;
}

#endif

void write_cpu_csv(const CpuSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "t_s,user_pct,system_pct\n";
    char buf[96];
    for (const auto& s : series.samples) {
        std::snprintf(buf, sizeof(buf), "%.3f,%.3f,%.3f\n", s.t_s, s.user_pct, s.system_pct);
        out << buf;
    }
    if (!out) throw IoError("short write to " + path);
}

}  // namespace orbit
