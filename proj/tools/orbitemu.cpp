// orbitemu: command-line front end for the constellation emulation pipeline.
//
//   gen         write a scenario file (from a preset or normalized from input)
//   precompute  evaluate a scenario into a replayable trace
//   run         apply a trace to a backend, paced against the wall clock
//   bench       bringup / updates / cpu measurement harnesses
//   fidelity    virtual-time measurement campaigns on the built-in presets
//   export-viz  CZML document for globe viewers
//   validate    check scenario schema and trace digest
//
// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 backend error, 5 budget
// exceeded. Failures print one machine-readable JSON line on stderr.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "orbit/bench.hpp"
#include "orbit/engine.hpp"
#include "orbit/errors.hpp"
#include "orbit/fidelity.hpp"
#include "orbit/log.hpp"
#include "orbit/netns_backend.hpp"
#include "orbit/presets.hpp"
#include "orbit/recording_backend.hpp"
#include "orbit/scenario.hpp"
#include "orbit/simulated_backend.hpp"
#include "orbit/trace.hpp"
#include "orbit/viz.hpp"

namespace {

using orbit::Scenario;
using orbit::TraceFile;

void print_error_json(const std::string& type, const std::string& message) {
    nlohmann::json j{{"error", {{"type", type}, {"message", message}}}};
    std::fprintf(stderr, "%s\n", j.dump().c_str());
}

int resolved_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::unique_ptr<orbit::BackendOps> make_backend(const std::string& selector,
                                                const Scenario& scenario) {
    if (selector == "recording") return std::make_unique<orbit::RecordingBackend>();
    if (selector == "simulated") {
        orbit::SimParams params;
        params.gsl_contention = scenario.gsl_contention;
        return std::make_unique<orbit::SimulatedBackend>(params);
    }
    if (selector == "linux") {
        if (!orbit::NetnsBackend::available()) {
            throw orbit::BackendError(
                "linux backend unavailable: requires root and the ip/tc tools");
        }
        return std::make_unique<orbit::NetnsBackend>();
    }
    throw orbit::ConfigError("unknown backend '" + selector +
                             "' (expected recording|simulated|linux)");
}

Scenario load_base_scenario(const std::string& scenario_path, const std::string& preset_name) {
    if (!scenario_path.empty()) return orbit::load_scenario(scenario_path);
    return orbit::preset_by_name(preset_name).scenario;
}

void override_timing(Scenario& sc, double duration_s, double step_s) {
    if (step_s > 0.0) sc.step_ms = std::llround(step_s * 1000.0);
    if (duration_s > 0.0) sc.duration_ms = std::llround(duration_s * 1000.0);
}

TraceFile obtain_trace(const Scenario& sc, const std::string& trace_path, int workers) {
    if (!trace_path.empty()) return orbit::read_trace(trace_path, sc);
    orbit::log::info("no trace given, precomputing in-process");
    return orbit::precompute(sc, resolved_workers(workers));
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw orbit::IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string default_trace_path(const std::string& scenario_path) {
    std::filesystem::path p(scenario_path);
    p.replace_extension("");
    return p.string() + ".trace.jsonl";
}

// ---- gen ------------------------------------------------------------------

int cmd_gen(const std::string& preset, const std::string& scenario_path, std::string out,
            double duration_s, double step_s) {
    Scenario sc = load_base_scenario(scenario_path, preset);
    override_timing(sc, duration_s, step_s);
    orbit::validate_scenario(sc);
    std::string text = orbit::scenario_to_json(sc);
    if (out.empty()) {
        if (!preset.empty() && scenario_path.empty()) {
            out = preset + ".json";
        } else {
            std::fputs(text.c_str(), stdout);
            return 0;
        }
    }
    std::FILE* f = std::fopen(out.c_str(), "wb");
    if (!f) throw orbit::IoError("cannot write " + out);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
    std::printf("wrote %s (%d satellites, %zu ground stations, digest %s)\n", out.c_str(),
                sc.total_satellites(), sc.ground_stations.size(),
                orbit::scenario_digest(sc).substr(0, 12).c_str());
    return 0;
}

// ---- precompute -------------------------------------------------------------

int cmd_precompute(const std::string& scenario_path, std::string trace_out, int workers) {
    Scenario sc = orbit::load_scenario(scenario_path);
    if (trace_out.empty()) trace_out = default_trace_path(scenario_path);
    int w = resolved_workers(workers);
    auto t0 = std::chrono::steady_clock::now();
    TraceFile tf = orbit::precompute(sc, w);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    orbit::write_trace(tf, trace_out);
    std::uintmax_t bytes = std::filesystem::file_size(trace_out);
    std::printf("wrote %s: %lld steps, %ju bytes, %.2fs with %d workers, digest %s\n",
                trace_out.c_str(), static_cast<long long>(tf.header.step_count), bytes, secs, w,
                tf.header.scenario_digest.substr(0, 12).c_str());
    return 0;
}

// ---- run --------------------------------------------------------------------

int cmd_run(const std::string& scenario_path, const std::string& trace_path,
            const std::string& backend_sel, double realtime_factor, int workers,
            const std::string& out_dir) {
    Scenario sc = orbit::load_scenario(scenario_path);
    TraceFile tf = obtain_trace(sc, trace_path, workers);
    auto backend = make_backend(backend_sel, sc);
    orbit::Engine engine(sc, tf, *backend);

    auto bring = engine.bring_up();
    std::printf("bring-up: %zu nodes in %.3fs, %zu links in %.3fs (backend %s)\n",
                bring.node_count, bring.node_phase_s, bring.link_count, bring.network_phase_s,
                backend->name().c_str());

    orbit::RunOptions opts;
    opts.realtime_factor = realtime_factor;
    opts.workers = resolved_workers(workers);
    auto reports = engine.run(opts);
    engine.tear_down();

    std::vector<double> lags;
    double total_ops = 0.0;
    for (const auto& r : reports) {
        lags.push_back(r.lag_ms);
        total_ops += static_cast<double>(r.ops);
    }
    if (!reports.empty()) {
        std::printf("run: %zu steps, %.0f ops, lag p50 %.2fms p99 %.2fms max %.2fms\n",
                    reports.size(), total_ops, orbit::percentile_nearest_rank(lags, 50.0),
                    orbit::percentile_nearest_rank(lags, 99.0),
                    *std::max_element(lags.begin(), lags.end()));
    } else {
        std::printf("run: 0 steps\n");
    }
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        orbit::write_step_reports_jsonl(reports, out_dir + "/steps.jsonl");
        orbit::write_run_summary_csv(reports, out_dir + "/run_summary.csv");
        std::printf("wrote %s/steps.jsonl and %s/run_summary.csv\n", out_dir.c_str(),
                    out_dir.c_str());
    }
    return 0;
}

// ---- bench ------------------------------------------------------------------

orbit::BackendFactory factory_for(const std::string& selector, const Scenario& sc) {
    return [selector, sc]() { return make_backend(selector, sc); };
}

int cmd_bench_bringup(const std::string& scenario_path, const std::string& preset,
                      std::vector<int> planes, const std::string& backend_sel,
                      const std::string& out) {
    Scenario base = load_base_scenario(scenario_path, preset);
    if (planes.empty()) planes = {1, 2, 5, 10};
    auto rows = orbit::bench_bringup(base, planes, factory_for(backend_sel, base));
    std::printf("%8s %8s %8s %12s %12s\n", "planes", "nodes", "links", "node_s", "network_s");
    for (const auto& r : rows) {
        std::printf("%8d %8zu %8zu %12.3f %12.3f\n", r.planes, r.nodes, r.links, r.node_phase_s,
                    r.network_phase_s);
    }
    if (!out.empty()) {
        orbit::write_bringup_csv(rows, out);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_bench_updates(const std::string& scenario_path, const std::string& preset,
                      std::vector<int> planes, const std::string& update_mode,
                      const std::string& backend_sel, double realtime_factor, int workers,
                      double duration_s, const std::string& out) {
    Scenario base = load_base_scenario(scenario_path, preset);
    override_timing(base, duration_s, -1.0);
    if (planes.empty()) planes = {5, 10, 20};
    auto mode = orbit::parse_update_mode(update_mode);
    auto rows = orbit::bench_updates(base, planes, mode, realtime_factor,
                                     resolved_workers(workers), factory_for(backend_sel, base));
    std::printf("%8s %8s %10s %10s %10s %10s %12s\n", "planes", "steps", "lag_p50", "lag_p99",
                "lag_max", "mean_ops", "compute_p99");
    for (const auto& r : rows) {
        std::printf("%8d %8zu %10.2f %10.2f %10.2f %10.1f %12.2f\n", r.planes, r.steps,
                    r.lag_p50_ms, r.lag_p99_ms, r.lag_max_ms, r.mean_ops, r.compute_p99_ms);
    }
    if (!out.empty()) {
        orbit::write_updates_csv(rows, out);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_bench_cpu(const std::string& scenario_path, const std::string& preset, double duration_s,
                  double interval_s, double realtime_factor, int workers,
                  const std::string& out) {
    Scenario sc = load_base_scenario(scenario_path, preset);
    double wall_s = duration_s > 0.0 ? duration_s : 30.0;
    double factor = realtime_factor > 0.0 ? realtime_factor : 1.0;
    // Size the scenario so the paced run covers exactly the sampling window.
    auto virtual_ms = static_cast<std::int64_t>(std::ceil(wall_s * factor * 1000.0));
    sc.duration_ms = std::max<std::int64_t>(sc.step_ms, (virtual_ms / sc.step_ms) * sc.step_ms);
    TraceFile tf = orbit::precompute(sc, resolved_workers(workers));

    orbit::SimParams params;
    params.gsl_contention = sc.gsl_contention;
    orbit::SimulatedBackend backend(params);
    orbit::Engine engine(sc, tf, backend);
    engine.bring_up();

    orbit::RunOptions opts;
    opts.realtime_factor = factor;
    opts.workers = resolved_workers(workers);
    std::thread runner([&engine, &opts]() { engine.run(opts); });
    auto series = orbit::sample_cpu({static_cast<int>(::getpid())}, interval_s, wall_s);
    runner.join();
    engine.tear_down();

    if (!series.supported) {
        std::printf("cpu sampling unsupported on this platform (no /proc)\n");
        return 0;
    }
    double peak = 0.0, mean = 0.0;
    for (const auto& s : series.samples) {
        double total = s.user_pct + s.system_pct;
        peak = std::max(peak, total);
        mean += total;
    }
    if (!series.samples.empty()) mean /= static_cast<double>(series.samples.size());
    std::printf("cpu: %zu samples over %.0fs, mean %.1f%% peak %.1f%% of one core\n",
                series.samples.size(), wall_s, mean, peak);
    if (!out.empty()) {
        orbit::write_cpu_csv(series, out);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

// ---- fidelity ---------------------------------------------------------------

int cmd_fidelity(const std::string& preset_name, double duration_s, const std::string& mode,
                 std::uint64_t seed, int workers, std::string out_dir) {
    orbit::ScenarioPreset preset = orbit::preset_by_name(preset_name);
    override_timing(preset.scenario, duration_s, -1.0);
    preset.fidelity.mode = mode == "star" ? orbit::TopologyMode::star : orbit::TopologyMode::grid;
    preset.fidelity.seed = seed;
    preset.fidelity.workers = resolved_workers(workers);

    TraceFile tf = orbit::precompute(preset.scenario, preset.fidelity.workers);
    orbit::FidelityResult result = orbit::fidelity_run(preset.scenario, tf, preset.fidelity);

    std::vector<double> rtts_ms;
    double up_sum = 0.0, down_sum = 0.0;
    std::size_t up_n = 0, down_n = 0;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& rec = result.records[i];
        if (rec.kind == orbit::MeasKind::ping) {
            for (const auto& s : rec.series) rtts_ms.push_back(s.value / 1000.0);
        } else {
            for (const auto& s : rec.series) {
                if (result.meta[i].direction == "uplink") {
                    up_sum += s.value;
                    ++up_n;
                } else {
                    down_sum += s.value;
                    ++down_n;
                }
            }
        }
    }
    std::printf("fidelity %s (%s mode): %zu records, %zu handovers\n", preset_name.c_str(),
                mode.c_str(), result.records.size(), result.handovers.size());
    if (!rtts_ms.empty()) {
        std::printf("  ping: %zu echoes, rtt p50 %.3fms p99 %.3fms\n", rtts_ms.size(),
                    orbit::percentile_nearest_rank(rtts_ms, 50.0),
                    orbit::percentile_nearest_rank(rtts_ms, 99.0));
    }
    if (up_n > 0)
        std::printf("  uplink goodput mean %.2f Mbit/s over %zu intervals\n",
                    up_sum / static_cast<double>(up_n), up_n);
    if (down_n > 0)
        std::printf("  downlink goodput mean %.2f Mbit/s over %zu intervals\n",
                    down_sum / static_cast<double>(down_n), down_n);

    if (out_dir.empty()) out_dir = "fidelity-" + preset_name;
    ensure_dir(out_dir);
    orbit::write_measurements_csv(result.records, out_dir + "/measurements.csv");
    orbit::write_handovers_csv(result.handovers, out_dir + "/handovers.csv");
    orbit::write_sessions_jsonl(result, out_dir + "/sessions.jsonl");
    std::printf("wrote %s/{measurements.csv,handovers.csv,sessions.jsonl}\n", out_dir.c_str());
    return 0;
}

// ---- export-viz -------------------------------------------------------------

int cmd_export_viz(const std::string& scenario_path, const std::string& trace_path,
                   std::string out, double sample_every_s, int workers) {
    Scenario sc = orbit::load_scenario(scenario_path);
    TraceFile tf = obtain_trace(sc, trace_path, workers);
    if (out.empty()) {
        std::filesystem::path p(scenario_path);
        p.replace_extension(".czml");
        out = p.string();
    }
    auto every_ms = static_cast<std::int64_t>(std::llround(sample_every_s * 1000.0));
    orbit::write_viz_czml(sc, tf, every_ms, out);
    std::printf("wrote %s (%ju bytes)\n", out.c_str(), std::filesystem::file_size(out));
    return 0;
}

// ---- validate ---------------------------------------------------------------

int cmd_validate(const std::string& scenario_path, const std::string& trace_path) {
    Scenario sc = orbit::load_scenario(scenario_path);
    orbit::validate_scenario(sc);
    if (!trace_path.empty()) {
        TraceFile tf = orbit::read_trace(trace_path, sc);
        std::printf("ok: scenario %s and trace %s agree (digest %s, %lld steps)\n",
                    scenario_path.c_str(), trace_path.c_str(),
                    tf.header.scenario_digest.substr(0, 12).c_str(),
                    static_cast<long long>(tf.header.step_count));
    } else {
        std::printf("ok: scenario %s (digest %s, %d satellites, %lld steps)\n",
                    scenario_path.c_str(), orbit::scenario_digest(sc).substr(0, 12).c_str(),
                    sc.total_satellites(), static_cast<long long>(sc.step_count()));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"satellite constellation network emulation pipeline"};
    app.require_subcommand(1);
    app.set_config("--config");
    app.set_version_flag("--version", "orbitemu 1.0");

    std::string scenario_path, trace_path, preset, out;
    std::string backend_sel = "simulated";
    std::string update_mode = "trace";
    std::string topo_mode = "grid";
    std::vector<int> planes;
    int workers = 0;
    double realtime_factor = 1.0;
    double duration_s = -1.0;
    double step_s = -1.0;
    double sample_every_s = 30.0;
    double interval_s = 1.0;
    std::uint64_t seed = 1;

    auto preset_validator = CLI::IsMember(orbit::preset_names());

    auto* gen = app.add_subcommand("gen", "write a scenario JSON file");
    gen->add_option("--preset", preset, "built-in scenario preset")->check(preset_validator);
    gen->add_option("--scenario", scenario_path, "input scenario to normalize")
        ->check(CLI::ExistingFile);
    gen->add_option("--out", out, "output path (default <preset>.json or stdout)");
    gen->add_option("--duration", duration_s, "override duration, seconds");
    gen->add_option("--step", step_s, "override step, seconds");

    auto* pre = app.add_subcommand("precompute", "evaluate a scenario into a trace");
    pre->add_option("--scenario", scenario_path, "scenario JSON")
        ->required()
        ->check(CLI::ExistingFile);
    pre->add_option("--trace", trace_path, "output trace path (default <scenario>.trace.jsonl)");
    pre->add_option("--workers", workers, "threads for snapshot evaluation (0 = all cores)");

    auto* run = app.add_subcommand("run", "replay a trace against a backend");
    run->add_option("--scenario", scenario_path, "scenario JSON")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--trace", trace_path, "trace file (precomputed in-process when omitted)");
    run->add_option("--backend", backend_sel, "recording|simulated|linux");
    run->add_option("--realtime-factor", realtime_factor,
                    "virtual seconds per wall second; <= 0 runs unpaced");
    run->add_option("--workers", workers, "threads for link batches");
    run->add_option("--out", out, "directory for steps.jsonl and run_summary.csv");

    auto* bench = app.add_subcommand("bench", "measurement harnesses");
    bench->require_subcommand(1);
    auto* bb = bench->add_subcommand("bringup", "bring-up time vs constellation size");
    bb->add_option("--scenario", scenario_path, "base scenario")->check(CLI::ExistingFile);
    bb->add_option("--preset", preset, "base preset when no scenario given")
        ->check(preset_validator);
    bb->add_option("--planes", planes, "plane counts to sweep")->delimiter(',');
    bb->add_option("--backend", backend_sel, "recording|simulated|linux");
    bb->add_option("--out", out, "CSV output path");

    auto* bu = bench->add_subcommand("updates", "per-step update lag vs constellation size");
    bu->add_option("--scenario", scenario_path, "base scenario")->check(CLI::ExistingFile);
    bu->add_option("--preset", preset, "base preset when no scenario given")
        ->check(preset_validator);
    bu->add_option("--planes", planes, "plane counts to sweep")->delimiter(',');
    bu->add_option("--update-mode", update_mode, "trace|online");
    bu->add_option("--backend", backend_sel, "recording|simulated|linux");
    bu->add_option("--realtime-factor", realtime_factor, "pacing factor for the sweep");
    bu->add_option("--workers", workers, "threads for link batches");
    bu->add_option("--duration", duration_s, "override virtual duration, seconds");
    bu->add_option("--out", out, "CSV output path");

    auto* bc = bench->add_subcommand("cpu", "CPU utilization while replaying");
    bc->add_option("--scenario", scenario_path, "base scenario")->check(CLI::ExistingFile);
    bc->add_option("--preset", preset, "base preset when no scenario given")
        ->check(preset_validator);
    bc->add_option("--duration", duration_s, "sampling window, wall seconds (default 30)");
    bc->add_option("--interval", interval_s, "sampling interval, seconds");
    bc->add_option("--realtime-factor", realtime_factor, "pacing factor for the replay");
    bc->add_option("--workers", workers, "threads for link batches");
    bc->add_option("--out", out, "CSV output path");

    auto* fid = app.add_subcommand("fidelity", "virtual-time measurement campaign");
    fid->require_subcommand(1);
    std::string fid_name;
    for (const auto& name : orbit::preset_names()) {
        auto* sub = fid->add_subcommand(name, "run the " + name + " experiment");
        sub->parse_complete_callback([&fid_name, name]() { fid_name = name; });
        sub->add_option("--duration", duration_s, "override virtual duration, seconds");
        sub->add_option("--mode", topo_mode, "grid|star routing")
            ->check(CLI::IsMember({"grid", "star"}));
        sub->add_option("--seed", seed, "measurement RNG seed");
        sub->add_option("--workers", workers, "threads for precompute");
        sub->add_option("--out", out, "output directory (default fidelity-<preset>)");
    }

    auto* viz = app.add_subcommand("export-viz", "write a CZML visualization document");
    viz->add_option("--scenario", scenario_path, "scenario JSON")
        ->required()
        ->check(CLI::ExistingFile);
    viz->add_option("--trace", trace_path, "trace file (precomputed in-process when omitted)");
    viz->add_option("--out", out, "output path (default <scenario>.czml)");
    viz->add_option("--sample-every", sample_every_s, "position sample spacing, seconds");
    viz->add_option("--workers", workers, "threads for in-process precompute");

    auto* val = app.add_subcommand("validate", "check scenario schema and trace digest");
    val->add_option("--scenario", scenario_path, "scenario JSON")
        ->required()
        ->check(CLI::ExistingFile);
    val->add_option("--trace", trace_path, "trace to verify against the scenario")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
        if (gen->parsed()) {
            if (preset.empty() && scenario_path.empty()) {
                throw orbit::ConfigError("gen needs --preset or --scenario");
            }
            return cmd_gen(preset, scenario_path, out, duration_s, step_s);
        }
        if (pre->parsed()) return cmd_precompute(scenario_path, trace_path, workers);
        if (run->parsed()) {
            return cmd_run(scenario_path, trace_path, backend_sel, realtime_factor, workers, out);
        }
        if (bb->parsed()) {
            if (preset.empty() && scenario_path.empty()) preset = "wetlinks";
            return cmd_bench_bringup(scenario_path, preset, planes, backend_sel, out);
        }
        if (bu->parsed()) {
            if (preset.empty() && scenario_path.empty()) preset = "wetlinks";
            return cmd_bench_updates(scenario_path, preset, planes, update_mode, backend_sel,
                                     realtime_factor, workers, duration_s, out);
        }
        if (bc->parsed()) {
            if (preset.empty() && scenario_path.empty()) preset = "wetlinks";
            return cmd_bench_cpu(scenario_path, preset, duration_s, interval_s, realtime_factor,
                                 workers, out);
        }
        if (fid->parsed()) {
            return cmd_fidelity(fid_name, duration_s, topo_mode, seed, workers, out);
        }
        if (viz->parsed()) {
            return cmd_export_viz(scenario_path, trace_path, out, sample_every_s, workers);
        }
        if (val->parsed()) return cmd_validate(scenario_path, trace_path);
        throw orbit::ConfigError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        print_error_json("config", e.what());
        return 2;
    } catch (const orbit::ConfigError& e) {
        print_error_json("config", e.what());
        return 2;
    } catch (const orbit::IoError& e) {
        print_error_json("io", e.what());
        return 3;
    } catch (const orbit::BackendError& e) {
        print_error_json("backend", e.what());
        return 4;
    } catch (const orbit::BudgetError& e) {
        print_error_json("budget", e.what());
        return 5;
    } catch (const std::exception& e) {
        print_error_json("internal", e.what());
        return 1;
    }
}
