// Compares the serial reference precompute against the OpenMP kernel:
// wall time per worker count, speedup over the reference, and a byte-level
// identity check of the serialized traces (the kernel must be a pure
// optimization). Exits nonzero if any parallel run diverges.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orbit/errors.hpp"
#include "orbit/presets.hpp"
#include "orbit/scenario.hpp"
#include "orbit/trace.hpp"

namespace {

double time_once(const std::function<orbit::TraceFile()>& fn, std::string& bytes_out) {
    auto t0 = std::chrono::steady_clock::now();
    orbit::TraceFile tf = fn();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bytes_out = orbit::serialize_trace(tf);
    return secs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial-vs-parallel trace precompute benchmark"};
    std::string preset = "wetlinks";
    std::string scenario_path;
    std::vector<int> worker_counts{1, 2, 4, 8};
    double duration_s = -1.0;
    app.add_option("--preset", preset, "built-in scenario preset");
    app.add_option("--scenario", scenario_path, "scenario JSON instead of a preset")
        ->check(CLI::ExistingFile);
    app.add_option("--workers", worker_counts, "worker counts to sweep")->delimiter(',');
    app.add_option("--duration", duration_s, "override virtual duration, seconds");
    CLI11_PARSE(app, argc, argv);

    try {
        orbit::Scenario sc = scenario_path.empty() ? orbit::preset_by_name(preset).scenario
                                                   : orbit::load_scenario(scenario_path);
        if (duration_s > 0.0) sc.duration_ms = static_cast<std::int64_t>(duration_s * 1000.0);

        std::printf("scenario: %d satellites, %lld steps of %lldms\n", sc.total_satellites(),
                    static_cast<long long>(sc.step_count()), static_cast<long long>(sc.step_ms));

        std::string reference_bytes;
        double ref_secs =
            time_once([&sc]() { return orbit::precompute_reference(sc); }, reference_bytes);
        std::printf("%-22s %10.3fs %10s %10s\n", "serial reference", ref_secs, "1.00x", "-");

        bool all_identical = true;
        for (int w : worker_counts) {
            std::string bytes;
            double secs = time_once([&sc, w]() { return orbit::precompute(sc, w); }, bytes);
            bool same = bytes == reference_bytes;
            all_identical = all_identical && same;
            char label[32];
            std::snprintf(label, sizeof(label), "parallel w=%d", w);
            std::printf("%-22s %10.3fs %9.2fx %10s\n", label, secs,
                        secs > 0.0 ? ref_secs / secs : 0.0, same ? "identical" : "DIVERGED");
        }
        std::printf("trace size: %zu bytes\n", reference_bytes.size());
        if (!all_identical) {
            std::fprintf(stderr, "error: parallel output differs from the serial reference\n");
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
