#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "orbit/engine.hpp"
#include "orbit/scenario.hpp"

namespace orbit {

using BackendFactory = std::function<std::unique_ptr<BackendOps>()>;

/// Nearest-rank percentile (p in (0,100]); values need not be sorted.
double percentile_nearest_rank(std::vector<double> values, double p);

/// Copy `base` with the first shell resized to `planes` planes and the
/// budget widened to fit; benchmarks sweep constellation size this way.
Scenario with_planes(const Scenario& base, int planes);

struct BringupRow {
    int planes{0};
    std::size_t nodes{0};
    std::size_t links{0};
    double node_phase_s{0.0};
    double network_phase_s{0.0};
};

/// Bring-up cost per constellation size: full build only (duration forced to
/// zero), fresh backend per row, torn down afterwards.
std::vector<BringupRow> bench_bringup(const Scenario& base, const std::vector<int>& plane_counts,
                                      const BackendFactory& make_backend);

enum class UpdateMode { trace, online };

UpdateMode parse_update_mode(const std::string& s);

struct UpdateRow {
    int planes{0};
    std::size_t steps{0};
    double lag_p50_ms{0.0};
    double lag_p99_ms{0.0};
    double lag_max_ms{0.0};
    double mean_ops{0.0};
    double compute_p99_ms{0.0};  // online mode: per-step snapshot+diff time
};

/// Update-lag sweep. trace mode replays a precomputed trace on the wall
/// clock; online mode computes each step's snapshot and diff on the fly
/// inside the paced loop, which is the pattern whose cost grows with
/// constellation size.
std::vector<UpdateRow> bench_updates(const Scenario& base, const std::vector<int>& plane_counts,
                                     UpdateMode mode, double realtime_factor, int workers,
                                     const BackendFactory& make_backend);

void write_bringup_csv(const std::vector<BringupRow>& rows, const std::string& path);
void write_updates_csv(const std::vector<UpdateRow>& rows, const std::string& path);

struct CpuSample {
    double t_s{0.0};
    double user_pct{0.0};    // percent of one core
    double system_pct{0.0};
};

struct CpuSeries {
    bool supported{true};   // false off-Linux (no /proc)
    bool truncated{false};  // a sampled process exited before duration_s
    std::vector<CpuSample> samples;
};

/// Sample CPU usage every interval_s for duration_s: whole machine when
/// `pids` is empty (/proc/stat), otherwise the given processes summed
/// (/proc/<pid>/stat). Blocks for the duration.
CpuSeries sample_cpu(const std::vector<int>& pids, double interval_s, double duration_s);

void write_cpu_csv(const CpuSeries& series, const std::string& path);

}  // namespace orbit
