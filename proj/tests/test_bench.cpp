#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>
#include <vector>

#include "doctest.h"
#include "orbit/bench.hpp"
#include "orbit/errors.hpp"
#include "orbit/presets.hpp"
#include "orbit/recording_backend.hpp"
#include "orbit/simulated_backend.hpp"

using namespace orbit;

namespace {

Scenario bench_base(std::int64_t duration_ms) {
    Scenario sc = scenario_wetlinks().scenario;
    sc.duration_ms = duration_ms;
    return sc;
}

}  // namespace

TEST_CASE("nearest-rank percentile") {
    std::vector<double> v;
    for (int i = 100; i >= 1; --i) v.push_back(static_cast<double>(i));  // unsorted on purpose

    CHECK(percentile_nearest_rank(v, 50.0) == 50.0);
    CHECK(percentile_nearest_rank(v, 99.0) == 99.0);
    CHECK(percentile_nearest_rank(v, 100.0) == 100.0);
    CHECK(percentile_nearest_rank(v, 1.0) == 1.0);
    CHECK(percentile_nearest_rank(v, 0.5) == 1.0);  // rank clamps to the first value

    CHECK(percentile_nearest_rank({10.0, 30.0, 20.0}, 50.0) == 20.0);
    CHECK(percentile_nearest_rank({10.0, 30.0, 20.0}, 33.3) == 10.0);
    CHECK(percentile_nearest_rank({10.0, 30.0, 20.0}, 33.4) == 20.0);
    CHECK(percentile_nearest_rank({7.5}, 99.0) == 7.5);
    CHECK(percentile_nearest_rank({}, 50.0) == 0.0);
}

TEST_CASE("with_planes resizes the first shell and widens the budget") {
    Scenario base = bench_base(60000);
    Scenario big = with_planes(base, 40);
    CHECK(big.shells[0].planes == 40);
    CHECK(big.total_nodes() == 40 * 22 + 2);
    CHECK(big.budget.max_nodes >= big.total_nodes());
    // Partial arc: 40*22 intra-plane plus 39*22 inter-plane pairs, plus GSLs.
    CHECK(big.budget.max_links >= 40 * 22 + 39 * 22 + 2);
    CHECK(scenario_digest(big) != scenario_digest(base));

    // Shrinking keeps the original budget (it only ever widens).
    Scenario small = with_planes(base, 2);
    CHECK(small.budget.max_nodes == base.budget.max_nodes);

    Scenario empty;
    empty.shells.clear();
    CHECK_THROWS_AS(with_planes(empty, 5), ConfigError);
}

TEST_CASE("bring-up sweep reports sizes and phase durations per row") {
    Scenario base = bench_base(3600000);  // duration is ignored: build only
    LatencyModel lat;
    lat.constant_us = 1000.0;
    int made = 0;
    BackendFactory factory = [&]() {
        ++made;
        return std::make_unique<RecordingBackend>(lat);
    };

    auto rows = bench_bringup(base, {2, 3}, factory);
    CHECK(made == 2);
    REQUIRE(rows.size() == 2u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int planes = rows[i].planes;
        CHECK(planes == (i == 0 ? 2 : 3));
        CHECK(rows[i].nodes == static_cast<std::size_t>(planes * 22 + 2));
        CHECK(rows[i].links == static_cast<std::size_t>(planes * 22 + (planes - 1) * 22 + 2));
        // Recording backend sleeps 1 ms per op; bring-up issues create+start
        // per node and one add per link, so the phases have hard floors.
        CHECK(rows[i].node_phase_s >= 0.9 * 2e-3 * static_cast<double>(rows[i].nodes));
        CHECK(rows[i].node_phase_s <= 10.0 * 2e-3 * static_cast<double>(rows[i].nodes));
        CHECK(rows[i].network_phase_s >= 0.9 * 1e-3 * static_cast<double>(rows[i].links));
    }
    CHECK(rows[1].nodes > rows[0].nodes);
}

TEST_CASE("update sweep paces steps and summarizes lag") {
    Scenario base = bench_base(60000);  // 12 steps of 5 s
    BackendFactory factory = [] { return std::make_unique<SimulatedBackend>(); };

    auto rows = bench_updates(base, {2, 3}, UpdateMode::trace, 250.0, 1, factory);
    REQUIRE(rows.size() == 2u);
    for (const auto& r : rows) {
        CHECK(r.steps == 12u);
        CHECK(r.lag_p50_ms <= r.lag_p99_ms);
        CHECK(r.lag_p99_ms <= r.lag_max_ms);
        CHECK(r.lag_p50_ms >= 0.0);
        CHECK(r.mean_ops >= 0.0);
        CHECK(r.compute_p99_ms == 0.0);  // trace mode does no per-step compute
    }

    auto online = bench_updates(base, {2}, UpdateMode::online, 250.0, 1, factory);
    REQUIRE(online.size() == 1u);
    CHECK(online[0].steps == 12u);
    CHECK(online[0].compute_p99_ms > 0.0);
}

TEST_CASE("update mode names parse") {
    CHECK(parse_update_mode("trace") == UpdateMode::trace);
    CHECK(parse_update_mode("online") == UpdateMode::online);
    CHECK_THROWS_AS(parse_update_mode("hybrid"), ConfigError);
}

TEST_CASE("csv writers emit the documented headers") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "orbit_bench_test";
    fs::create_directories(dir);

    BringupRow br;
    br.planes = 5;
    br.nodes = 112;
    br.links = 200;
    br.node_phase_s = 0.25;
    br.network_phase_s = 0.5;
    const std::string bpath = (dir / "bringup.csv").string();
    write_bringup_csv({br}, bpath);
    std::ifstream bin(bpath);
    std::string line;
    REQUIRE(std::getline(bin, line));
    CHECK(line == "planes,nodes,links,node_phase_s,network_phase_s,total_s");
    REQUIRE(std::getline(bin, line));
    CHECK(line == "5,112,200,0.250000,0.500000,0.750000");

    UpdateRow ur;
    ur.planes = 10;
    ur.steps = 7;
    const std::string upath = (dir / "updates.csv").string();
    write_updates_csv({ur}, upath);
    std::ifstream uin(upath);
    REQUIRE(std::getline(uin, line));
    CHECK(line == "planes,steps,lag_p50_ms,lag_p99_ms,lag_max_ms,mean_ops,compute_p99_ms");
    REQUIRE(std::getline(uin, line));
    CHECK(line.rfind("10,7,", 0) == 0);

    CpuSeries cs;
    cs.samples.push_back(CpuSample{1.0, 50.0, 25.0});
    const std::string cpath = (dir / "cpu.csv").string();
    write_cpu_csv(cs, cpath);
    std::ifstream cin_(cpath);
    REQUIRE(std::getline(cin_, line));
    CHECK(line == "t_s,user_pct,system_pct");
    REQUIRE(std::getline(cin_, line));
    CHECK(line == "1.000,50.000,25.000");
    fs::remove_all(dir);
}

TEST_CASE("machine-wide cpu sampling works on this platform") {
    CpuSeries series = sample_cpu({}, 0.05, 0.15);
    REQUIRE(series.supported);
    CHECK_FALSE(series.truncated);
    REQUIRE(series.samples.size() >= 2u);
    for (const auto& s : series.samples) {
        CHECK(s.user_pct >= 0.0);
        CHECK(s.system_pct >= 0.0);
        CHECK(s.user_pct + s.system_pct <= 101.0);  // fractions of total machine ticks
        CHECK(s.t_s > 0.0);
    }
}

TEST_CASE("per-process cpu sampling tracks a busy process") {
    std::atomic<bool> stop{false};
    std::thread burner([&] {
        volatile double sink = 1.0;
        while (!stop.load(std::memory_order_relaxed)) sink = sink * 1.0000001 + 1e-9;
    });

    CpuSeries series = sample_cpu({static_cast<int>(getpid())}, 0.1, 0.4);
    stop.store(true);
    burner.join();

    REQUIRE(series.supported);
    REQUIRE_FALSE(series.samples.empty());
    double peak = 0.0;
    for (const auto& s : series.samples) peak = std::max(peak, s.user_pct + s.system_pct);
    CHECK(peak > 25.0);  // the spinner alone should saturate a good chunk of one core
}

TEST_CASE("cpu sampling flags unknown processes") {
    CpuSeries series = sample_cpu({99999999}, 0.05, 0.1);
    CHECK_FALSE(series.supported);
    CHECK(series.samples.empty());
}
