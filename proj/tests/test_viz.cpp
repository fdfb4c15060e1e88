#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "orbit/bench.hpp"
#include "orbit/errors.hpp"
#include "orbit/geo.hpp"
#include "orbit/presets.hpp"
#include "orbit/trace.hpp"
#include "orbit/viz.hpp"

using namespace orbit;
using nlohmann::json;

namespace {

Scenario viz_scenario(int planes, std::int64_t duration_ms) {
    Scenario sc = with_planes(scenario_wetlinks().scenario, planes);
    sc.duration_ms = duration_ms;
    return sc;
}

json export_parsed(const Scenario& sc, const TraceFile& t, std::int64_t sample_ms) {
    return json::parse(export_viz_czml(sc, t, sample_ms));
}

std::string iso_offset(const Scenario& sc, double offset_s) {
    return iso8601_string(utc_plus_seconds(parse_iso8601_utc(sc.epoch_utc), offset_s));
}

}  // namespace

TEST_CASE("document packet carries the run clock") {
    Scenario sc = viz_scenario(2, 60000);
    TraceFile t = precompute(sc, 1);
    json doc = export_parsed(sc, t, 30000);

    REQUIRE(doc.is_array());
    REQUIRE_FALSE(doc.empty());
    const json& head = doc[0];
    CHECK(head.at("id") == "document");
    CHECK(head.at("version") == "1.0");
    const std::string span = iso_offset(sc, 0.0) + "/" + iso_offset(sc, 60.0);
    CHECK(head.at("clock").at("interval") == span);
    CHECK(head.at("clock").at("currentTime") == iso_offset(sc, 0.0));
}

TEST_CASE("each satellite gets time-tagged geodetic positions") {
    Scenario sc = viz_scenario(2, 60000);
    TraceFile t = precompute(sc, 1);
    json doc = export_parsed(sc, t, 30000);

    std::size_t sat_packets = 0;
    for (const auto& p : doc) {
        const std::string id = p.value("id", "");
        if (id.rfind("s0.", 0) != 0) continue;
        ++sat_packets;
        const json& pos = p.at("position");
        CHECK(pos.at("epoch") == iso_offset(sc, 0.0));
        CHECK(pos.at("interpolationDegree") == 1);
        const json& deg = pos.at("cartographicDegrees");
        // Samples at t = 0, 30, 60 -> three (t, lon, lat, alt) tuples.
        REQUIRE(deg.size() == 12u);
        CHECK(deg[0].get<double>() == 0.0);
        CHECK(deg[4].get<double>() == 30.0);
        CHECK(deg[8].get<double>() == 60.0);
        for (std::size_t i = 0; i < deg.size(); i += 4) {
            const double lon = deg[i + 1].get<double>();
            const double lat = deg[i + 2].get<double>();
            const double alt = deg[i + 3].get<double>();
            CHECK(lon >= -180.0);
            CHECK(lon < 180.0);
            CHECK(lat >= -90.0);
            CHECK(lat <= 90.0);
            CHECK(alt == doctest::Approx(550000.0).epsilon(0.01));
        }
        CHECK(p.at("availability") == iso_offset(sc, 0.0) + "/" + iso_offset(sc, 60.0));
    }
    CHECK(sat_packets == 44u);
}

TEST_CASE("sampling every step yields step_count+1 samples") {
    Scenario sc = viz_scenario(1, 25000);  // 5 steps of 5 s
    TraceFile t = precompute(sc, 1);
    json doc = export_parsed(sc, t, sc.step_ms);
    bool saw_sat = false;
    for (const auto& p : doc) {
        if (p.value("id", "").rfind("s0.", 0) != 0) continue;
        saw_sat = true;
        CHECK(p.at("position").at("cartographicDegrees").size() == 4u * 6u);
    }
    CHECK(saw_sat);
}

TEST_CASE("one satellite sampled twice is the smallest useful export") {
    Scenario sc = viz_scenario(1, 5000);
    TraceFile t = precompute(sc, 1);
    json doc = export_parsed(sc, t, 5000);
    std::size_t tuples = 0;
    for (const auto& p : doc) {
        if (p.value("id", "") != "s0.0.0") continue;
        tuples = p.at("position").at("cartographicDegrees").size() / 4;
    }
    CHECK(tuples == 2u);
}

TEST_CASE("ground stations are static points with their configured location") {
    Scenario sc = viz_scenario(2, 60000);
    TraceFile t = precompute(sc, 1);
    json doc = export_parsed(sc, t, 30000);

    std::size_t gs_packets = 0;
    for (const auto& p : doc) {
        const std::string id = p.value("id", "");
        if (id.size() < 2 || id[0] != 'g' || !isdigit(static_cast<unsigned char>(id[1]))) continue;
        ++gs_packets;
        const json& deg = p.at("position").at("cartographicDegrees");
        REQUIRE(deg.size() == 3u);
        const int idx = id[1] - '0';
        const auto& cfg = sc.ground_stations[static_cast<std::size_t>(idx)];
        CHECK(deg[0].get<double>() == doctest::Approx(cfg.location.lon_deg));
        CHECK(deg[1].get<double>() == doctest::Approx(cfg.location.lat_deg));
        CHECK(p.contains("name"));
        CHECK_FALSE(p.at("position").contains("epoch"));
    }
    CHECK(gs_packets == 2u);
}

TEST_CASE("link polylines reference existing entities and mirror lifetimes") {
    Scenario sc = viz_scenario(10, 600000);
    TraceFile t = precompute(sc, 4);
    json doc = export_parsed(sc, t, 60000);

    std::map<std::string, const json*> by_id;
    for (const auto& p : doc) by_id[p.value("id", "")] = &p;

    const std::string full_span = iso_offset(sc, 0.0) + "/" + iso_offset(sc, 600.0);
    std::size_t link_packets = 0;
    std::size_t partial_lifetime = 0;
    for (const auto& p : doc) {
        const std::string id = p.value("id", "");
        if (id.rfind("link-", 0) != 0) continue;
        ++link_packets;

        const json& refs = p.at("polyline").at("positions").at("references");
        REQUIRE(refs.size() == 2u);
        for (const auto& r : refs) {
            const std::string ref = r.get<std::string>();
            const auto hash = ref.find('#');
            REQUIRE(hash != std::string::npos);
            CHECK(ref.substr(hash + 1) == "position");
            CHECK(by_id.count(ref.substr(0, hash)) == 1u);
        }

        const json& avail = p.at("availability");
        REQUIRE(avail.is_array());
        REQUIRE_FALSE(avail.empty());
        for (const auto& interval : avail) {
            const std::string s = interval.get<std::string>();
            CHECK(s.find('/') != std::string::npos);
            if (s != full_span) ++partial_lifetime;
        }
    }
    // Every link ever present appears once; handovers leave at least one GSL
    // with an availability shorter than the run.
    std::map<std::string, bool> ever;
    for (const auto& d : t.diffs)
        for (const auto& [key, props] : d.links_added)
            ever["link-" + node_name(key.a) + "-" + node_name(key.b)] = true;
    CHECK(link_packets == ever.size());
    CHECK(partial_lifetime > 0u);

    // A GSL removed mid-run closes its interval exactly on the step boundary.
    const double step_s = static_cast<double>(sc.step_ms) / 1000.0;
    bool checked_removal = false;
    for (const auto& d : t.diffs) {
        if (checked_removal) break;
        for (const auto& key : d.links_removed) {
            if (!key.is_gsl()) continue;
            const std::string id = "link-" + node_name(key.a) + "-" + node_name(key.b);
            REQUIRE(by_id.count(id) == 1u);
            const json& avail = by_id[id]->at("availability");
            const std::string expect_end =
                iso_offset(sc, static_cast<double>(d.step_index) * step_s);
            const std::string first = avail[0].get<std::string>();
            CHECK(first.substr(first.find('/') + 1) == expect_end);
            checked_removal = true;
            break;
        }
    }
    CHECK(checked_removal);
}

TEST_CASE("invalid sampling interval is rejected") {
    Scenario sc = viz_scenario(1, 5000);
    TraceFile t = precompute(sc, 1);
    CHECK_THROWS_AS(export_viz_czml(sc, t, 0), ConfigError);
    CHECK_THROWS_AS(export_viz_czml(sc, t, -5), ConfigError);
}

TEST_CASE("file writer emits the same bytes as the exporter") {
    namespace fs = std::filesystem;
    Scenario sc = viz_scenario(1, 10000);
    TraceFile t = precompute(sc, 1);
    fs::path dir = fs::temp_directory_path() / "orbit_viz_test";
    fs::create_directories(dir);
    const std::string path = (dir / "out.czml").string();
    write_viz_czml(sc, t, 5000, path);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(bytes == export_viz_czml(sc, t, 5000));
    CHECK_FALSE(json::parse(bytes).empty());
    fs::remove_all(dir);
}
