#include "orbit/viz.hpp"

#include <fstream>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "orbit/errors.hpp"
#include "orbit/topology.hpp"

namespace orbit {

using nlohmann::json;

namespace {

struct LinkSpans {
    std::vector<std::pair<double, double>> closed;
    double open_since{-1.0};
};

std::string iso_at(const UtcTime& epoch, double offset_s) {
    return iso8601_string(utc_plus_seconds(epoch, offset_s));
}

}  // namespace

std::string export_viz_czml(const Scenario& scenario, const TraceFile& trace,
                            std::int64_t sample_every_ms) {
    if (sample_every_ms <= 0) throw ConfigError("sample_every_ms must be positive");
    const UtcTime epoch = parse_iso8601_utc(scenario.epoch_utc);
    const double end_s = static_cast<double>(scenario.duration_ms) / 1000.0;
    const std::string start_iso = iso_at(epoch, 0.0);
    const std::string end_iso = iso_at(epoch, end_s);
    const std::string span = start_iso + "/" + end_iso;

    json doc = json::array();
    doc.push_back(json{{"id", "document"},
                       {"name", "constellation"},
                       {"version", "1.0"},
                       {"clock",
                        json{{"interval", span},
                             {"currentTime", start_iso},
                             {"multiplier", 60},
                             {"range", "LOOP_STOP"}}}});

    // Satellite position samples: CZML cartographicDegrees with per-sample
    // time offsets in seconds relative to "epoch".
    ScenarioModel model(scenario);
    const auto& sats = model.satellites();
    std::vector<json> samples(sats.size(), json::array());
    for (std::int64_t t_ms = 0; t_ms <= scenario.duration_ms; t_ms += sample_every_ms) {
        const std::vector<EcefPos> positions = model.positions_at(t_ms);
        const double t_s = static_cast<double>(t_ms) / 1000.0;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const GeodeticCoord g = ecef_to_geodetic(positions[i]);
            samples[i].push_back(t_s);
            samples[i].push_back(g.lon_deg);
            samples[i].push_back(g.lat_deg);
            samples[i].push_back(g.alt_m);
        }
    }
    for (std::size_t i = 0; i < sats.size(); ++i) {
        const std::string id = node_name(NodeRef::satellite(sats[i].first));
        doc.push_back(json{{"id", id},
                           {"availability", span},
                           {"position",
                            json{{"epoch", start_iso},
                                 {"interpolationDegree", 1},
                                 {"cartographicDegrees", std::move(samples[i])}}},
                           {"point", json{{"pixelSize", 4}}}});
    }

    for (std::size_t i = 0; i < scenario.ground_stations.size(); ++i) {
        const auto& gs = scenario.ground_stations[i];
        doc.push_back(
            json{{"id", node_name(NodeRef::ground(static_cast<int>(i)))},
                 {"name", gs.name},
                 {"availability", span},
                 {"position",
                  json{{"cartographicDegrees",
                        json::array({gs.location.lon_deg, gs.location.lat_deg,
                                     gs.location.alt_m})}}},
                 {"point", json{{"pixelSize", 6}}}});
    }

    // Link lifetimes: walk the diffs, opening a span on add and closing on
    // remove; anything still open runs to the end of the trace.
    std::map<LinkKey, LinkSpans> spans;
    const double step_s = static_cast<double>(trace.header.step_ms) / 1000.0;
    for (const auto& d : trace.diffs) {
        const double t = static_cast<double>(d.step_index) * step_s;
        for (const auto& key : d.links_removed) {
            auto& s = spans[key];
            if (s.open_since >= 0.0) {
                s.closed.emplace_back(s.open_since, t);
                s.open_since = -1.0;
            }
        }
        for (const auto& [key, props] : d.links_added) spans[key].open_since = t;
    }
    const double trace_end_s = static_cast<double>(trace.header.step_count) * step_s;
    for (auto& [key, s] : spans) {
        if (s.open_since >= 0.0) {
            s.closed.emplace_back(s.open_since, trace_end_s);
            s.open_since = -1.0;
        }
    }
    for (const auto& [key, s] : spans) {
        if (s.closed.empty()) continue;
        json availability = json::array();
        for (const auto& [from, to] : s.closed)
            availability.push_back(iso_at(epoch, from) + "/" + iso_at(epoch, to));
        const std::string a = node_name(key.a);
        const std::string b = node_name(key.b);
        doc.push_back(json{{"id", "link-" + a + "-" + b},
                           {"availability", std::move(availability)},
                           {"polyline",
                            json{{"positions",
                                  json{{"references", json::array({a + "#position",
                                                                   b + "#position"})}}},
                                 {"width", 1},
                                 {"followSurface", false}}}});
    }
    return doc.dump();
}

void write_viz_czml(const Scenario& scenario, const TraceFile& trace,
                    std::int64_t sample_every_ms, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const std::string text = export_viz_czml(scenario, trace, sample_every_ms);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write to " + path);
}

}  // namespace orbit
