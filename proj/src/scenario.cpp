#include "orbit/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "orbit/errors.hpp"

namespace orbit {

using nlohmann::json;

int Scenario::total_satellites() const {
    int n = 0;
    for (const auto& sh : shells) n += sh.planes * sh.sats_per_plane;
    return n;
}

int Scenario::total_nodes() const {
    return total_satellites() + static_cast<int>(ground_stations.size());
}

namespace {

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError("scenario: missing or non-numeric field '" + key + "'");
    return j.at(key).get<double>();
}

std::int64_t seconds_to_ms(double seconds, const std::string& key) {
    const double ms = seconds * 1000.0;
    const double rounded = std::round(ms);
    if (std::abs(ms - rounded) > 1e-6)
        throw ConfigError("scenario: '" + key + "' must be an integer number of milliseconds");
    return static_cast<std::int64_t>(rounded);
}

ShellConfig parse_shell(const json& j) {
    ShellConfig sh;
    sh.planes = static_cast<int>(require_number(j, "planes"));
    sh.sats_per_plane = static_cast<int>(require_number(j, "sats_per_plane"));
    sh.inclination_deg = require_number(j, "inclination_deg");
    if (j.contains("altitude_km")) sh.altitude_km = j.at("altitude_km").get<double>();
    if (j.contains("raan_arc_rad")) sh.raan_arc_rad = j.at("raan_arc_rad").get<double>();
    if (j.contains("raan_offset_deg")) sh.raan_offset_deg = j.at("raan_offset_deg").get<double>();
    if (j.contains("phase_offset")) sh.phase_offset = j.at("phase_offset").get<double>();
    return sh;
}

GroundStationConfig parse_gs(const json& j) {
    GroundStationConfig gs;
    if (!j.contains("name") || !j.at("name").is_string())
        throw ConfigError("ground station: missing 'name'");
    gs.name = j.at("name").get<std::string>();
    if (!j.contains("location") || !j.at("location").is_object())
        throw ConfigError("ground station '" + gs.name + "': missing 'location'");
    const json& loc = j.at("location");
    gs.location = GeodeticCoord(require_number(loc, "lat_deg"), require_number(loc, "lon_deg"),
                                loc.contains("alt_m") ? loc.at("alt_m").get<double>() : 0.0);
    if (j.contains("min_elevation_deg"))
        gs.min_elevation_deg = j.at("min_elevation_deg").get<double>();
    if (j.contains("gsl_mode")) {
        const std::string m = j.at("gsl_mode").get<std::string>();
        if (m == "closest")
            gs.gsl_mode = GslMode::closest;
        else if (m == "sticky")
            gs.gsl_mode = GslMode::sticky;
        else
            throw ConfigError("ground station '" + gs.name + "': unknown gsl_mode '" + m + "'");
    }
    return gs;
}

LinkClassDefaults parse_link_class(const json& j, const LinkClassDefaults& dflt) {
    LinkClassDefaults d = dflt;
    if (j.contains("loss_pct")) d.loss_pct = j.at("loss_pct").get<double>();
    if (j.contains("rate_mbps")) d.rate_mbps = j.at("rate_mbps").get<double>();
    return d;
}

json shell_to_json(const ShellConfig& sh) {
    return json{{"planes", sh.planes},
                {"sats_per_plane", sh.sats_per_plane},
                {"inclination_deg", sh.inclination_deg},
                {"altitude_km", sh.altitude_km},
                {"raan_arc_rad", sh.raan_arc_rad},
                {"raan_offset_deg", sh.raan_offset_deg},
                {"phase_offset", sh.phase_offset}};
}

json gs_to_json(const GroundStationConfig& gs) {
    return json{{"name", gs.name},
                {"location",
                 {{"lat_deg", gs.location.lat_deg},
                  {"lon_deg", gs.location.lon_deg},
                  {"alt_m", gs.location.alt_m}}},
                {"min_elevation_deg", gs.min_elevation_deg},
                {"gsl_mode", gs.gsl_mode == GslMode::closest ? "closest" : "sticky"}};
}

json scenario_to_json_value(const Scenario& s) {
    json j;
    j["epoch"] = s.epoch_utc;
    j["step_seconds"] = static_cast<double>(s.step_ms) / 1000.0;
    j["duration_seconds"] = static_cast<double>(s.duration_ms) / 1000.0;
    j["shells"] = json::array();
    for (const auto& sh : s.shells) j["shells"].push_back(shell_to_json(sh));
    j["ground_stations"] = json::array();
    for (const auto& gs : s.ground_stations) j["ground_stations"].push_back(gs_to_json(gs));
    j["link_defaults"] = {{"gsl",
                           {{"loss_pct", s.link_defaults.gsl.loss_pct},
                            {"rate_mbps", s.link_defaults.gsl.rate_mbps}}},
                          {"isl",
                           {{"loss_pct", s.link_defaults.isl.loss_pct},
                            {"rate_mbps", s.link_defaults.isl.rate_mbps}}}};
    if (s.bounding_box) {
        j["bounding_box"] = {{"lat_min", s.bounding_box->lat_min},
                             {"lat_max", s.bounding_box->lat_max},
                             {"lon_min", s.bounding_box->lon_min},
                             {"lon_max", s.bounding_box->lon_max}};
    }
    j["gsl_contention"] = s.gsl_contention;
    j["delay_quantization_us"] = s.delay_quantization_us;
    j["budget"] = {{"max_nodes", s.budget.max_nodes}, {"max_links", s.budget.max_links}};
    return j;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario: top level must be a JSON object");

    Scenario s;
    if (!j.contains("epoch") || !j.at("epoch").is_string())
        throw ConfigError("scenario: missing 'epoch'");
    s.epoch_utc = j.at("epoch").get<std::string>();
    s.step_ms = seconds_to_ms(require_number(j, "step_seconds"), "step_seconds");
    s.duration_ms = seconds_to_ms(require_number(j, "duration_seconds"), "duration_seconds");

    if (!j.contains("shells") || !j.at("shells").is_array() || j.at("shells").empty())
        throw ConfigError("scenario: 'shells' must be a non-empty array");
    for (const auto& sh : j.at("shells")) s.shells.push_back(parse_shell(sh));

    if (j.contains("ground_stations")) {
        if (!j.at("ground_stations").is_array())
            throw ConfigError("scenario: 'ground_stations' must be an array");
        for (const auto& g : j.at("ground_stations")) s.ground_stations.push_back(parse_gs(g));
    }

    if (j.contains("link_defaults")) {
        const json& ld = j.at("link_defaults");
        if (ld.contains("gsl")) s.link_defaults.gsl = parse_link_class(ld.at("gsl"), s.link_defaults.gsl);
        if (ld.contains("isl")) s.link_defaults.isl = parse_link_class(ld.at("isl"), s.link_defaults.isl);
    }

    if (j.contains("bounding_box") && !j.at("bounding_box").is_null()) {
        const json& bb = j.at("bounding_box");
        BoundingBox box;
        box.lat_min = require_number(bb, "lat_min");
        box.lat_max = require_number(bb, "lat_max");
        box.lon_min = require_number(bb, "lon_min");
        box.lon_max = require_number(bb, "lon_max");
        s.bounding_box = box;
    }

    if (j.contains("gsl_contention")) s.gsl_contention = j.at("gsl_contention").get<bool>();
    if (j.contains("delay_quantization_us"))
        s.delay_quantization_us = j.at("delay_quantization_us").get<std::int64_t>();
    if (j.contains("budget")) {
        const json& b = j.at("budget");
        if (b.contains("max_nodes")) s.budget.max_nodes = b.at("max_nodes").get<int>();
        if (b.contains("max_links")) s.budget.max_links = b.at("max_links").get<int>();
    }

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    return scenario_to_json_value(s).dump(2) + "\n";
}

std::string canonical_scenario_json(const Scenario& s) {
    return scenario_to_json_value(s).dump();
}

std::string scenario_digest(const Scenario& s) {
    const std::string canon = canonical_scenario_json(s);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (EVP_Digest(canon.data(), canon.size(), md, &md_len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 digest computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

void validate_scenario(const Scenario& s) {
    parse_iso8601_utc(s.epoch_utc);
    if (s.step_ms <= 0) throw ConfigError("scenario: step_seconds must be positive");
    if (s.duration_ms < 0) throw ConfigError("scenario: duration_seconds must be non-negative");
    if (s.shells.empty()) throw ConfigError("scenario: at least one shell is required");

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const auto& sh : s.shells) {
        if (sh.planes < 1 || sh.sats_per_plane < 1)
            throw ConfigError("shell: planes and sats_per_plane must be >= 1");
        if (!(sh.raan_arc_rad > 0.0 && sh.raan_arc_rad <= two_pi + 1e-12))
            throw ConfigError("shell: raan_arc_rad must be in (0, 2pi]");
        if (!(sh.raan_offset_deg >= 0.0 && sh.raan_offset_deg < 360.0))
            throw ConfigError("shell: raan_offset_deg must be in [0, 360)");
        if (!(sh.inclination_deg >= 0.0 && sh.inclination_deg <= 180.0))
            throw ConfigError("shell: inclination_deg must be in [0, 180]");
        if (!(sh.altitude_km > 100.0)) throw ConfigError("shell: altitude_km must exceed 100");
        if (!(sh.phase_offset >= 0.0 && sh.phase_offset < 1.0))
            throw ConfigError("shell: phase_offset must be in [0, 1)");
    }

    std::set<std::string> names;
    for (const auto& gs : s.ground_stations) {
        if (gs.name.empty()) throw ConfigError("ground station with empty name");
        if (!names.insert(gs.name).second)
            throw ConfigError("duplicate ground station name: '" + gs.name + "'");
        if (!(gs.min_elevation_deg >= 0.0 && gs.min_elevation_deg < 90.0))
            throw ConfigError("ground station '" + gs.name +
                              "': min_elevation_deg must be in [0, 90)");
    }

    if (s.bounding_box && s.bounding_box->lat_min > s.bounding_box->lat_max)
        throw ConfigError("bounding_box: lat_min must not exceed lat_max");

    if (s.delay_quantization_us < 0)
        throw ConfigError("delay_quantization_us must be >= 0");
    if (s.budget.max_nodes < 1 || s.budget.max_links < 0)
        throw ConfigError("budget limits must be positive");

    if (s.total_nodes() > s.budget.max_nodes)
        throw BudgetError("scenario needs " + std::to_string(s.total_nodes()) +
                          " nodes, budget allows " + std::to_string(s.budget.max_nodes));
}

}  // namespace orbit
