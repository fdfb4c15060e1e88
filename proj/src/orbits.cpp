#include "orbit/orbits.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "orbit/errors.hpp"

namespace orbit {

using std::numbers::pi;

bool ShellConfig::full_arc() const {
    return std::abs(raan_arc_rad - 2.0 * pi) < 1e-12;
}

OrbitalElements make_circular_elements(double a_m, double incl_rad, double raan_rad,
                                       double anomaly_rad) {
    OrbitalElements el;
    el.semi_major_axis_m = a_m;
    el.inclination_rad = incl_rad;
    el.raan_rad = raan_rad;
    el.initial_anomaly_rad = anomaly_rad;
    el.mean_motion_rad_s = std::sqrt(kMuEarthM3S2 / (a_m * a_m * a_m));
    return el;
}

double orbital_period_s(const OrbitalElements& el) {
    return 2.0 * pi / el.mean_motion_rad_s;
}

std::vector<std::pair<SatelliteId, OrbitalElements>> generate_shell(const ShellConfig& cfg,
                                                                    int shell_index) {
    if (cfg.planes < 1 || cfg.sats_per_plane < 1)
        throw ConfigError("shell needs at least one plane and one satellite per plane");
    if (!(cfg.raan_arc_rad > 0.0 && cfg.raan_arc_rad <= 2.0 * pi + 1e-12))
        throw ConfigError("raan_arc_rad must be in (0, 2pi]");
    if (!(cfg.altitude_km > 100.0))
        throw ConfigError("altitude_km must exceed 100");
    if (!(cfg.inclination_deg >= 0.0 && cfg.inclination_deg <= 180.0))
        throw ConfigError("inclination_deg must be in [0,180]");
    if (!(cfg.phase_offset >= 0.0 && cfg.phase_offset < 1.0))
        throw ConfigError("phase_offset must be in [0,1)");

    const double a_m = kEarthRadiusM + cfg.altitude_km * 1000.0;
    const double incl = cfg.inclination_deg * pi / 180.0;
    const double raan0 = cfg.raan_offset_deg * pi / 180.0;
    const double raan_step = cfg.raan_arc_rad / cfg.planes;
    const double slot_step = 2.0 * pi / cfg.sats_per_plane;

    std::vector<std::pair<SatelliteId, OrbitalElements>> out;
    out.reserve(static_cast<size_t>(cfg.planes) * cfg.sats_per_plane);
    for (int p = 0; p < cfg.planes; ++p) {
        const double raan = raan0 + p * raan_step;
        const double phase = p * cfg.phase_offset * slot_step;
        for (int s = 0; s < cfg.sats_per_plane; ++s) {
            out.emplace_back(SatelliteId{shell_index, p, s},
                             make_circular_elements(a_m, incl, raan, s * slot_step + phase));
        }
    }
    return out;
}

EcefPos propagate_ecef(const OrbitalElements& el, double dt_s, double earth_angle_rad) {
    const double u = el.initial_anomaly_rad + el.mean_motion_rad_s * dt_s;
    const double cu = std::cos(u), su = std::sin(u);
    const double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
    const double co = std::cos(el.raan_rad), so = std::sin(el.raan_rad);
    const double a = el.semi_major_axis_m;

    // inertial frame: in-plane position rotated by inclination then RAAN
    const double xi = a * (cu * co - su * ci * so);
    const double yi = a * (cu * so + su * ci * co);
    const double zi = a * su * si;

    // inertial -> Earth-fixed: rotate by -earth_angle about z
    const double ct = std::cos(earth_angle_rad), st = std::sin(earth_angle_rad);
    return EcefPos{xi * ct + yi * st, -xi * st + yi * ct, zi};
}

EcefPos propagate(const OrbitalElements& el, const SimInstant& t) {
    return propagate_ecef(el, t.offset_seconds(), earth_rotation_angle_rad(t));
}

int tle_checksum(const std::string& line) {
    int sum = 0;
    for (char c : line) {
        if (c >= '0' && c <= '9') sum += c - '0';
        if (c == '-') sum += 1;
    }
    return sum % 10;
}

std::pair<std::string, std::string> export_tle(const SatelliteId& id, const OrbitalElements& el,
                                               const std::string& epoch_utc) {
    const UtcTime t = parse_iso8601_utc(epoch_utc);
    // fractional day-of-year for the TLE epoch field
    const UtcTime jan1{t.year, 1, 1, 0, 0, 0.0};
    const double doy = days_since_j2000(t) - days_since_j2000(jan1) + 1.0;
    const int yy = t.year % 100;

    const int catalog = (id.shell * 25000 + id.plane * 250 + id.slot + 1) % 100000;

    const double incl_deg = el.inclination_rad * 180.0 / pi;
    const double raan_deg = std::fmod(el.raan_rad * 180.0 / pi, 360.0) + (el.raan_rad < 0 ? 360.0 : 0.0);
    const double anom_deg =
        std::fmod(el.initial_anomaly_rad * 180.0 / pi, 360.0) + (el.initial_anomaly_rad < 0 ? 360.0 : 0.0);
    const double rev_day = el.mean_motion_rad_s * 86400.0 / (2.0 * pi);

    char l1[80], l2[80];
    std::snprintf(l1, sizeof(l1), "1 %05dU 00000A   %02d%012.8f  .00000000  00000-0  00000-0 0  999",
                  catalog, yy, doy);
    std::snprintf(l2, sizeof(l2), "2 %05d %8.4f %8.4f 0000000 %8.4f %8.4f %11.8f    0",
                  catalog, incl_deg, raan_deg, 0.0, anom_deg, rev_day);

    std::string line1(l1), line2(l2);
    line1 += std::to_string(tle_checksum(line1));
    line2 += std::to_string(tle_checksum(line2));
    return {line1, line2};
}

}  // namespace orbit
