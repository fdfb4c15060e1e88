#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orbit/geo.hpp"

namespace orbit {

/// Walker-style shell description. A partial shell (raan_arc_rad < 2pi)
/// models a slice of a larger constellation; the seam between the first and
/// last plane only exists for full arcs.
struct ShellConfig {
    int planes{1};
    int sats_per_plane{1};
    double inclination_deg{53.0};
    double altitude_km{550.0};
    double raan_arc_rad{6.283185307179586476925286766559};  // 2*pi
    double raan_offset_deg{0.0};
    double phase_offset{0.0};  // inter-plane phasing fraction F in [0,1)

    bool full_arc() const;
};

struct SatelliteId {
    int shell{0};
    int plane{0};
    int slot{0};

    friend auto operator<=>(const SatelliteId&, const SatelliteId&) = default;
};

/// Circular two-body elements. Eccentricity is fixed at zero; mean motion is
/// derived from the semi-major axis at construction.
struct OrbitalElements {
    double semi_major_axis_m{0.0};
    double inclination_rad{0.0};
    double raan_rad{0.0};
    double initial_anomaly_rad{0.0};
    double mean_motion_rad_s{0.0};
};

OrbitalElements make_circular_elements(double semi_major_axis_m, double inclination_rad,
                                       double raan_rad, double initial_anomaly_rad);

double orbital_period_s(const OrbitalElements& el);

/// Generate one shell: RAAN(p) = offset + p * arc/planes, in-plane anomaly
/// anomaly(p,s) = (s + p*F) * 2pi/S. Output is ordered by (plane, slot) and
/// identical on every call.
std::vector<std::pair<SatelliteId, OrbitalElements>> generate_shell(const ShellConfig& cfg,
                                                                    int shell_index = 0);

/// Satellite position at offset `dt_s` from the elements' epoch, in the
/// rotating Earth-fixed frame given the Earth rotation angle at that time.
EcefPos propagate_ecef(const OrbitalElements& el, double dt_s, double earth_angle_rad);

/// Convenience wrapper that derives the Earth angle from `t` itself.
EcefPos propagate(const OrbitalElements& el, const SimInstant& t);

/// Two 69-character TLE lines (mod-10 checksums, mean motion in rev/day)
/// carrying the circular elements at the given UTC epoch.
std::pair<std::string, std::string> export_tle(const SatelliteId& id, const OrbitalElements& el,
                                               const std::string& epoch_utc);

/// Mod-10 TLE line checksum: digits count as value, '-' counts as 1.
int tle_checksum(const std::string& line_without_checksum);

}  // namespace orbit
