#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace orbit {

// Physical constants. Spherical Earth keeps every slant-range and delay
// formula closed-form; the EarthModel enum below reserves room for an
// ellipsoid without touching call sites.
inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kSpeedOfLightMps = 299792458.0;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
inline constexpr double kMuEarthM3S2 = 3.986004418e14;

enum class EarthModel { sphere };

/// Normalize a longitude in degrees into [-180, 180). Idempotent.
double normalize_lon_deg(double lon_deg);

/// Geodetic position on the mean sphere. lat in [-90,90], lon normalized to
/// [-180,180), altitude in meters above the sphere (>= -500).
struct GeodeticCoord {
    double lat_deg{0.0};
    double lon_deg{0.0};
    double alt_m{0.0};

    GeodeticCoord() = default;
    GeodeticCoord(double lat, double lon, double alt);
};

struct EcefPos {
    double x_m{0.0};
    double y_m{0.0};
    double z_m{0.0};
};

/// A point on the simulation timeline: UTC epoch plus a nonnegative offset.
/// Offsets are stored in integer milliseconds so step arithmetic is exact.
struct SimInstant {
    std::string epoch_utc;     // ISO-8601 UTC, e.g. "2023-09-15T00:00:00Z"
    std::int64_t offset_ms{0};

    double offset_seconds() const { return static_cast<double>(offset_ms) / 1000.0; }

    SimInstant plus_ms(std::int64_t delta_ms) const {
        return SimInstant{epoch_utc, offset_ms + delta_ms};
    }

    friend auto operator<=>(const SimInstant&, const SimInstant&) = default;
};

/// Parsed UTC calendar time. Only what TLE export and GMST need.
struct UtcTime {
    int year;
    int month;
    int day;
    int hour;
    int minute;
    double second;
};

/// Parse "YYYY-MM-DDTHH:MM:SS[.fff]Z". Throws ConfigError on malformed input.
UtcTime parse_iso8601_utc(const std::string& s);

/// Days since the J2000.0 epoch (2451545.0 JD) for a UTC timestamp.
double days_since_j2000(const UtcTime& t);

/// Calendar arithmetic across day/month/year boundaries (no leap seconds).
UtcTime utc_plus_seconds(const UtcTime& t, double seconds);

/// "YYYY-MM-DDTHH:MM:SS.mmmZ", millisecond precision.
std::string iso8601_string(const UtcTime& t);

/// Greenwich Mean Sidereal Time, first-order polynomial, radians in [0, 2pi).
double gmst_rad(const UtcTime& t);

EcefPos geodetic_to_ecef(const GeodeticCoord& g, EarthModel model = EarthModel::sphere);
GeodeticCoord ecef_to_geodetic(const EcefPos& p, EarthModel model = EarthModel::sphere);

/// Euclidean distance in meters.
double distance_m(const EcefPos& a, const EcefPos& b);

/// Elevation of `sat` above the local horizon plane at `gs`, degrees in
/// [-90, 90]. Negative means below the horizon.
double elevation_deg(const EcefPos& gs, const EcefPos& sat);

/// Free-space propagation delay, rounded half-up to integer microseconds so
/// traces are bit-exact across platforms.
std::int64_t propagation_delay_us(double distance_m);

/// Earth rotation angle at `t`: GMST of the epoch advanced by the sidereal
/// rate, wrapped to [0, 2pi).
double earth_rotation_angle_rad(const SimInstant& t);

}  // namespace orbit
