#include "orbit/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "orbit/errors.hpp"

namespace orbit {

using std::numbers::pi;

double normalize_lon_deg(double lon_deg) {
    double n = lon_deg - 360.0 * std::floor((lon_deg + 180.0) / 360.0);
    // floor arithmetic can land exactly on +180 for inputs like 180-1e-14
    if (n >= 180.0) n -= 360.0;
    return n;
}

GeodeticCoord::GeodeticCoord(double lat, double lon, double alt)
    : lat_deg(lat), lon_deg(normalize_lon_deg(lon)), alt_m(alt) {
    if (!(lat >= -90.0 && lat <= 90.0))
        throw ConfigError("latitude out of range [-90,90]: " + std::to_string(lat));
    if (!(alt >= -500.0))
        throw ConfigError("altitude below -500 m: " + std::to_string(alt));
}

UtcTime parse_iso8601_utc(const std::string& s) {
    UtcTime t{};
    double sec = 0.0;
    int n = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lfZ%n", &t.year, &t.month, &t.day,
                    &t.hour, &t.minute, &sec, &n) != 6 ||
        static_cast<size_t>(n) != s.size()) {
        throw ConfigError("malformed ISO-8601 UTC timestamp: '" + s + "'");
    }
    t.second = sec;
    if (t.month < 1 || t.month > 12 || t.day < 1 || t.hour > 23 || t.hour < 0 ||
        t.minute < 0 || t.minute > 59 || sec < 0.0 || sec >= 61.0) {
        throw ConfigError("ISO-8601 field out of range: '" + s + "'");
    }
    static constexpr int kMonthDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (t.year % 4 == 0 && t.year % 100 != 0) || t.year % 400 == 0;
    const int days = kMonthDays[t.month - 1] + (t.month == 2 && leap ? 1 : 0);
    if (t.day > days) throw ConfigError("ISO-8601 day out of range: '" + s + "'");
    return t;
}

static std::int64_t julian_day_number(int y, int m, int d) {
    // Fliegel-Van Flandern, valid for all Gregorian dates of interest
    std::int64_t a = (14 - m) / 12;
    std::int64_t yy = y + 4800 - a;
    std::int64_t mm = m + 12 * a - 3;
    return d + (153 * mm + 2) / 5 + 365 * yy + yy / 4 - yy / 100 + yy / 400 - 32045;
}

double days_since_j2000(const UtcTime& t) {
    const std::int64_t jdn = julian_day_number(t.year, t.month, t.day);
    const double day_frac = (t.hour * 3600.0 + t.minute * 60.0 + t.second) / 86400.0;
    // JD at 00:00 UTC is JDN - 0.5; J2000.0 is JD 2451545.0
    return (static_cast<double>(jdn) - 0.5 - 2451545.0) + day_frac;
}

static void civil_from_jdn(std::int64_t jdn, int& year, int& month, int& day) {
    // Inverse of julian_day_number (Fliegel-Van Flandern)
    std::int64_t l = jdn + 68569;
    const std::int64_t n = 4 * l / 146097;
    l -= (146097 * n + 3) / 4;
    const std::int64_t i = 4000 * (l + 1) / 1461001;
    l -= 1461 * i / 4 - 31;
    const std::int64_t j = 80 * l / 2447;
    day = static_cast<int>(l - 2447 * j / 80);
    l = j / 11;
    month = static_cast<int>(j + 2 - 12 * l);
    year = static_cast<int>(100 * (n - 49) + i + l);
}

UtcTime utc_plus_seconds(const UtcTime& t, double seconds) {
    std::int64_t jdn = julian_day_number(t.year, t.month, t.day);
    double sod = t.hour * 3600.0 + t.minute * 60.0 + t.second + seconds;
    const double days = std::floor(sod / 86400.0);
    jdn += static_cast<std::int64_t>(days);
    sod -= days * 86400.0;
    UtcTime r{};
    civil_from_jdn(jdn, r.year, r.month, r.day);
    r.hour = static_cast<int>(sod / 3600.0);
    r.minute = static_cast<int>((sod - r.hour * 3600.0) / 60.0);
    r.second = sod - r.hour * 3600.0 - r.minute * 60.0;
    return r;
}

std::string iso8601_string(const UtcTime& t) {
    UtcTime n = t;
    // millisecond precision; keep 59.9996 from printing as "60.000"
    if (n.second >= 59.9995) {
        n = utc_plus_seconds(t, 60.0 - n.second);
        n.second = 0.0;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%06.3fZ", n.year, n.month, n.day,
                  n.hour, n.minute, n.second);
    return buf;
}

double gmst_rad(const UtcTime& t) {
    const double d = days_since_j2000(t);
    double deg = std::fmod(280.46061837 + 360.98564736629 * d, 360.0);
    if (deg < 0.0) deg += 360.0;
    return deg * pi / 180.0;
}

EcefPos geodetic_to_ecef(const GeodeticCoord& g, EarthModel) {
    const double lat = g.lat_deg * pi / 180.0;
    const double lon = g.lon_deg * pi / 180.0;
    const double r = kEarthRadiusM + g.alt_m;
    return EcefPos{r * std::cos(lat) * std::cos(lon),
                   r * std::cos(lat) * std::sin(lon),
                   r * std::sin(lat)};
}

GeodeticCoord ecef_to_geodetic(const EcefPos& p, EarthModel) {
    const double r = std::sqrt(p.x_m * p.x_m + p.y_m * p.y_m + p.z_m * p.z_m);
    GeodeticCoord g;
    if (r == 0.0) return g;
    g.lat_deg = std::asin(std::clamp(p.z_m / r, -1.0, 1.0)) * 180.0 / pi;
    g.lon_deg = normalize_lon_deg(std::atan2(p.y_m, p.x_m) * 180.0 / pi);
    g.alt_m = r - kEarthRadiusM;
    return g;
}

double distance_m(const EcefPos& a, const EcefPos& b) {
    const double dx = a.x_m - b.x_m;
    const double dy = a.y_m - b.y_m;
    const double dz = a.z_m - b.z_m;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double elevation_deg(const EcefPos& gs, const EcefPos& sat) {
    const double gr = std::sqrt(gs.x_m * gs.x_m + gs.y_m * gs.y_m + gs.z_m * gs.z_m);
    const double dx = sat.x_m - gs.x_m;
    const double dy = sat.y_m - gs.y_m;
    const double dz = sat.z_m - gs.z_m;
    const double dr = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (dr == 0.0) return 90.0;  // satellite coincident with the station
    const double s = (gs.x_m * dx + gs.y_m * dy + gs.z_m * dz) / (gr * dr);
    return std::asin(std::clamp(s, -1.0, 1.0)) * 180.0 / pi;
}

std::int64_t propagation_delay_us(double d_m) {
    return static_cast<std::int64_t>(std::floor(d_m / kSpeedOfLightMps * 1e6 + 0.5));
}

double earth_rotation_angle_rad(const SimInstant& t) {
    const double theta0 = gmst_rad(parse_iso8601_utc(t.epoch_utc));
    double theta = std::fmod(theta0 + kEarthRotationRadPerS * t.offset_seconds(), 2.0 * pi);
    if (theta < 0.0) theta += 2.0 * pi;
    return theta;
}

}  // namespace orbit
