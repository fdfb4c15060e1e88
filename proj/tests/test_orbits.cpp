#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "orbit/errors.hpp"
#include "orbit/orbits.hpp"

using namespace orbit;

namespace {
constexpr double kPi = std::numbers::pi;
// Closed-form two-body values at 550 km, frozen from an independent
// high-precision computation.
constexpr double kPeriod550S = 5730.127089334606;
constexpr double kRevPerDay550 = 15.078199602381408;

ShellConfig starlink_like() {
    ShellConfig cfg;
    cfg.planes = 72;
    cfg.sats_per_plane = 22;
    cfg.inclination_deg = 53.0;
    cfg.altitude_km = 550.0;
    return cfg;
}
}  // namespace

TEST_CASE("circular elements derive mean motion from the semi-major axis") {
    auto el = make_circular_elements(kEarthRadiusM + 550000.0, 0.9, 0.0, 0.0);
    CHECK(orbital_period_s(el) == doctest::Approx(kPeriod550S).epsilon(1e-12));
    CHECK(86400.0 / orbital_period_s(el) == doctest::Approx(kRevPerDay550).epsilon(1e-12));
    CHECK(el.mean_motion_rad_s == doctest::Approx(2.0 * kPi / kPeriod550S).epsilon(1e-12));
}

TEST_CASE("shell layout: raan and anomaly grids") {
    ShellConfig cfg = starlink_like();
    auto sats = generate_shell(cfg);
    REQUIRE(sats.size() == 72u * 22u);

    // Ordered by (plane, slot).
    CHECK(sats.front().first == SatelliteId{0, 0, 0});
    CHECK(sats.back().first == SatelliteId{0, 71, 21});

    std::map<int, double> plane_raan;
    for (const auto& [id, el] : sats) {
        plane_raan.emplace(id.plane, el.raan_rad);
        CHECK(el.inclination_rad == doctest::Approx(53.0 * kPi / 180.0));
        CHECK(el.semi_major_axis_m == doctest::Approx(kEarthRadiusM + 550000.0));
    }
    // Full arc: planes evenly spaced over 2*pi.
    CHECK(plane_raan[0] == doctest::Approx(0.0));
    CHECK(plane_raan[1] == doctest::Approx(2.0 * kPi / 72.0).epsilon(1e-12));
    CHECK(plane_raan[71] == doctest::Approx(71.0 * 2.0 * kPi / 72.0).epsilon(1e-12));

    // Slots evenly spaced in anomaly within one plane.
    const auto& p0s0 = sats[0].second;
    const auto& p0s1 = sats[1].second;
    CHECK(p0s1.initial_anomaly_rad - p0s0.initial_anomaly_rad ==
          doctest::Approx(2.0 * kPi / 22.0).epsilon(1e-12));
}

TEST_CASE("partial arcs divide the arc by the plane count") {
    ShellConfig cfg = starlink_like();
    cfg.planes = 10;
    cfg.raan_arc_rad = 10.0 / 72.0 * 2.0 * kPi;
    cfg.raan_offset_deg = 225.0;
    auto sats = generate_shell(cfg);
    REQUIRE(sats.size() == 220u);
    CHECK_FALSE(cfg.full_arc());

    double step = cfg.raan_arc_rad / 10.0;  // same 5 deg spacing as the full shell
    CHECK(step == doctest::Approx(2.0 * kPi / 72.0).epsilon(1e-12));
    CHECK(sats[0].second.raan_rad == doctest::Approx(225.0 * kPi / 180.0).epsilon(1e-12));
    CHECK(sats[22].second.raan_rad ==
          doctest::Approx(225.0 * kPi / 180.0 + step).epsilon(1e-12));
}

TEST_CASE("phasing shifts anomaly by plane index") {
    ShellConfig cfg = starlink_like();
    cfg.planes = 4;
    cfg.sats_per_plane = 8;
    cfg.phase_offset = 0.5;
    auto sats = generate_shell(cfg);
    double slot_step = 2.0 * kPi / 8.0;
    // Plane p, slot 0 sits at p * F * slot_step.
    CHECK(sats[0].second.initial_anomaly_rad == doctest::Approx(0.0));
    CHECK(sats[8].second.initial_anomaly_rad == doctest::Approx(0.5 * slot_step).epsilon(1e-12));
    CHECK(sats[16].second.initial_anomaly_rad == doctest::Approx(1.0 * slot_step).epsilon(1e-12));

    cfg.phase_offset = 1.0;
    CHECK_THROWS_AS(generate_shell(cfg), ConfigError);
}

TEST_CASE("propagated positions stay on the orbital sphere") {
    auto el = make_circular_elements(kEarthRadiusM + 550000.0, 53.0 * kPi / 180.0, 1.0, 0.3);
    for (double t : {0.0, 100.0, 1000.0, 5000.0, 86000.0}) {
        EcefPos p = propagate_ecef(el, t, 0.37 + t * kEarthRotationRadPerS);
        double r = std::sqrt(p.x_m * p.x_m + p.y_m * p.y_m + p.z_m * p.z_m);
        CHECK(r == doctest::Approx(kEarthRadiusM + 550000.0).epsilon(1e-12));
        // Inclination bounds latitude.
        GeodeticCoord g = ecef_to_geodetic(p);
        CHECK(std::abs(g.lat_deg) <= 53.0 + 1e-9);
    }
}

TEST_CASE("one full period returns to the same latitude, shifted west by earth rotation") {
    SimInstant t0{"2023-09-15T00:00:00Z", 0};
    auto el = make_circular_elements(kEarthRadiusM + 550000.0, 53.0 * kPi / 180.0, 0.7, 0.2);
    double period = orbital_period_s(el);
    GeodeticCoord g0 = ecef_to_geodetic(propagate(el, t0));
    GeodeticCoord g1 =
        ecef_to_geodetic(propagate(el, t0.plus_ms(static_cast<std::int64_t>(period * 1000.0))));
    CHECK(g1.lat_deg == doctest::Approx(g0.lat_deg).epsilon(1e-6));
    double expected_shift = -kEarthRotationRadPerS * period * 180.0 / kPi;
    double shift = normalize_lon_deg(g1.lon_deg - g0.lon_deg);
    CHECK(shift == doctest::Approx(expected_shift).epsilon(1e-4));
}

TEST_CASE("quarter period reaches maximum latitude from the ascending node") {
    auto el = make_circular_elements(kEarthRadiusM + 550000.0, 53.0 * kPi / 180.0, 0.0, 0.0);
    double period = orbital_period_s(el);
    // Anomaly 0 is the ascending node (latitude 0, heading north).
    GeodeticCoord node = ecef_to_geodetic(propagate_ecef(el, 0.0, 0.0));
    CHECK(node.lat_deg == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    GeodeticCoord apex = ecef_to_geodetic(propagate_ecef(el, period / 4.0, 0.0));
    CHECK(apex.lat_deg == doctest::Approx(53.0).epsilon(1e-6));
}

TEST_CASE("tle export carries the elements and passes checksums") {
    auto el = make_circular_elements(kEarthRadiusM + 550000.0, 53.0 * kPi / 180.0,
                                     0.25 * kPi, 0.5 * kPi);
    auto [l1, l2] = export_tle(SatelliteId{0, 3, 7}, el, "2023-09-15T00:00:00Z");
    REQUIRE(l1.size() == 69u);
    REQUIRE(l2.size() == 69u);
    CHECK(l1[0] == '1');
    CHECK(l2[0] == '2');
    CHECK(tle_checksum(l1.substr(0, 68)) == l1[68] - '0');
    CHECK(tle_checksum(l2.substr(0, 68)) == l2[68] - '0');
    // Inclination and mean motion fields.
    CHECK(l2.substr(8, 8) == " 53.0000");
    CHECK(l2.substr(52, 11) == "15.07819960");
}

TEST_CASE("tle checksum rule: digits plus one per minus sign") {
    CHECK(tle_checksum("") == 0);
    CHECK(tle_checksum("abc") == 0);
    CHECK(tle_checksum("12") == 3);
    CHECK(tle_checksum("-") == 1);
    CHECK(tle_checksum("1 2-") == 4);
}
