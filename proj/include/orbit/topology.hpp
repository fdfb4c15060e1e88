#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbit/geo.hpp"
#include "orbit/node.hpp"
#include "orbit/orbits.hpp"

namespace orbit {

struct Scenario;

enum class GslMode { closest, sticky };

struct GroundStationConfig {
    std::string name;
    GeodeticCoord location;
    double min_elevation_deg{25.0};
    GslMode gsl_mode{GslMode::closest};
};

struct LinkProps {
    std::int64_t delay_us{0};
    double loss_pct{0.0};
    double rate_mbps{0.0};

    friend bool operator==(const LinkProps&, const LinkProps&) = default;
};

enum class NodeState { created, started, suspended };

const char* node_state_name(NodeState s);
NodeState parse_node_state(const std::string& s);

/// Geographic activity region. Satellites whose subsatellite point falls
/// outside the box are suspended. Longitude bounds are wrap-aware: lon_min >
/// lon_max means the box crosses the antimeridian.
struct BoundingBox {
    double lat_min{-90.0};
    double lat_max{90.0};
    double lon_min{-180.0};
    double lon_max{180.0};

    bool contains(double lat_deg, double lon_deg) const;
};

/// Complete constellation state at one instant: node activity, inter-satellite
/// links and ground-satellite links with their properties. Maps keep
/// everything in canonical order so iteration is deterministic.
struct TopologySnapshot {
    SimInstant t;
    std::map<NodeRef, NodeState> nodes;
    std::map<LinkKey, LinkProps> isl_links;
    std::map<LinkKey, LinkProps> gsl_links;

    const LinkProps* find_link(const LinkKey& k) const {
        if (auto it = isl_links.find(k); it != isl_links.end()) return &it->second;
        if (auto it = gsl_links.find(k); it != gsl_links.end()) return &it->second;
        return nullptr;
    }
};

/// +Grid neighbors of a satellite: same-plane slot +-1 and adjacent-plane
/// same slot. The seam between the last and first plane exists only for
/// full-arc shells. Result is sorted, deduplicated and never contains `id`.
std::vector<SatelliteId> isl_neighbors(const SatelliteId& id, const ShellConfig& cfg);

/// One visible satellite candidate for GSL selection.
struct GslCandidate {
    SatelliteId id;
    double distance_m;
    double elevation_deg;
};

/// Pick the satellite a ground station attaches to, or nullopt when nothing
/// is visible. closest: minimum distance, ties to the smallest id. sticky:
/// keep `previous` while it is still among the candidates.
std::optional<SatelliteId> select_gsl(const GroundStationConfig& gs,
                                      const std::vector<GslCandidate>& visible,
                                      const std::optional<SatelliteId>& previous);

/// Per-ground-station GSL choice carried between consecutive steps (sticky
/// mode needs the previous selection; closest mode ignores it).
using GslSelection = std::vector<std::optional<SatelliteId>>;

/// Precompiled scenario: flattened satellite list, ISL pair list, ground
/// station positions and the epoch's Earth rotation angle. Building it once
/// keeps per-step snapshot evaluation cheap and pure.
class ScenarioModel {
public:
    explicit ScenarioModel(const Scenario& scenario);

    const Scenario& scenario() const { return *scenario_; }
    std::size_t satellite_count() const { return sats_.size(); }
    std::size_t isl_pair_count() const { return isl_pairs_.size(); }

    /// Earth-fixed satellite positions at epoch+offset, ordered like the
    /// flattened satellite list.
    std::vector<EcefPos> positions_at(std::int64_t offset_ms) const;

    /// Full topology snapshot at epoch+offset. `previous` feeds sticky GSL
    /// selection; `selection_out`, when given, receives this step's choices.
    TopologySnapshot snapshot_at(std::int64_t offset_ms, const GslSelection* previous = nullptr,
                                 GslSelection* selection_out = nullptr) const;

    const std::vector<std::pair<SatelliteId, OrbitalElements>>& satellites() const { return sats_; }
    const std::vector<EcefPos>& ground_positions() const { return gs_ecef_; }

private:
    const Scenario* scenario_;
    std::vector<std::pair<SatelliteId, OrbitalElements>> sats_;
    std::vector<std::pair<std::size_t, std::size_t>> isl_pairs_;  // indices into sats_
    std::vector<EcefPos> gs_ecef_;
    double epoch_gmst_rad_{0.0};
};

/// Snapshot as a pure function of (scenario, t). Sticky ground stations fall
/// back to closest selection because no history is available here; use
/// ScenarioModel::snapshot_at to thread selections across steps.
TopologySnapshot snapshot(const Scenario& scenario, const SimInstant& t);

}  // namespace orbit
