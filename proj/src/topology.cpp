#include "orbit/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "orbit/errors.hpp"
#include "orbit/scenario.hpp"

namespace orbit {

const char* node_state_name(NodeState s) {
    switch (s) {
        case NodeState::created: return "created";
        case NodeState::started: return "started";
        case NodeState::suspended: return "suspended";
    }
    return "?";
}

NodeState parse_node_state(const std::string& s) {
    if (s == "created") return NodeState::created;
    if (s == "started") return NodeState::started;
    if (s == "suspended") return NodeState::suspended;
    throw ConfigError("unknown node state: '" + s + "'");
}

bool BoundingBox::contains(double lat_deg, double lon_deg) const {
    if (lat_deg < lat_min || lat_deg > lat_max) return false;
    // Work in eastward span from lon_min so the antimeridian needs no special
    // casing: lon_min > lon_max simply wraps.
    double span = lon_max - lon_min;
    if (span >= 360.0) return true;
    if (span < 0.0) span += 360.0;
    double rel = std::fmod(lon_deg - lon_min, 360.0);
    if (rel < 0.0) rel += 360.0;
    return rel <= span;
}

std::vector<SatelliteId> isl_neighbors(const SatelliteId& id, const ShellConfig& cfg) {
    const int P = cfg.planes;
    const int S = cfg.sats_per_plane;
    if (id.plane < 0 || id.plane >= P || id.slot < 0 || id.slot >= S)
        throw ConfigError("satellite id outside shell");

    std::set<SatelliteId> out;
    // intra-plane ring
    if (S > 1) {
        out.insert(SatelliteId{id.shell, id.plane, (id.slot + 1) % S});
        out.insert(SatelliteId{id.shell, id.plane, (id.slot - 1 + S) % S});
    }
    // inter-plane, wrapping across the seam only for full-arc shells
    if (P > 1) {
        if (id.plane + 1 < P)
            out.insert(SatelliteId{id.shell, id.plane + 1, id.slot});
        else if (cfg.full_arc())
            out.insert(SatelliteId{id.shell, 0, id.slot});
        if (id.plane - 1 >= 0)
            out.insert(SatelliteId{id.shell, id.plane - 1, id.slot});
        else if (cfg.full_arc())
            out.insert(SatelliteId{id.shell, P - 1, id.slot});
    }
    out.erase(id);
    return {out.begin(), out.end()};
}

std::optional<SatelliteId> select_gsl(const GroundStationConfig& gs,
                                      const std::vector<GslCandidate>& visible,
                                      const std::optional<SatelliteId>& previous) {
    if (visible.empty()) return std::nullopt;

    if (gs.gsl_mode == GslMode::sticky && previous) {
        for (const auto& c : visible)
            if (c.id == *previous) return previous;
    }

    const GslCandidate* best = &visible.front();
    for (const auto& c : visible) {
        if (c.distance_m < best->distance_m ||
            (c.distance_m == best->distance_m && c.id < best->id))
            best = &c;
    }
    return best->id;
}

ScenarioModel::ScenarioModel(const Scenario& scenario) : scenario_(&scenario) {
    int shell_index = 0;
    std::vector<std::size_t> shell_base;
    for (const auto& sh : scenario.shells) {
        shell_base.push_back(sats_.size());
        auto gen = generate_shell(sh, shell_index);
        sats_.insert(sats_.end(), gen.begin(), gen.end());
        ++shell_index;
    }

    // ISL pairs per shell, deduplicated via key order
    shell_index = 0;
    for (const auto& sh : scenario.shells) {
        const std::size_t base = shell_base[shell_index];
        const int S = sh.sats_per_plane;
        for (int p = 0; p < sh.planes; ++p) {
            for (int s = 0; s < S; ++s) {
                const SatelliteId id{shell_index, p, s};
                for (const auto& nb : isl_neighbors(id, sh)) {
                    if (id < nb) {
                        isl_pairs_.emplace_back(base + static_cast<std::size_t>(p) * S + s,
                                                base + static_cast<std::size_t>(nb.plane) * S + nb.slot);
                    }
                }
            }
        }
        ++shell_index;
    }

    for (const auto& gs : scenario.ground_stations)
        gs_ecef_.push_back(geodetic_to_ecef(gs.location));

    epoch_gmst_rad_ = gmst_rad(parse_iso8601_utc(scenario.epoch_utc));
}

std::vector<EcefPos> ScenarioModel::positions_at(std::int64_t offset_ms) const {
    const double dt = static_cast<double>(offset_ms) / 1000.0;
    const double theta = epoch_gmst_rad_ + kEarthRotationRadPerS * dt;
    std::vector<EcefPos> pos;
    pos.reserve(sats_.size());
    for (const auto& [id, el] : sats_) pos.push_back(propagate_ecef(el, dt, theta));
    return pos;
}

TopologySnapshot ScenarioModel::snapshot_at(std::int64_t offset_ms, const GslSelection* previous,
                                            GslSelection* selection_out) const {
    const Scenario& sc = *scenario_;
    TopologySnapshot snap;
    snap.t = SimInstant{sc.epoch_utc, offset_ms};

    const std::vector<EcefPos> pos = positions_at(offset_ms);

    // node activity from the bounding box
    std::vector<bool> started(sats_.size(), true);
    if (sc.bounding_box) {
        for (std::size_t i = 0; i < sats_.size(); ++i) {
            const GeodeticCoord sub = ecef_to_geodetic(pos[i]);
            started[i] = sc.bounding_box->contains(sub.lat_deg, sub.lon_deg);
        }
    }
    for (std::size_t i = 0; i < sats_.size(); ++i) {
        snap.nodes.emplace(NodeRef::satellite(sats_[i].first),
                           started[i] ? NodeState::started : NodeState::suspended);
    }
    for (int g = 0; g < static_cast<int>(sc.ground_stations.size()); ++g)
        snap.nodes.emplace(NodeRef::ground(g), NodeState::started);

    // ISLs among started satellites
    for (const auto& [ia, ib] : isl_pairs_) {
        if (!started[ia] || !started[ib]) continue;
        LinkProps props;
        props.delay_us = propagation_delay_us(distance_m(pos[ia], pos[ib]));
        props.loss_pct = sc.link_defaults.isl.loss_pct;
        props.rate_mbps = sc.link_defaults.isl.rate_mbps;
        snap.isl_links.emplace(LinkKey(NodeRef::satellite(sats_[ia].first),
                                       NodeRef::satellite(sats_[ib].first)),
                               props);
    }

    // one GSL per ground station
    if (selection_out) selection_out->assign(sc.ground_stations.size(), std::nullopt);
    for (int g = 0; g < static_cast<int>(sc.ground_stations.size()); ++g) {
        const GroundStationConfig& gs = sc.ground_stations[g];
        std::vector<GslCandidate> visible;
        for (std::size_t i = 0; i < sats_.size(); ++i) {
            if (!started[i]) continue;
            const double elev = elevation_deg(gs_ecef_[g], pos[i]);
            if (elev >= gs.min_elevation_deg)
                visible.push_back({sats_[i].first, distance_m(gs_ecef_[g], pos[i]), elev});
        }
        std::optional<SatelliteId> prev;
        if (previous && g < static_cast<int>(previous->size())) prev = (*previous)[g];
        const auto choice = select_gsl(gs, visible, prev);
        if (selection_out) (*selection_out)[g] = choice;
        if (!choice) continue;

        const std::size_t idx = [&] {
            for (std::size_t i = 0; i < sats_.size(); ++i)
                if (sats_[i].first == *choice) return i;
            throw BackendError("gsl selection produced unknown satellite");
        }();
        LinkProps props;
        props.delay_us = propagation_delay_us(distance_m(gs_ecef_[g], pos[idx]));
        props.loss_pct = sc.link_defaults.gsl.loss_pct;
        props.rate_mbps = sc.link_defaults.gsl.rate_mbps;
        snap.gsl_links.emplace(LinkKey(NodeRef::ground(g), NodeRef::satellite(*choice)), props);
    }

    return snap;
}

TopologySnapshot snapshot(const Scenario& scenario, const SimInstant& t) {
    if (t.epoch_utc != scenario.epoch_utc)
        throw ConfigError("snapshot instant epoch differs from scenario epoch");
    ScenarioModel model(scenario);
    return model.snapshot_at(t.offset_ms);
}

}  // namespace orbit
