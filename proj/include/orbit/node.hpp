#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "orbit/orbits.hpp"

namespace orbit {

enum class NodeKind : std::uint8_t { ground = 0, satellite = 1 };

/// Identity of an emulated node. Ground stations are referenced by their
/// index into the scenario's ground_stations list; satellites by shell,
/// plane and slot. The ordering below is the canonical node order used for
/// every deterministic tie-break in the project.
struct NodeRef {
    NodeKind kind{NodeKind::ground};
    SatelliteId sat{};
    int gs_index{0};

    static NodeRef satellite(const SatelliteId& id) {
        NodeRef n;
        n.kind = NodeKind::satellite;
        n.sat = id;
        return n;
    }
    static NodeRef ground(int index) {
        NodeRef n;
        n.kind = NodeKind::ground;
        n.gs_index = index;
        return n;
    }

    bool is_satellite() const { return kind == NodeKind::satellite; }

    friend auto operator<=>(const NodeRef& a, const NodeRef& b) {
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        if (a.kind == NodeKind::ground) return a.gs_index <=> b.gs_index;
        return a.sat <=> b.sat;
    }
    friend bool operator==(const NodeRef& a, const NodeRef& b) {
        return (a <=> b) == 0;
    }
};

/// Compact self-contained id: "g<index>" or "s<shell>.<plane>.<slot>".
std::string node_name(const NodeRef& n);

/// Inverse of node_name. Throws ConfigError on malformed input.
NodeRef parse_node_name(const std::string& s);

/// Unordered pair of endpoints, normalized so a <= b.
struct LinkKey {
    NodeRef a;
    NodeRef b;

    LinkKey() = default;
    LinkKey(const NodeRef& x, const NodeRef& y) : a(x), b(y) {
        if (b < a) std::swap(a, b);
    }

    bool is_gsl() const { return a.kind != b.kind; }
    bool is_isl() const {
        return a.kind == NodeKind::satellite && b.kind == NodeKind::satellite;
    }

    friend auto operator<=>(const LinkKey& x, const LinkKey& y) {
        if (auto c = x.a <=> y.a; c != 0) return c;
        return x.b <=> y.b;
    }
    friend bool operator==(const LinkKey& x, const LinkKey& y) {
        return (x <=> y) == 0;
    }
};

}  // namespace orbit
