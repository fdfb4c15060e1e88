#include "orbit/node.hpp"

#include <cstdio>

#include "orbit/errors.hpp"

namespace orbit {

std::string node_name(const NodeRef& n) {
    if (n.kind == NodeKind::ground) return "g" + std::to_string(n.gs_index);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "s%d.%d.%d", n.sat.shell, n.sat.plane, n.sat.slot);
    return buf;
}

NodeRef parse_node_name(const std::string& s) {
    if (s.size() >= 2 && s[0] == 'g') {
        int idx = 0, n = 0;
        if (std::sscanf(s.c_str(), "g%d%n", &idx, &n) == 1 && static_cast<size_t>(n) == s.size() &&
            idx >= 0)
            return NodeRef::ground(idx);
    } else if (s.size() >= 2 && s[0] == 's') {
        SatelliteId id;
        int n = 0;
        if (std::sscanf(s.c_str(), "s%d.%d.%d%n", &id.shell, &id.plane, &id.slot, &n) == 3 &&
            static_cast<size_t>(n) == s.size() && id.shell >= 0 && id.plane >= 0 && id.slot >= 0)
            return NodeRef::satellite(id);
    }
    throw ConfigError("malformed node id: '" + s + "'");
}

}  // namespace orbit
