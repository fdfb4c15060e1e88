#include "orbit/netgraph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include "orbit/errors.hpp"

namespace orbit {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

void insert_sorted(std::vector<NodeRef>& v, const NodeRef& n) {
    auto it = std::lower_bound(v.begin(), v.end(), n);
    if (it == v.end() || *it != n) v.insert(it, n);
}

void erase_value(std::vector<NodeRef>& v, const NodeRef& n) {
    auto it = std::lower_bound(v.begin(), v.end(), n);
    if (it != v.end() && *it == n) v.erase(it);
}

}  // namespace

void NetGraph::upsert_node(const NodeRef& n, NodeState st) { nodes_[n] = st; }

void NetGraph::erase_node(const NodeRef& n) {
    nodes_.erase(n);
    for (auto it = links_.begin(); it != links_.end();) {
        if (it->first.a == n || it->first.b == n) {
            erase_value(adj_[it->first.a], it->first.b);
            erase_value(adj_[it->first.b], it->first.a);
            it = links_.erase(it);
        } else {
            ++it;
        }
    }
    adj_.erase(n);
}

void NetGraph::add_link(const LinkKey& k, const LinkProps& p) {
    if (!links_.emplace(k, p).second)
        throw BackendError("add_link: " + node_name(k.a) + "-" + node_name(k.b) +
                           " already exists");
    insert_sorted(adj_[k.a], k.b);
    insert_sorted(adj_[k.b], k.a);
}

void NetGraph::update_link(const LinkKey& k, const LinkProps& p) {
    auto it = links_.find(k);
    if (it == links_.end())
        throw BackendError("update_link: " + node_name(k.a) + "-" + node_name(k.b) +
                           " does not exist");
    it->second = p;
}

void NetGraph::remove_link(const LinkKey& k) {
    if (links_.erase(k) == 0)
        throw BackendError("remove_link: " + node_name(k.a) + "-" + node_name(k.b) +
                           " does not exist");
    erase_value(adj_[k.a], k.b);
    erase_value(adj_[k.b], k.a);
}

std::optional<NodeState> NetGraph::node_state(const NodeRef& n) const {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) return std::nullopt;
    return it->second;
}

const LinkProps* NetGraph::link(const LinkKey& k) const {
    auto it = links_.find(k);
    return it == links_.end() ? nullptr : &it->second;
}

const std::vector<NodeRef>& NetGraph::neighbors(const NodeRef& n) const {
    static const std::vector<NodeRef> empty;
    auto it = adj_.find(n);
    return it == adj_.end() ? empty : it->second;
}

namespace {

bool routable(const NetGraph& g, const NodeRef& n) {
    return g.node_state(n) == NodeState::started;
}

std::map<NodeRef, std::int64_t> dijkstra(const NetGraph& g, const NodeRef& from,
                                         std::int64_t per_hop_cost_us) {
    std::map<NodeRef, std::int64_t> dist;
    using Item = std::pair<std::int64_t, NodeRef>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[from] = 0;
    queue.emplace(0, from);
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        auto du = dist.find(u);
        if (du != dist.end() && d > du->second) continue;
        for (const NodeRef& v : g.neighbors(u)) {
            if (!routable(g, v)) continue;
            const LinkProps* p = g.link(LinkKey(u, v));
            const std::int64_t nd = d + p->delay_us + per_hop_cost_us;
            auto dv = dist.find(v);
            if (dv == dist.end() || nd < dv->second) {
                dist[v] = nd;
                queue.emplace(nd, v);
            }
        }
    }
    return dist;
}

std::int64_t dist_or_inf(const std::map<NodeRef, std::int64_t>& dist, const NodeRef& n) {
    auto it = dist.find(n);
    return it == dist.end() ? kInf : it->second;
}

}  // namespace

std::optional<PathResult> shortest_path(const NetGraph& g, const NodeRef& src, const NodeRef& dst,
                                        TopologyMode mode, std::int64_t per_hop_cost_us) {
    if (!routable(g, src) || !routable(g, dst)) return std::nullopt;

    PathResult r;
    r.nodes.push_back(src);
    r.bottleneck_mbps = std::numeric_limits<double>::infinity();
    if (src == dst) return r;

    const auto dist_s = dijkstra(g, src, per_hop_cost_us);
    const auto dist_d = dijkstra(g, dst, per_hop_cost_us);
    const std::int64_t total = dist_or_inf(dist_s, dst);
    if (total >= kInf) return std::nullopt;

    // Walk greedily from src, always taking the smallest neighbor that still
    // admits a completion of exactly `total`. With positive costs this is the
    // lexicographically smallest minimum-cost path.
    std::set<NodeRef> visited{src};
    NodeRef cur = src;
    std::int64_t len = 0;
    while (cur != dst) {
        bool stepped = false;
        for (const NodeRef& v : g.neighbors(cur)) {
            if (!routable(g, v) || visited.count(v)) continue;
            const LinkKey k(cur, v);
            const std::int64_t step = len + g.link(k)->delay_us + per_hop_cost_us;
            if (step + dist_or_inf(dist_d, v) != total) continue;
            r.links.push_back(k);
            r.nodes.push_back(v);
            visited.insert(v);
            len = step;
            cur = v;
            stepped = true;
            break;
        }
        if (!stepped) return std::nullopt;  // only reachable with zero-cost cycles
    }

    double pass = 1.0;
    for (const LinkKey& k : r.links) {
        const LinkProps& p = *g.link(k);
        r.delay_us += p.delay_us;
        pass *= 1.0 - p.loss_pct / 100.0;
        r.bottleneck_mbps = std::min(r.bottleneck_mbps, p.rate_mbps);
    }
    r.loss_one_way = 1.0 - pass;
    r.hops = mode == TopologyMode::star ? 2 : static_cast<int>(r.links.size());
    return r;
}

}  // namespace orbit
