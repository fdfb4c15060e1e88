#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "orbit/node.hpp"
#include "orbit/topology.hpp"

namespace orbit {

/// How a packet path is accounted. grid routes hop-by-hop over the link
/// graph; star collapses the same underlying path into a two-hop
/// terminal-hub-terminal view with identical end-to-end delay and loss.
enum class TopologyMode { grid, star };

/// Mutable link-state graph mirroring what a packet-level substrate would
/// hold. Adjacency lists stay sorted so traversals are deterministic.
class NetGraph {
public:
    void upsert_node(const NodeRef& n, NodeState st);
    void erase_node(const NodeRef& n);
    void add_link(const LinkKey& k, const LinkProps& p);
    void update_link(const LinkKey& k, const LinkProps& p);
    void remove_link(const LinkKey& k);

    bool has_node(const NodeRef& n) const { return nodes_.count(n) != 0; }
    std::optional<NodeState> node_state(const NodeRef& n) const;
    const LinkProps* link(const LinkKey& k) const;
    const std::map<NodeRef, NodeState>& nodes() const { return nodes_; }
    const std::map<LinkKey, LinkProps>& links() const { return links_; }
    const std::vector<NodeRef>& neighbors(const NodeRef& n) const;

private:
    std::map<NodeRef, NodeState> nodes_;
    std::map<LinkKey, LinkProps> links_;
    std::map<NodeRef, std::vector<NodeRef>> adj_;
};

/// A resolved route between two nodes.
struct PathResult {
    std::vector<NodeRef> nodes;    // traversed nodes, src..dst inclusive
    std::vector<LinkKey> links;    // traversed links, len = nodes.size()-1
    int hops{0};                   // reported hop count (2 in star mode)
    std::int64_t delay_us{0};      // sum of link delays
    double loss_one_way{0.0};      // 1 - prod(1 - loss_i)
    double bottleneck_mbps{0.0};   // min link rate
};

/// Minimum-cost path from src to dst over started nodes, or nullopt when
/// disconnected. Edge cost is link delay plus `per_hop_cost_us` (the
/// switching cost a packet pays at each hop; without it a +grid mesh routes
/// through absurdly many short inter-plane hops). Among equal-cost paths the
/// lexicographically smallest node sequence wins, so results are stable
/// across runs and platforms. In star mode the underlying path is found the
/// same way but reported as two hops.
std::optional<PathResult> shortest_path(const NetGraph& g, const NodeRef& src, const NodeRef& dst,
                                        TopologyMode mode = TopologyMode::grid,
                                        std::int64_t per_hop_cost_us = 0);

}  // namespace orbit
