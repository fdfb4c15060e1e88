#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "orbit/backend.hpp"

namespace orbit {

struct NetnsOptions {
    std::string prefix{"orb"};  // namespace name prefix, keep short
};

/// Real-kernel backend: one network namespace per node, a veth pair per link
/// and netem (delay/loss/rate) on both ends. Needs root and the iproute2
/// tools; call available() before constructing. Nodes are suspended by
/// downing their interfaces.
class NetnsBackend : public BackendOps {
public:
    /// True when running as root with working `ip netns` and `tc` binaries
    /// (probed by creating and deleting a throwaway namespace).
    static bool available();

    explicit NetnsBackend(NetnsOptions opts = {});
    ~NetnsBackend() override;

    void create_node(const NodeRef& node, const std::string& profile) override;
    void start_node(const NodeRef& node) override;
    void suspend_node(const NodeRef& node) override;
    void resume_node(const NodeRef& node) override;
    void destroy_node(const NodeRef& node) override;
    void add_link(const LinkKey& link, const LinkProps& props) override;
    void update_link(const LinkKey& link, const LinkProps& props) override;
    void remove_link(const LinkKey& link) override;
    std::string name() const override { return "linux-netns"; }

    /// Namespace name for a node, e.g. "orb-s0.1.2" (for external tools).
    std::string netns_name(const NodeRef& node) const;

private:
    struct LinkInfo {
        std::string dev_a;  // interface living in netns of link.a
        std::string dev_b;
        std::uint32_t index{0};
    };

    void run(const std::string& cmd) const;
    void apply_qdisc(const std::string& ns, const std::string& dev, const LinkProps& props,
                     bool change) const;

    NetnsOptions opts_;
    mutable std::mutex mu_;
    std::map<NodeRef, NodeState> nodes_;
    std::map<LinkKey, LinkInfo> links_;
    std::uint32_t next_link_{0};
};

}  // namespace orbit
