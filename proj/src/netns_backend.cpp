#include "orbit/netns_backend.hpp"

#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>

#include "orbit/errors.hpp"
#include "orbit/log.hpp"

namespace orbit {

namespace {

// Run through the shell, capture combined output, return (status, output).
std::pair<int, std::string> shell(const std::string& cmd) {
    const std::string full = cmd + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) return {-1, "popen failed"};
    std::string out;
    std::array<char, 512> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {status, out};
}

}  // namespace

bool NetnsBackend::available() {
    if (geteuid() != 0) return false;
    if (shell("ip -V >/dev/null").first != 0) return false;
    if (shell("tc -V >/dev/null").first != 0) return false;
    const std::string probe = "orbprobe" + std::to_string(getpid());
    if (shell("ip netns add " + probe).first != 0) return false;
    shell("ip netns del " + probe);
    return true;
}

NetnsBackend::NetnsBackend(NetnsOptions opts) : opts_(std::move(opts)) {}

NetnsBackend::~NetnsBackend() {
    // Best-effort cleanup so aborted runs do not leak namespaces.
    std::lock_guard lock(mu_);
    for (const auto& [node, state] : nodes_) {
        (void)state;
        shell("ip netns del " + netns_name(node));
    }
}

std::string NetnsBackend::netns_name(const NodeRef& node) const {
    return opts_.prefix + "-" + node_name(node);
}

void NetnsBackend::run(const std::string& cmd) const {
    auto [status, out] = shell(cmd);
    if (status != 0)
        throw BackendError("command failed (" + std::to_string(status) + "): " + cmd +
                           (out.empty() ? "" : ": " + out));
    log::debug("netns: " + cmd);
}

void NetnsBackend::apply_qdisc(const std::string& ns, const std::string& dev,
                               const LinkProps& props, bool change) const {
    char spec[160];
    std::snprintf(spec, sizeof(spec), "netem delay %lldus loss %.4f%% rate %.3fmbit",
                  static_cast<long long>(props.delay_us), props.loss_pct, props.rate_mbps);
    run("ip netns exec " + ns + " tc qdisc " + (change ? "change" : "add") + " dev " + dev +
        " root " + spec);
}

void NetnsBackend::create_node(const NodeRef& node, const std::string&) {
    std::lock_guard lock(mu_);
    if (nodes_.count(node))
        throw BackendError("create_node: " + node_name(node) + " already exists");
    run("ip netns add " + netns_name(node));
    nodes_[node] = NodeState::created;
}

void NetnsBackend::start_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    auto it = nodes_.find(node);
    if (it == nodes_.end() || it->second != NodeState::created)
        throw BackendError("start_node: " + node_name(node) + " is not in created state");
    run("ip netns exec " + netns_name(node) + " ip link set lo up");
    it->second = NodeState::started;
}

void NetnsBackend::suspend_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    auto it = nodes_.find(node);
    if (it == nodes_.end() || it->second != NodeState::started)
        throw BackendError("suspend_node: " + node_name(node) + " is not started");
    run("ip netns exec " + netns_name(node) + " ip link set lo down");
    it->second = NodeState::suspended;
}

void NetnsBackend::resume_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    auto it = nodes_.find(node);
    if (it == nodes_.end() || it->second != NodeState::suspended)
        throw BackendError("resume_node: " + node_name(node) + " is not suspended");
    run("ip netns exec " + netns_name(node) + " ip link set lo up");
    it->second = NodeState::started;
}

void NetnsBackend::destroy_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    if (!nodes_.count(node))
        throw BackendError("destroy_node: " + node_name(node) + " does not exist");
    run("ip netns del " + netns_name(node));
    nodes_.erase(node);
    for (auto it = links_.begin(); it != links_.end();) {
        if (it->first.a == node || it->first.b == node)
            it = links_.erase(it);  // veth pair died with the namespace
        else
            ++it;
    }
}

void NetnsBackend::add_link(const LinkKey& link, const LinkProps& props) {
    std::lock_guard lock(mu_);
    if (links_.count(link))
        throw BackendError("add_link: " + node_name(link.a) + "-" + node_name(link.b) +
                           " already exists");
    for (const NodeRef* end : {&link.a, &link.b}) {
        auto it = nodes_.find(*end);
        if (it == nodes_.end() || it->second != NodeState::started)
            throw BackendError("add_link: endpoint " + node_name(*end) + " is not started");
    }

    LinkInfo info;
    info.index = next_link_++;
    char dev[16];
    std::snprintf(dev, sizeof(dev), "o%06xa", info.index);  // IFNAMSIZ-safe
    info.dev_a = dev;
    dev[7] = 'b';
    info.dev_b = dev;
    const std::string ns_a = netns_name(link.a);
    const std::string ns_b = netns_name(link.b);

    run("ip link add " + info.dev_a + " netns " + ns_a + " type veth peer name " + info.dev_b +
        " netns " + ns_b);
    // /30 per link out of 10.0.0.0/8, derived from the link index.
    char addr[64];
    const std::uint32_t base = info.index * 4;
    std::snprintf(addr, sizeof(addr), "10.%u.%u.%u/30", (base >> 16) & 0xff, (base >> 8) & 0xff,
                  (base & 0xff) | 1);
    run("ip netns exec " + ns_a + " ip addr add " + addr + " dev " + info.dev_a);
    std::snprintf(addr, sizeof(addr), "10.%u.%u.%u/30", (base >> 16) & 0xff, (base >> 8) & 0xff,
                  (base & 0xff) | 2);
    run("ip netns exec " + ns_b + " ip addr add " + addr + " dev " + info.dev_b);
    run("ip netns exec " + ns_a + " ip link set " + info.dev_a + " up");
    run("ip netns exec " + ns_b + " ip link set " + info.dev_b + " up");

    // Each root qdisc shapes only its own egress direction, so the full
    // one-way delay goes on both ends; delay and loss are then paid exactly
    // once per direction.
    apply_qdisc(ns_a, info.dev_a, props, false);
    apply_qdisc(ns_b, info.dev_b, props, false);

    links_[link] = std::move(info);
}

void NetnsBackend::update_link(const LinkKey& link, const LinkProps& props) {
    std::lock_guard lock(mu_);
    auto it = links_.find(link);
    if (it == links_.end())
        throw BackendError("update_link: " + node_name(link.a) + "-" + node_name(link.b) +
                           " does not exist");
    apply_qdisc(netns_name(link.a), it->second.dev_a, props, true);
    apply_qdisc(netns_name(link.b), it->second.dev_b, props, true);
}

void NetnsBackend::remove_link(const LinkKey& link) {
    std::lock_guard lock(mu_);
    auto it = links_.find(link);
    if (it == links_.end())
        throw BackendError("remove_link: " + node_name(link.a) + "-" + node_name(link.b) +
                           " does not exist");
    // Deleting one end of the veth pair removes the peer as well.
    run("ip netns exec " + netns_name(link.a) + " ip link del " + it->second.dev_a);
    links_.erase(it);
}

}  // namespace orbit
