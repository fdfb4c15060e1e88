#include "orbit/recording_backend.hpp"

#include <thread>

#include "orbit/errors.hpp"

namespace orbit {

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::create_node: return "create_node";
        case OpKind::start_node: return "start_node";
        case OpKind::suspend_node: return "suspend_node";
        case OpKind::resume_node: return "resume_node";
        case OpKind::destroy_node: return "destroy_node";
        case OpKind::add_link: return "add_link";
        case OpKind::update_link: return "update_link";
        case OpKind::remove_link: return "remove_link";
    }
    return "?";
}

RecordingBackend::RecordingBackend(LatencyModel latency)
    : latency_(latency), rng_(latency.seed), t0_(std::chrono::steady_clock::now()) {}

void RecordingBackend::spend_latency() {
    if (latency_.constant_us <= 0.0 && latency_.jitter_us <= 0.0) return;
    double us = latency_.constant_us;
    if (latency_.jitter_us > 0.0)
        us += std::uniform_real_distribution<double>(0.0, latency_.jitter_us)(rng_);
    // Sleep outside the lock would reorder the ledger; the emulated substrate
    // serializes operations anyway, so sleeping while holding mu_ is the model.
    std::this_thread::sleep_for(std::chrono::duration<double, std::micro>(us));
}

void RecordingBackend::record(LedgerEntry e) {
    e.seq = next_seq_++;
    e.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    entries_.push_back(std::move(e));
}

void RecordingBackend::create_node(const NodeRef& node, const std::string& profile) {
    std::lock_guard lock(mu_);
    spend_latency();
    if (nodes_.count(node))
        throw BackendError("create_node: " + node_name(node) + " already exists");
    nodes_[node] = NodeState::created;
    LedgerEntry e;
    e.kind = OpKind::create_node;
    e.node = node;
    e.profile = profile;
    record(std::move(e));
}

void RecordingBackend::start_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    spend_latency();
    auto it = nodes_.find(node);
    if (it == nodes_.end() || it->second != NodeState::created)
        throw BackendError("start_node: " + node_name(node) + " is not in created state");
    it->second = NodeState::started;
    LedgerEntry e;
    e.kind = OpKind::start_node;
    e.node = node;
    record(std::move(e));
}

void RecordingBackend::suspend_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    spend_latency();
    auto it = nodes_.find(node);
    if (it == nodes_.end() || it->second != NodeState::started)
        throw BackendError("suspend_node: " + node_name(node) + " is not started");
    it->second = NodeState::suspended;
    LedgerEntry e;
    e.kind = OpKind::suspend_node;
    e.node = node;
    record(std::move(e));
}

void RecordingBackend::resume_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    spend_latency();
    auto it = nodes_.find(node);
    if (it == nodes_.end() || it->second != NodeState::suspended)
        throw BackendError("resume_node: " + node_name(node) + " is not suspended");
    it->second = NodeState::started;
    LedgerEntry e;
    e.kind = OpKind::resume_node;
    e.node = node;
    record(std::move(e));
}

void RecordingBackend::destroy_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    spend_latency();
    if (nodes_.erase(node) == 0)
        throw BackendError("destroy_node: " + node_name(node) + " does not exist");
    for (auto it = links_.begin(); it != links_.end();) {
        if (it->first.a == node || it->first.b == node)
            it = links_.erase(it);
        else
            ++it;
    }
    LedgerEntry e;
    e.kind = OpKind::destroy_node;
    e.node = node;
    record(std::move(e));
}

void RecordingBackend::add_link(const LinkKey& link, const LinkProps& props) {
    std::lock_guard lock(mu_);
    spend_latency();
    if (links_.count(link))
        throw BackendError("add_link: " + node_name(link.a) + "-" + node_name(link.b) +
                           " already exists");
    for (const NodeRef* end : {&link.a, &link.b}) {
        auto it = nodes_.find(*end);
        if (it == nodes_.end() || it->second != NodeState::started)
            throw BackendError("add_link: endpoint " + node_name(*end) + " is not started");
    }
    links_[link] = props;
    LedgerEntry e;
    e.kind = OpKind::add_link;
    e.link = link;
    e.props = props;
    record(std::move(e));
}

void RecordingBackend::update_link(const LinkKey& link, const LinkProps& props) {
    std::lock_guard lock(mu_);
    spend_latency();
    auto it = links_.find(link);
    if (it == links_.end())
        throw BackendError("update_link: " + node_name(link.a) + "-" + node_name(link.b) +
                           " does not exist");
    it->second = props;
    LedgerEntry e;
    e.kind = OpKind::update_link;
    e.link = link;
    e.props = props;
    record(std::move(e));
}

void RecordingBackend::remove_link(const LinkKey& link) {
    std::lock_guard lock(mu_);
    spend_latency();
    if (links_.erase(link) == 0)
        throw BackendError("remove_link: " + node_name(link.a) + "-" + node_name(link.b) +
                           " does not exist");
    LedgerEntry e;
    e.kind = OpKind::remove_link;
    e.link = link;
    record(std::move(e));
}

std::vector<LedgerEntry> RecordingBackend::ledger() const {
    std::lock_guard lock(mu_);
    return entries_;
}

std::map<NodeRef, NodeState> RecordingBackend::nodes() const {
    std::lock_guard lock(mu_);
    return nodes_;
}

std::map<LinkKey, LinkProps> RecordingBackend::links() const {
    std::lock_guard lock(mu_);
    return links_;
}

}  // namespace orbit
