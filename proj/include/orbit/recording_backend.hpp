#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "orbit/backend.hpp"

namespace orbit {

enum class OpKind {
    create_node,
    start_node,
    suspend_node,
    resume_node,
    destroy_node,
    add_link,
    update_link,
    remove_link,
};

const char* op_kind_name(OpKind k);

/// One backend call as observed by the recording backend.
struct LedgerEntry {
    std::uint64_t seq{0};
    double wall_s{0.0};  // seconds since backend construction
    OpKind kind{OpKind::create_node};
    NodeRef node;        // node ops
    std::string profile; // create_node only
    LinkKey link;        // link ops
    LinkProps props;     // add/update only

    bool is_node_op() const { return kind <= OpKind::destroy_node; }
};

/// Synthetic per-operation cost: constant + uniform jitter in [0, jitter_us).
/// Zero everywhere means calls return immediately.
struct LatencyModel {
    double constant_us{0.0};
    double jitter_us{0.0};
    std::uint64_t seed{0};
};

/// In-memory backend that enforces the full BackendOps contract, sleeps per
/// the latency model and appends every call to an ordered ledger. This is
/// both the test double and the load generator for scheduling benchmarks.
class RecordingBackend : public BackendOps {
public:
    explicit RecordingBackend(LatencyModel latency = {});

    void create_node(const NodeRef& node, const std::string& profile) override;
    void start_node(const NodeRef& node) override;
    void suspend_node(const NodeRef& node) override;
    void resume_node(const NodeRef& node) override;
    void destroy_node(const NodeRef& node) override;
    void add_link(const LinkKey& link, const LinkProps& props) override;
    void update_link(const LinkKey& link, const LinkProps& props) override;
    void remove_link(const LinkKey& link) override;
    std::string name() const override { return "recording"; }

    std::vector<LedgerEntry> ledger() const;
    std::map<NodeRef, NodeState> nodes() const;
    std::map<LinkKey, LinkProps> links() const;

private:
    void record(LedgerEntry e);
    void spend_latency();

    LatencyModel latency_;
    mutable std::mutex mu_;
    std::mt19937_64 rng_;
    std::chrono::steady_clock::time_point t0_;
    std::uint64_t next_seq_{0};
    std::vector<LedgerEntry> entries_;
    std::map<NodeRef, NodeState> nodes_;
    std::map<LinkKey, LinkProps> links_;
};

}  // namespace orbit
