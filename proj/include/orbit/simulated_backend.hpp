#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "orbit/backend.hpp"
#include "orbit/netgraph.hpp"

namespace orbit {

struct SimParams {
    TopologyMode mode{TopologyMode::grid};
    std::int64_t per_hop_processing_us{100};  // switching cost added per traversed hop
    bool gsl_contention{false};               // concurrent sessions split GSL capacity
};

enum class MeasKind { ping, throughput };

/// One probe (ping) or one one-second interval (throughput).
struct ProbeSample {
    double t_s{0.0};     // virtual time of the sample
    double value{0.0};   // rtt in microseconds / goodput in Mbit/s
    int hops{0};         // path hops at sample time, 0 when unreachable
};

struct MeasurementRecord {
    MeasKind kind{MeasKind::ping};
    double t_start_s{0.0};
    int requested{0};                  // probes requested / intervals run
    std::vector<ProbeSample> series;   // ping: successful echoes; throughput: every interval
    double loss_pct{0.0};              // ping: lost/requested; throughput: path loss at start
    int path_hops{0};                  // hops at t_start, 0 when unreachable
};

void write_measurements_csv(const std::vector<MeasurementRecord>& records,
                            const std::string& path);

/// Packet-level stand-in: mirrors topology updates into a NetGraph and
/// answers ping/throughput measurements from the link state itself, with
/// seeded randomness so every series is reproducible bit-for-bit.
///
/// A ping echo takes 2 * (path delay + hops * per_hop_processing) and is
/// dropped per direction with the composed path loss. A throughput interval
/// yields min(target, bottleneck, contention share) * (1 - path loss).
class SimulatedBackend : public BackendOps {
public:
    explicit SimulatedBackend(SimParams params = {});

    void create_node(const NodeRef& node, const std::string& profile) override;
    void start_node(const NodeRef& node) override;
    void suspend_node(const NodeRef& node) override;
    void resume_node(const NodeRef& node) override;
    void destroy_node(const NodeRef& node) override;
    void add_link(const LinkKey& link, const LinkProps& props) override;
    void update_link(const LinkKey& link, const LinkProps& props) override;
    void remove_link(const LinkKey& link) override;
    std::string name() const override { return "simulated"; }

    const SimParams& params() const { return params_; }
    NetGraph graph_copy() const;
    std::optional<PathResult> path(const NodeRef& src, const NodeRef& dst) const;

    /// One echo; nullopt when the path is down or the packet was dropped.
    std::optional<ProbeSample> ping_probe(const NodeRef& src, const NodeRef& dst,
                                          std::mt19937_64& rng) const;

    /// `count` echoes spaced `interval_s` apart starting at `t_start_s`.
    /// `advance`, when set, is called with each probe's virtual time before
    /// the probe fires, so the caller can fold in topology updates that are
    /// due; it runs without the backend lock held.
    MeasurementRecord sim_ping(const NodeRef& src, const NodeRef& dst, int count,
                               double interval_s, std::uint64_t seed, double t_start_s = 0.0,
                               const std::function<void(double)>& advance = {});

    /// Concurrent transfer sessions: goodput of each open session is computed
    /// per interval, with GSL capacity split equally among the sessions
    /// crossing it when contention is enabled.
    int open_session(const NodeRef& src, const NodeRef& dst, double target_mbps);
    void close_session(int id);
    std::map<int, ProbeSample> interval_goodput(double t_s) const;

    /// Single-session convenience wrapper around open/interval/close.
    MeasurementRecord sim_throughput(const NodeRef& src, const NodeRef& dst, double target_mbps,
                                     int intervals, double t_start_s = 0.0,
                                     const std::function<void(double)>& advance = {});

private:
    struct Session {
        NodeRef src;
        NodeRef dst;
        double target_mbps{0.0};
    };

    std::map<int, ProbeSample> interval_goodput_locked(double t_s) const;

    SimParams params_;
    mutable std::mutex mu_;
    NetGraph graph_;
    std::map<int, Session> sessions_;
    int next_session_{1};
};

}  // namespace orbit
