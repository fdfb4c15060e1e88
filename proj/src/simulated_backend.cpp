#include "orbit/simulated_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "orbit/errors.hpp"

namespace orbit {

namespace {

// Uniform [0,1) from the top 53 bits of the generator, so the stream does not
// depend on the standard library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void write_measurements_csv(const std::vector<MeasurementRecord>& records,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "kind,t_s,value,unit,hops\n";
    char buf[160];
    for (const auto& rec : records) {
        const char* kind = rec.kind == MeasKind::ping ? "ping" : "throughput";
        const char* unit = rec.kind == MeasKind::ping ? "us" : "mbps";
        for (const auto& s : rec.series) {
            std::snprintf(buf, sizeof(buf), "%s,%.3f,%.6f,%s,%d\n", kind, s.t_s, s.value, unit,
                          s.hops);
            out << buf;
        }
    }
    if (!out) throw IoError("short write to " + path);
}

SimulatedBackend::SimulatedBackend(SimParams params) : params_(params) {}

void SimulatedBackend::create_node(const NodeRef& node, const std::string&) {
    std::lock_guard lock(mu_);
    if (graph_.has_node(node))
        throw BackendError("create_node: " + node_name(node) + " already exists");
    graph_.upsert_node(node, NodeState::created);
}

void SimulatedBackend::start_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    if (graph_.node_state(node) != NodeState::created)
        throw BackendError("start_node: " + node_name(node) + " is not in created state");
    graph_.upsert_node(node, NodeState::started);
}

void SimulatedBackend::suspend_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    if (graph_.node_state(node) != NodeState::started)
        throw BackendError("suspend_node: " + node_name(node) + " is not started");
    graph_.upsert_node(node, NodeState::suspended);
}

void SimulatedBackend::resume_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    if (graph_.node_state(node) != NodeState::suspended)
        throw BackendError("resume_node: " + node_name(node) + " is not suspended");
    graph_.upsert_node(node, NodeState::started);
}

void SimulatedBackend::destroy_node(const NodeRef& node) {
    std::lock_guard lock(mu_);
    if (!graph_.has_node(node))
        throw BackendError("destroy_node: " + node_name(node) + " does not exist");
    graph_.erase_node(node);
}

void SimulatedBackend::add_link(const LinkKey& link, const LinkProps& props) {
    std::lock_guard lock(mu_);
    for (const NodeRef* end : {&link.a, &link.b}) {
        if (graph_.node_state(*end) != NodeState::started)
            throw BackendError("add_link: endpoint " + node_name(*end) + " is not started");
    }
    graph_.add_link(link, props);
}

void SimulatedBackend::update_link(const LinkKey& link, const LinkProps& props) {
    std::lock_guard lock(mu_);
    graph_.update_link(link, props);
}

void SimulatedBackend::remove_link(const LinkKey& link) {
    std::lock_guard lock(mu_);
    graph_.remove_link(link);
}

NetGraph SimulatedBackend::graph_copy() const {
    std::lock_guard lock(mu_);
    return graph_;
}

std::optional<PathResult> SimulatedBackend::path(const NodeRef& src, const NodeRef& dst) const {
    std::lock_guard lock(mu_);
    return shortest_path(graph_, src, dst, params_.mode, params_.per_hop_processing_us);
}

std::optional<ProbeSample> SimulatedBackend::ping_probe(const NodeRef& src, const NodeRef& dst,
                                                        std::mt19937_64& rng) const {
    std::lock_guard lock(mu_);
    auto p = shortest_path(graph_, src, dst, params_.mode, params_.per_hop_processing_us);
    if (!p) return std::nullopt;
    // Independent drop per direction with the composed one-way loss.
    if (uniform01(rng) < p->loss_one_way) return std::nullopt;
    if (uniform01(rng) < p->loss_one_way) return std::nullopt;
    ProbeSample s;
    s.value = 2.0 * static_cast<double>(p->delay_us + p->hops * params_.per_hop_processing_us);
    s.hops = p->hops;
    return s;
}

MeasurementRecord SimulatedBackend::sim_ping(const NodeRef& src, const NodeRef& dst, int count,
                                             double interval_s, std::uint64_t seed,
                                             double t_start_s,
                                             const std::function<void(double)>& advance) {
    MeasurementRecord rec;
    rec.kind = MeasKind::ping;
    rec.t_start_s = t_start_s;
    rec.requested = count;
    if (advance) advance(t_start_s);
    if (auto p = path(src, dst)) rec.path_hops = p->hops;

    std::mt19937_64 rng(seed);
    int lost = 0;
    for (int i = 0; i < count; ++i) {
        const double t = t_start_s + i * interval_s;
        if (advance) advance(t);
        auto s = ping_probe(src, dst, rng);
        if (!s) {
            ++lost;
            continue;
        }
        s->t_s = t;
        rec.series.push_back(*s);
    }
    rec.loss_pct = count > 0 ? 100.0 * lost / count : 0.0;
    return rec;
}

int SimulatedBackend::open_session(const NodeRef& src, const NodeRef& dst, double target_mbps) {
    std::lock_guard lock(mu_);
    const int id = next_session_++;
    sessions_[id] = Session{src, dst, target_mbps};
    return id;
}

void SimulatedBackend::close_session(int id) {
    std::lock_guard lock(mu_);
    if (sessions_.erase(id) == 0)
        throw BackendError("close_session: unknown session " + std::to_string(id));
}

std::map<int, ProbeSample> SimulatedBackend::interval_goodput_locked(double t_s) const {
    // Resolve every session's current path first, then count how many
    // sessions cross each GSL; capacity splits equally among them.
    std::map<int, std::optional<PathResult>> paths;
    std::map<LinkKey, int> gsl_users;
    for (const auto& [id, sess] : sessions_) {
        auto p = shortest_path(graph_, sess.src, sess.dst, params_.mode,
                               params_.per_hop_processing_us);
        if (p && params_.gsl_contention) {
            for (const LinkKey& k : p->links)
                if (k.is_gsl()) ++gsl_users[k];
        }
        paths.emplace(id, std::move(p));
    }

    std::map<int, ProbeSample> out;
    for (const auto& [id, sess] : sessions_) {
        ProbeSample s;
        s.t_s = t_s;
        const auto& p = paths.at(id);
        if (p) {
            double cap = p->bottleneck_mbps;
            if (params_.gsl_contention) {
                for (const LinkKey& k : p->links) {
                    if (!k.is_gsl()) continue;
                    const LinkProps* props = graph_.link(k);
                    cap = std::min(cap, props->rate_mbps / gsl_users.at(k));
                }
            }
            s.value = std::min(sess.target_mbps, cap) * (1.0 - p->loss_one_way);
            s.hops = p->hops;
        }
        out.emplace(id, s);
    }
    return out;
}

std::map<int, ProbeSample> SimulatedBackend::interval_goodput(double t_s) const {
    std::lock_guard lock(mu_);
    return interval_goodput_locked(t_s);
}

MeasurementRecord SimulatedBackend::sim_throughput(const NodeRef& src, const NodeRef& dst,
                                                   double target_mbps, int intervals,
                                                   double t_start_s,
                                                   const std::function<void(double)>& advance) {
    MeasurementRecord rec;
    rec.kind = MeasKind::throughput;
    rec.t_start_s = t_start_s;
    rec.requested = intervals;
    if (advance) advance(t_start_s);
    if (auto p = path(src, dst)) {
        rec.path_hops = p->hops;
        rec.loss_pct = p->loss_one_way * 100.0;
    }

    const int id = open_session(src, dst, target_mbps);
    for (int i = 0; i < intervals; ++i) {
        const double t = t_start_s + i;
        if (advance) advance(t);
        rec.series.push_back(interval_goodput(t).at(id));
    }
    close_session(id);
    return rec;
}

}  // namespace orbit
