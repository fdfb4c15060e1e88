#include "orbit/trace.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "orbit/errors.hpp"
#include "orbit/log.hpp"

namespace orbit {

using nlohmann::json;

namespace {

// Diff one ordered link map. `a` is the already-emitted (folded) state, so
// quantization suppression naturally accumulates drift until it crosses the
// threshold.
void diff_link_map(const std::map<LinkKey, LinkProps>& a, const std::map<LinkKey, LinkProps>& b,
                   std::int64_t quantization_us, StepDiff& out) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            out.links_removed.push_back(ia->first);
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            out.links_added.emplace_back(ib->first, ib->second);
            ++ib;
        } else {
            if (ia->second != ib->second) {
                const bool delay_only = ia->second.loss_pct == ib->second.loss_pct &&
                                        ia->second.rate_mbps == ib->second.rate_mbps;
                const std::int64_t drift = std::abs(ib->second.delay_us - ia->second.delay_us);
                if (!(delay_only && quantization_us > 0 && drift < quantization_us))
                    out.props_changed.emplace_back(ib->first, ib->second);
            }
            ++ia;
            ++ib;
        }
    }
}

json props_json(const LinkKey& k, const LinkProps& p) {
    return json::array(
        {node_name(k.a), node_name(k.b), p.delay_us, p.loss_pct, p.rate_mbps});
}

std::pair<LinkKey, LinkProps> props_from_json(const json& j) {
    if (!j.is_array() || j.size() != 5)
        throw IoError("link entry must be [a, b, delay_us, loss_pct, rate_mbps]");
    LinkKey key(parse_node_name(j[0].get<std::string>()), parse_node_name(j[1].get<std::string>()));
    LinkProps props{j[2].get<std::int64_t>(), j[3].get<double>(), j[4].get<double>()};
    return {key, props};
}

json diff_to_json(const StepDiff& d) {
    json nodes = json::array();
    for (const auto& [ref, st] : d.node_transitions)
        nodes.push_back(json::array({node_name(ref), node_state_name(st)}));
    json add = json::array();
    for (const auto& [key, props] : d.links_added) add.push_back(props_json(key, props));
    json del = json::array();
    for (const auto& key : d.links_removed)
        del.push_back(json::array({node_name(key.a), node_name(key.b)}));
    json upd = json::array();
    for (const auto& [key, props] : d.props_changed) upd.push_back(props_json(key, props));
    return json{{"i", d.step_index}, {"nodes", std::move(nodes)}, {"add", std::move(add)},
                {"del", std::move(del)}, {"upd", std::move(upd)}};
}

StepDiff diff_from_json(const json& j) {
    StepDiff d;
    d.step_index = j.at("i").get<std::int64_t>();
    for (const auto& e : j.at("nodes")) {
        if (!e.is_array() || e.size() != 2) throw IoError("node entry must be [name, state]");
        d.node_transitions.emplace_back(parse_node_name(e[0].get<std::string>()),
                                        parse_node_state(e[1].get<std::string>()));
    }
    for (const auto& e : j.at("add")) d.links_added.push_back(props_from_json(e));
    for (const auto& e : j.at("del")) {
        if (!e.is_array() || e.size() != 2) throw IoError("del entry must be [a, b]");
        d.links_removed.emplace_back(parse_node_name(e[0].get<std::string>()),
                                     parse_node_name(e[1].get<std::string>()));
    }
    for (const auto& e : j.at("upd")) d.props_changed.push_back(props_from_json(e));
    return d;
}

void fill_header(const Scenario& sc, TraceFile& tf) {
    tf.header.format_version = 1;
    tf.header.scenario_digest = scenario_digest(sc);
    tf.header.epoch_utc = sc.epoch_utc;
    tf.header.step_ms = sc.step_ms;
    tf.header.step_count = sc.step_count();
}

// Worst case the backend can ever be asked to hold: every +grid ISL plus one
// GSL per ground station.
void check_link_budget(const Scenario& sc, const ScenarioModel& model) {
    const std::size_t worst = model.isl_pair_count() + sc.ground_stations.size();
    if (worst > static_cast<std::size_t>(sc.budget.max_links))
        throw BudgetError("scenario can reach " + std::to_string(worst) + " links, budget allows " +
                          std::to_string(sc.budget.max_links));
}

}  // namespace

StepDiff diff(const TopologySnapshot& a, const TopologySnapshot& b,
              std::int64_t quantization_us) {
    StepDiff d;
    for (const auto& [ref, st] : b.nodes) {
        auto it = a.nodes.find(ref);
        if (it == a.nodes.end() || it->second != st) d.node_transitions.emplace_back(ref, st);
    }
    // Ground endpoints sort before satellites, so every GSL key precedes every
    // ISL key and diffing the two maps in this order keeps the lists sorted.
    diff_link_map(a.gsl_links, b.gsl_links, quantization_us, d);
    diff_link_map(a.isl_links, b.isl_links, quantization_us, d);
    return d;
}

void apply_diff(TopologySnapshot& state, const StepDiff& d) {
    for (const auto& [ref, st] : d.node_transitions) state.nodes[ref] = st;
    for (const auto& key : d.links_removed) {
        auto& links = key.is_gsl() ? state.gsl_links : state.isl_links;
        if (links.erase(key) == 0)
            throw ConfigError("diff removes unknown link " + node_name(key.a) + "-" +
                              node_name(key.b));
    }
    for (const auto& [key, props] : d.links_added) {
        auto& links = key.is_gsl() ? state.gsl_links : state.isl_links;
        if (!links.emplace(key, props).second)
            throw ConfigError("diff adds duplicate link " + node_name(key.a) + "-" +
                              node_name(key.b));
    }
    for (const auto& [key, props] : d.props_changed) {
        auto& links = key.is_gsl() ? state.gsl_links : state.isl_links;
        auto it = links.find(key);
        if (it == links.end())
            throw ConfigError("diff updates unknown link " + node_name(key.a) + "-" +
                              node_name(key.b));
        it->second = props;
    }
}

TraceFile precompute_reference(const Scenario& sc) {
    validate_scenario(sc);
    ScenarioModel model(sc);
    check_link_budget(sc, model);

    TraceFile tf;
    fill_header(sc, tf);
    const std::int64_t last = sc.step_count();
    tf.diffs.reserve(static_cast<std::size_t>(last) + 1);

    TopologySnapshot emitted;
    GslSelection selection(sc.ground_stations.size());
    for (std::int64_t k = 0; k <= last; ++k) {
        GslSelection next(sc.ground_stations.size());
        TopologySnapshot snap = model.snapshot_at(k * sc.step_ms, &selection, &next);
        StepDiff d = diff(emitted, snap, sc.delay_quantization_us);
        d.step_index = k;
        apply_diff(emitted, d);
        selection = std::move(next);
        tf.diffs.push_back(std::move(d));
    }
    return tf;
}

TraceFile precompute(const Scenario& sc, int workers) {
    if (workers <= 0) workers = omp_get_max_threads();

    // Sticky selection threads state from step to step, so those scenarios
    // are evaluated sequentially; the output is identical either way.
    const bool sticky = std::any_of(
        sc.ground_stations.begin(), sc.ground_stations.end(),
        [](const GroundStationConfig& g) { return g.gsl_mode == GslMode::sticky; });
    if (sticky) return precompute_reference(sc);

    validate_scenario(sc);
    ScenarioModel model(sc);
    check_link_budget(sc, model);

    TraceFile tf;
    fill_header(sc, tf);
    const std::int64_t last = sc.step_count();
    tf.diffs.reserve(static_cast<std::size_t>(last) + 1);

    // Snapshots are evaluated in bounded chunks: parallel map over the chunk,
    // then a sequential diff/fold pass. Chunking keeps peak memory at
    // O(chunk * topology) instead of holding every step at once.
    const std::int64_t chunk = std::max<std::int64_t>(16, 4 * workers);
    TopologySnapshot emitted;
    std::int64_t logged_pct = -1;
    for (std::int64_t base = 0; base <= last; base += chunk) {
        const std::int64_t n = std::min(chunk, last - base + 1);
        std::vector<TopologySnapshot> snaps(static_cast<std::size_t>(n));
#pragma omp parallel for num_threads(workers) schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            snaps[static_cast<std::size_t>(i)] = model.snapshot_at((base + i) * sc.step_ms);

        for (std::int64_t i = 0; i < n; ++i) {
            StepDiff d = diff(emitted, snaps[static_cast<std::size_t>(i)],
                              sc.delay_quantization_us);
            d.step_index = base + i;
            apply_diff(emitted, d);
            tf.diffs.push_back(std::move(d));
        }

        const std::int64_t pct = last > 0 ? (base + n - 1) * 100 / last : 100;
        if (pct / 10 > logged_pct / 10) {
            log::debug("precompute " + std::to_string(base + n - 1) + "/" + std::to_string(last) +
                       " steps (" + std::to_string(pct) + "%)");
            logged_pct = pct;
        }
    }
    return tf;
}

std::string serialize_trace(const TraceFile& t) {
    std::string out;
    json header{{"format_version", t.header.format_version},
                {"scenario_digest", t.header.scenario_digest},
                {"epoch", t.header.epoch_utc},
                {"step_seconds", static_cast<double>(t.header.step_ms) / 1000.0},
                {"step_count", t.header.step_count}};
    out += header.dump();
    out += '\n';
    for (const auto& d : t.diffs) {
        out += diff_to_json(d).dump();
        out += '\n';
    }
    return out;
}

TraceFile parse_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw IoError("trace is empty");

    TraceFile tf;
    try {
        json h = json::parse(line);
        tf.header.format_version = h.at("format_version").get<int>();
        if (tf.header.format_version != 1)
            throw IoError("unsupported trace format version " +
                          std::to_string(tf.header.format_version));
        tf.header.scenario_digest = h.at("scenario_digest").get<std::string>();
        tf.header.epoch_utc = h.at("epoch").get<std::string>();
        const double step_s = h.at("step_seconds").get<double>();
        tf.header.step_ms = std::llround(step_s * 1000.0);
        if (tf.header.step_ms <= 0 ||
            static_cast<double>(tf.header.step_ms) != step_s * 1000.0)
            throw IoError("trace step_seconds must be a positive integer millisecond count");
        tf.header.step_count = h.at("step_count").get<std::int64_t>();
        if (tf.header.step_count < 0) throw IoError("trace step_count must be >= 0");
    } catch (const json::exception& e) {
        throw IoError(std::string("trace header: ") + e.what());
    }

    tf.diffs.reserve(static_cast<std::size_t>(tf.header.step_count) + 1);
    for (std::int64_t k = 0; k <= tf.header.step_count; ++k) {
        if (!std::getline(in, line))
            throw IoError("trace truncated: missing step " + std::to_string(k) + " of " +
                          std::to_string(tf.header.step_count));
        try {
            StepDiff d = diff_from_json(json::parse(line));
            if (d.step_index != k)
                throw IoError("trace step order broken: expected step " + std::to_string(k) +
                              ", found " + std::to_string(d.step_index));
            tf.diffs.push_back(std::move(d));
        } catch (const json::exception& e) {
            throw IoError("trace step " + std::to_string(k) + ": " + e.what());
        }
    }
    while (std::getline(in, line)) {
        if (!line.empty())
            throw IoError("trace has trailing data after step " +
                          std::to_string(tf.header.step_count));
    }
    return tf;
}

void write_trace(const TraceFile& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const std::string text = serialize_trace(t);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write to " + path);
}

TraceFile read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace(buf.str());
}

TraceFile read_trace(const std::string& path, const Scenario& expected) {
    TraceFile tf = read_trace(path);
    const std::string digest = scenario_digest(expected);
    if (tf.header.scenario_digest != digest)
        throw ConfigError("scenario digest mismatch: trace was built from " +
                          tf.header.scenario_digest.substr(0, 12) + "..., scenario hashes to " +
                          digest.substr(0, 12) + "...");
    return tf;
}

}  // namespace orbit
