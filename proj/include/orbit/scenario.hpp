#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbit/orbits.hpp"
#include "orbit/topology.hpp"

namespace orbit {

struct LinkClassDefaults {
    double loss_pct{1.0};
    double rate_mbps{0.0};
};

struct LinkDefaults {
    LinkClassDefaults gsl{1.0, 1000.0};
    LinkClassDefaults isl{1.0, 10000.0};
};

/// Hard caps on emulated resources; exceeding them is a budget error
/// (CLI exit code 5) rather than a silent attempt to build a huge scenario.
struct Budget {
    int max_nodes{1024};
    int max_links{8192};
};

/// Declarative scenario description, the single JSON document every other
/// module consumes. Field names mirror the on-disk schema.
struct Scenario {
    std::string epoch_utc{"2023-09-15T00:00:00Z"};
    std::int64_t step_ms{5000};
    std::int64_t duration_ms{3600000};
    std::vector<ShellConfig> shells;
    std::vector<GroundStationConfig> ground_stations;
    LinkDefaults link_defaults;
    std::optional<BoundingBox> bounding_box;
    bool gsl_contention{false};
    std::int64_t delay_quantization_us{50};
    Budget budget;

    std::int64_t step_count() const { return step_ms > 0 ? duration_ms / step_ms : 0; }
    SimInstant instant_at_step(std::int64_t k) const {
        return SimInstant{epoch_utc, k * step_ms};
    }
    int total_satellites() const;
    int total_nodes() const;
};

/// Parse a scenario JSON document. Validates the schema, all value ranges,
/// name uniqueness and the node budget. Throws ConfigError / BudgetError.
Scenario parse_scenario(const std::string& json_text);

Scenario load_scenario(const std::string& path);

/// Human-readable (indented) serialization for files written by `gen`.
std::string scenario_to_json(const Scenario& s);

/// Canonical form: every field explicit, keys sorted, no whitespace. The
/// digest below is computed over exactly these bytes.
std::string canonical_scenario_json(const Scenario& s);

/// SHA-256 hex digest of the canonical serialization; binds a trace to the
/// scenario that produced it.
std::string scenario_digest(const Scenario& s);

/// Schema/range validation on an already-parsed scenario (parse_scenario
/// runs this itself). Throws on violations.
void validate_scenario(const Scenario& s);

}  // namespace orbit
