#pragma once

#include "torbtsim/bittorrent.hpp"
#include "torbtsim/sim.hpp"
#include "torbtsim/tor.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace torbtsim::scenario {

// Every knob of a run. Unknown keys are rejected at load; fractions are
// range-checked; enum-valued strings are validated.
struct ScenarioConfig {
    std::string name = "default";
    uint64_t seed = 1;
    uint32_t virtual_duration_s = 86400; // 24 virtual hours
    std::string report_dir = "reports";
    uint32_t snapshot_interval_s = 3600;
    size_t top_k = 10;

    // tor overlay
    size_t n_hops = 3;
    uint32_t circuit_lifetime_s = 600;
    tor::PolicyKind policy = tor::PolicyKind::MultiplexAll;
    std::vector<std::vector<uint16_t>> port_groups = {{80, 443, 22}};
    size_t n_entry = 12;
    size_t n_middle = 12;
    size_t n_exit = 24; // six of which the attacker runs
    std::vector<size_t> instrumented_exits = {0, 1, 2, 3, 4, 5};
    std::optional<size_t> hijack_exit = 0; // must be one of the instrumented exits

    // adversary
    uint32_t correlation_window_s = 120;
    uint32_t freshness_window_s = 120;
    bool hijack_enabled = true;
    bool dht_match_enabled = true;
    bool linkage_enabled = true;

    // bittorrent ecosystem
    bt::BtConfig bt;
    size_t n_trackers = 1;

    // plain web traffic multiplexed over the same overlay
    size_t n_web_only_users = 20;
    double web_requests_per_hour = 6.0;
    size_t n_web_servers = 6;
    std::map<uint16_t, double> web_port_weights = {{80, 0.60}, {443, 0.35}, {22, 0.05}};

    std::vector<sim::PopulationEntry> population;
    std::map<std::string, double> baseline;

    uint32_t latency_min_ms = 20;
    uint32_t latency_max_ms = 200;

    bool emit_event_log = false;
    bool emit_trace_log = false;

    ScenarioConfig(); // fills the bundled default population and baseline
};

// The bundled default scenario as JSON (what `scenarios/default.json`
// contains).
nlohmann::json default_scenario_json();

// Parse + validate. Throws ConfigInvalid with the offending key path.
ScenarioConfig parse_scenario(const nlohmann::json& j);

// Reads a config file; IoFailure if unreadable, ConfigInvalid if bad.
ScenarioConfig load_scenario(const std::string& path);

// Applies one --override key=value (dotted path, JSON-typed value) onto
// a raw config object before parsing.
void apply_override(nlohmann::json& j, const std::string& assignment);

nlohmann::json to_json(const ScenarioConfig& config);

} // namespace torbtsim::scenario
