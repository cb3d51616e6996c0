#pragma once

#include "torbtsim/adversary.hpp"
#include "torbtsim/analysis.hpp"
#include "torbtsim/bittorrent.hpp"
#include "torbtsim/scenario.hpp"

#include <map>
#include <vector>

namespace torbtsim::simulation {

// Everything a finished run leaves behind: adversary-side artifacts
// (observations, traces, linkage), ground truth for scoring, and the
// overlay counters the invariant checks look at.
struct RunOutput {
    analysis::ScoreReport score;
    analysis::GroundTruth truth;
    std::vector<adversary::ExitObservation> observations;
    adversary::PropagationResult propagation;
    std::vector<adversary::TraceResult> direct_traces;
    std::vector<adversary::LinkEdge> edges;
    std::vector<adversary::TraceLogRecord> trace_log;
    std::vector<sim::EventLogRecord> event_log;
    std::vector<std::map<std::string, uint64_t>> daily_country_counts;

    size_t hijacked_responses = 0;
    size_t ambiguous_correlations = 0;
    size_t connections_delivered = 0;
    size_t connections_refused = 0;
    size_t tor_initiated_connections = 0;
    size_t tor_initiated_from_exit = 0;
    size_t dht_messages = 0;
    size_t dht_circuit_violations = 0;
    size_t tracker_announces = 0;

    // ground-truth circuit structure, for closure oracles and policy
    // invariant checks
    std::map<uint64_t, std::vector<uint64_t>> circuit_streams;
    std::map<uint64_t, Endpoint> stream_owner;
    std::map<uint64_t, uint16_t> stream_dst_port;
    std::map<uint64_t, std::string> stream_app_tag;
    std::map<uint64_t, sim::SimTime> stream_opened_at;
    std::map<uint64_t, sim::SimTime> circuit_created_at;

    bt::Catalog catalog;
    size_t n_tor_bt_peers = 0;
    std::set<Endpoint> tracker_only_endpoints; // Tor BT peers by behavior, for fidelity checks
    std::set<Endpoint> all_via_tor_endpoints;
};

RunOutput run_scenario(const scenario::ScenarioConfig& config);

} // namespace torbtsim::simulation
