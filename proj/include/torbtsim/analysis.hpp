#pragma once

#include "torbtsim/adversary.hpp"
#include "torbtsim/bittorrent.hpp"
#include "torbtsim/endpoint.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace torbtsim::analysis {

// Aggregate counters over the streams observed at instrumented exits.
// additional_traced_streams counts only the non-BitTorrent streams in
// traced components.
struct RunMetrics {
    uint64_t total_streams = 0;
    uint64_t bt_streams = 0;
    uint64_t traced_streams = 0;
    uint64_t traced_bt_streams = 0;
    uint64_t additional_traced_streams = 0;
    std::map<uint16_t, uint64_t> additional_by_port;
    double traced_fraction_all = 0.0;
    std::optional<double> additional_multiplier; // additional / traced BT
};

struct MethodStats {
    uint64_t traced = 0;
    uint64_t correct = 0;
    std::optional<double> precision;
};

// What scoring needs from the simulation: the hidden owner mapping and
// the peer attributes the attacker would resolve out of band.
struct GroundTruth {
    std::map<uint64_t, Endpoint> circuit_owner; // circuit id -> owner endpoint
    std::map<Endpoint, std::string> endpoint_country;
    std::map<Endpoint, uint32_t> endpoint_asn;
    std::set<Endpoint> tor_bt_peers;
};

struct ScoreReport {
    RunMetrics metrics;
    std::map<adversary::TraceMethod, MethodStats> by_method;
    std::optional<double> precision_overall;
    std::optional<double> recall_tor_bt_users;
    uint64_t direct_traces = 0;
    uint64_t conflicted_components = 0;
    uint64_t ambiguous_correlations = 0;
    // aggregates only: counts of distinct traced endpoints per key
    std::map<std::string, uint64_t> traced_by_country;
    std::map<uint32_t, uint64_t> traced_by_asn;
    // one entry per (traced endpoint, observed info_hash) pair
    std::vector<InfoHash> traced_downloads;
};

// Scores a finished run against ground truth. Throws GroundTruthMissing
// when a traced circuit has no owner entry.
ScoreReport score_run(const std::vector<adversary::ExitObservation>& observations,
                      const adversary::PropagationResult& propagation,
                      const std::vector<adversary::TraceResult>& direct_traces, size_t ambiguous,
                      const GroundTruth& truth);

struct OverRepresentationRow {
    std::string key;
    uint64_t count_on_tor = 0;
    double share_on_tor = 0.0;
    double share_baseline = 0.0;
    std::optional<double> over; // null when the baseline share is 0
};

// Tor-side share divided by the baseline share per key; rows sorted by
// count descending. Baseline shares must sum to 1 +/- 1e-9
// (WeightSumInvalid). top_k = 0 keeps all rows.
std::vector<OverRepresentationRow> over_representation(const std::map<std::string, uint64_t>& counts_on_tor,
                                                       const std::map<std::string, double>& baseline,
                                                       size_t top_k);

// Per-key series of rank_t - rank_final over daily cumulative counts;
// the final entry is always 0. Needs >= 2 snapshots (EmptyInput).
std::map<std::string, std::vector<int>> rank_stability(
    const std::vector<std::map<std::string, uint64_t>>& daily_cumulative);

struct EcosystemBreakdown {
    std::map<std::string, double> shares; // public / private / unknown, summing to 1
};

// Shares of downloads known to the public or private membership lists;
// everything else reports as unknown (the observer does not see the
// underground label). EmptyInput on an empty download set;
// UnknownInfoHash when a download is not in the catalog at all.
EcosystemBreakdown ecosystem_breakdown(const std::vector<InfoHash>& downloads, const bt::Catalog& catalog);

struct DefenseRow {
    tor::PolicyKind policy = tor::PolicyKind::MultiplexAll;
    size_t runs = 0;
    double mean_traced_fraction_all = 0.0;
    double mean_traced_streams = 0.0;
    double mean_additional_traced = 0.0;
    double mean_multiplier = 0.0; // over runs with traced BT streams
    std::vector<double> traced_fraction_per_seed;
};

// Replays the same scenario under each policy for each seed via the
// injected runner and reports per-policy means.
std::vector<DefenseRow> compare_defenses(
    const std::vector<tor::PolicyKind>& policies, const std::vector<uint64_t>& seeds,
    const std::function<ScoreReport(tor::PolicyKind, uint64_t)>& runner);

} // namespace torbtsim::analysis
