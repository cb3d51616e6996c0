#include "torbtsim/analysis.hpp"

#include "torbtsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace torbtsim::analysis {

using adversary::ExitObservation;
using adversary::PropagationResult;
using adversary::TraceMethod;
using adversary::TraceResult;

ScoreReport score_run(const std::vector<ExitObservation>& observations,
                      const PropagationResult& propagation, const std::vector<TraceResult>& direct_traces,
                      size_t ambiguous, const GroundTruth& truth) {
    ScoreReport report;
    report.direct_traces = direct_traces.size();
    report.conflicted_components = propagation.conflicted_components;
    report.ambiguous_correlations = ambiguous;

    std::map<uint64_t, const ExitObservation*> obs_by_stream;
    for (const auto& obs : observations) obs_by_stream[obs.stream] = &obs;

    auto is_bt = [](wire::StreamClass cls) {
        return cls == wire::StreamClass::BtHandshake || cls == wire::StreamClass::TrackerAnnounce;
    };

    report.metrics.total_streams = observations.size();
    for (const auto& obs : observations)
        if (is_bt(obs.cls)) ++report.metrics.bt_streams;

    uint64_t correct_total = 0;
    std::set<Endpoint> correctly_traced;
    std::set<Endpoint> traced_endpoints;
    std::set<std::pair<Endpoint, InfoHash>> traced_download_pairs;

    for (const auto& traced : propagation.traced) {
        auto obs_it = obs_by_stream.find(traced.stream);
        const ExitObservation* obs = obs_it == obs_by_stream.end() ? nullptr : obs_it->second;
        ++report.metrics.traced_streams;
        bool bt = obs != nullptr && is_bt(obs->cls);
        if (bt) {
            ++report.metrics.traced_bt_streams;
        } else {
            ++report.metrics.additional_traced_streams;
            if (obs != nullptr) ++report.metrics.additional_by_port[obs->destination.port];
        }

        auto owner = truth.circuit_owner.find(traced.circuit);
        if (owner == truth.circuit_owner.end())
            throw GroundTruthMissing("circuit " + std::to_string(traced.circuit));
        bool correct = owner->second == traced.endpoint;

        auto& stats = report.by_method[traced.method];
        ++stats.traced;
        if (correct) {
            ++stats.correct;
            ++correct_total;
            correctly_traced.insert(traced.endpoint);
        }
        traced_endpoints.insert(traced.endpoint);
        if (obs != nullptr && obs->info_hash) traced_download_pairs.insert({traced.endpoint, *obs->info_hash});
    }

    for (auto& [method, stats] : report.by_method)
        if (stats.traced > 0) stats.precision = double(stats.correct) / double(stats.traced);
    if (report.metrics.traced_streams > 0)
        report.precision_overall = double(correct_total) / double(report.metrics.traced_streams);
    if (!truth.tor_bt_peers.empty()) {
        uint64_t hit = 0;
        for (const auto& ep : correctly_traced)
            if (truth.tor_bt_peers.count(ep)) ++hit;
        report.recall_tor_bt_users = double(hit) / double(truth.tor_bt_peers.size());
    }

    if (report.metrics.total_streams > 0)
        report.metrics.traced_fraction_all =
            double(report.metrics.traced_streams) / double(report.metrics.total_streams);
    if (report.metrics.traced_bt_streams > 0)
        report.metrics.additional_multiplier =
            double(report.metrics.additional_traced_streams) / double(report.metrics.traced_bt_streams);

    for (const auto& ep : traced_endpoints) {
        auto country = truth.endpoint_country.find(ep);
        if (country != truth.endpoint_country.end()) ++report.traced_by_country[country->second];
        auto asn = truth.endpoint_asn.find(ep);
        if (asn != truth.endpoint_asn.end()) ++report.traced_by_asn[asn->second];
    }
    for (const auto& [ep, hash] : traced_download_pairs) report.traced_downloads.push_back(hash);
    return report;
}

std::vector<OverRepresentationRow> over_representation(const std::map<std::string, uint64_t>& counts_on_tor,
                                                       const std::map<std::string, double>& baseline,
                                                       size_t top_k) {
    double baseline_sum = 0;
    for (const auto& [key, share] : baseline) baseline_sum += share;
    if (std::fabs(baseline_sum - 1.0) > 1e-9)
        throw WeightSumInvalid("baseline shares sum to " + std::to_string(baseline_sum));

    uint64_t total = 0;
    for (const auto& [key, count] : counts_on_tor) total += count;

    std::vector<OverRepresentationRow> rows;
    for (const auto& [key, count] : counts_on_tor) {
        OverRepresentationRow row;
        row.key = key;
        row.count_on_tor = count;
        row.share_on_tor = total > 0 ? double(count) / double(total) : 0.0;
        auto base = baseline.find(key);
        row.share_baseline = base == baseline.end() ? 0.0 : base->second;
        if (row.share_baseline > 0) row.over = row.share_on_tor / row.share_baseline;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const OverRepresentationRow& a, const OverRepresentationRow& b) {
        if (a.count_on_tor != b.count_on_tor) return a.count_on_tor > b.count_on_tor;
        return a.key < b.key;
    });
    if (top_k > 0 && rows.size() > top_k) rows.resize(top_k);
    return rows;
}

std::map<std::string, std::vector<int>> rank_stability(
    const std::vector<std::map<std::string, uint64_t>>& daily_cumulative) {
    if (daily_cumulative.size() < 2) throw EmptyInput("rank stability needs at least 2 daily snapshots");

    std::set<std::string> keys;
    for (const auto& day : daily_cumulative)
        for (const auto& [key, count] : day) keys.insert(key);

    auto ranks_for = [&](const std::map<std::string, uint64_t>& day) {
        std::vector<std::pair<std::string, uint64_t>> ordered;
        for (const auto& key : keys) {
            auto it = day.find(key);
            ordered.emplace_back(key, it == day.end() ? 0 : it->second);
        }
        std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::map<std::string, int> rank;
        for (size_t i = 0; i < ordered.size(); ++i) rank[ordered[i].first] = static_cast<int>(i + 1);
        return rank;
    };

    std::vector<std::map<std::string, int>> ranks;
    ranks.reserve(daily_cumulative.size());
    for (const auto& day : daily_cumulative) ranks.push_back(ranks_for(day));
    const auto& final_rank = ranks.back();

    std::map<std::string, std::vector<int>> series;
    for (const auto& key : keys) {
        std::vector<int> diffs;
        diffs.reserve(ranks.size());
        for (const auto& day_rank : ranks) diffs.push_back(day_rank.at(key) - final_rank.at(key));
        series[key] = std::move(diffs);
    }
    return series;
}

EcosystemBreakdown ecosystem_breakdown(const std::vector<InfoHash>& downloads, const bt::Catalog& catalog) {
    if (downloads.empty()) throw EmptyInput("no downloads to classify");
    auto public_list = catalog.public_list();
    auto private_list = catalog.private_list();
    uint64_t n_public = 0, n_private = 0, n_unknown = 0;
    for (const auto& hash : downloads) {
        if (!catalog.contains(hash)) throw UnknownInfoHash(to_hex(hash));
        if (public_list.count(hash)) ++n_public;
        else if (private_list.count(hash)) ++n_private;
        else ++n_unknown;
    }
    double total = double(downloads.size());
    EcosystemBreakdown out;
    out.shares["public"] = n_public / total;
    out.shares["private"] = n_private / total;
    out.shares["unknown"] = n_unknown / total;
    return out;
}

std::vector<DefenseRow> compare_defenses(const std::vector<tor::PolicyKind>& policies,
                                         const std::vector<uint64_t>& seeds,
                                         const std::function<ScoreReport(tor::PolicyKind, uint64_t)>& runner) {
    if (policies.empty()) throw EmptyInput("no policies");
    if (seeds.empty()) throw EmptyInput("no seeds");
    std::vector<DefenseRow> rows;
    for (auto policy : policies) {
        DefenseRow row;
        row.policy = policy;
        double multiplier_sum = 0;
        size_t multiplier_runs = 0;
        for (uint64_t seed : seeds) {
            ScoreReport report = runner(policy, seed);
            ++row.runs;
            row.mean_traced_fraction_all += report.metrics.traced_fraction_all;
            row.mean_traced_streams += double(report.metrics.traced_streams);
            row.mean_additional_traced += double(report.metrics.additional_traced_streams);
            row.traced_fraction_per_seed.push_back(report.metrics.traced_fraction_all);
            if (report.metrics.additional_multiplier) {
                multiplier_sum += *report.metrics.additional_multiplier;
                ++multiplier_runs;
            }
        }
        row.mean_traced_fraction_all /= double(row.runs);
        row.mean_traced_streams /= double(row.runs);
        row.mean_additional_traced /= double(row.runs);
        row.mean_multiplier = multiplier_runs > 0 ? multiplier_sum / double(multiplier_runs) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace torbtsim::analysis
