#include "torbtsim/reports.hpp"

#include "torbtsim/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace torbtsim::reports {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path.string());
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_jsonl(const fs::path& path, const std::vector<json>& records) {
    auto out = open_out(path);
    for (const auto& rec : records) out << rec.dump() << "\n";
}

void write_csv(const fs::path& path, const std::string& header, const std::vector<std::string>& rows) {
    auto out = open_out(path);
    out << header << "\n";
    for (const auto& row : rows) out << row << "\n";
}

} // namespace

std::vector<std::string> write_run_reports(const scenario::ScenarioConfig& config,
                                           const simulation::RunOutput& out) {
    fs::path dir(config.report_dir);
    fs::create_directories(dir);
    std::string prefix = config.name + "-" + std::to_string(config.seed);
    std::vector<std::string> written;
    auto emit = [&](const std::string& family, const std::vector<json>& records, const std::string& header,
                    const std::vector<std::string>& rows) {
        fs::path jsonl = dir / (prefix + "." + family + ".jsonl");
        fs::path csv = dir / (prefix + "." + family + ".csv");
        write_jsonl(jsonl, records);
        write_csv(csv, header, rows);
        written.push_back(jsonl.string());
        written.push_back(csv.string());
    };

    const analysis::ScoreReport& score = out.score;
    const analysis::RunMetrics& m = score.metrics;

    {
        std::vector<json> records;
        std::vector<std::string> rows;
        json metrics{{"record", "metrics"},
                     {"total_streams", m.total_streams},
                     {"bt_streams", m.bt_streams},
                     {"traced_streams", m.traced_streams},
                     {"traced_bt_streams", m.traced_bt_streams},
                     {"additional_traced_streams", m.additional_traced_streams},
                     {"traced_fraction_all", m.traced_fraction_all},
                     {"additional_multiplier", opt_json(m.additional_multiplier)}};
        records.push_back(metrics);
        rows.push_back("total_streams," + std::to_string(m.total_streams));
        rows.push_back("bt_streams," + std::to_string(m.bt_streams));
        rows.push_back("traced_streams," + std::to_string(m.traced_streams));
        rows.push_back("traced_bt_streams," + std::to_string(m.traced_bt_streams));
        rows.push_back("additional_traced_streams," + std::to_string(m.additional_traced_streams));
        rows.push_back("traced_fraction_all," + fmt(m.traced_fraction_all));
        rows.push_back("additional_multiplier," + opt_fmt(m.additional_multiplier));
        for (const auto& [method, stats] : score.by_method) {
            records.push_back(json{{"record", "method"},
                                   {"method", adversary::to_string(method)},
                                   {"traced", stats.traced},
                                   {"correct", stats.correct},
                                   {"precision", opt_json(stats.precision)}});
            rows.push_back(std::string("method_") + adversary::to_string(method) + "_traced," +
                           std::to_string(stats.traced));
            rows.push_back(std::string("method_") + adversary::to_string(method) + "_precision," +
                           opt_fmt(stats.precision));
        }
        records.push_back(json{{"record", "summary"},
                               {"precision_overall", opt_json(score.precision_overall)},
                               {"recall_tor_bt_users", opt_json(score.recall_tor_bt_users)},
                               {"direct_traces", score.direct_traces},
                               {"conflicted_components", score.conflicted_components},
                               {"ambiguous_correlations", score.ambiguous_correlations}});
        rows.push_back("precision_overall," + opt_fmt(score.precision_overall));
        rows.push_back("recall_tor_bt_users," + opt_fmt(score.recall_tor_bt_users));
        rows.push_back("direct_traces," + std::to_string(score.direct_traces));
        rows.push_back("conflicted_components," + std::to_string(score.conflicted_components));
        rows.push_back("ambiguous_correlations," + std::to_string(score.ambiguous_correlations));
        emit("metrics", records, "key,value", rows);
    }

    {
        auto rows_data = analysis::over_representation(score.traced_by_country, config.baseline, config.top_k);
        std::vector<json> records;
        std::vector<std::string> rows;
        for (const auto& row : rows_data) {
            records.push_back(json{{"country", row.key},
                                   {"count_on_tor", row.count_on_tor},
                                   {"share_on_tor", row.share_on_tor},
                                   {"share_baseline", row.share_baseline},
                                   {"over", opt_json(row.over)}});
            rows.push_back(row.key + "," + std::to_string(row.count_on_tor) + "," + fmt(row.share_on_tor) +
                           "," + fmt(row.share_baseline) + "," + opt_fmt(row.over));
        }
        emit("over_country", records, "country,count_on_tor,share_on_tor,share_baseline,over", rows);
    }

    {
        // no published AS-level baseline ships by default, so AS rows
        // report counts and shares with a null over-representation
        uint64_t total = 0;
        for (const auto& [asn, count] : score.traced_by_asn) total += count;
        std::vector<std::pair<uint32_t, uint64_t>> ordered(score.traced_by_asn.begin(),
                                                           score.traced_by_asn.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (config.top_k > 0 && ordered.size() > config.top_k) ordered.resize(config.top_k);
        std::vector<json> records;
        std::vector<std::string> rows;
        for (const auto& [asn, count] : ordered) {
            double share = total > 0 ? double(count) / double(total) : 0.0;
            records.push_back(
                json{{"asn", asn}, {"count_on_tor", count}, {"share_on_tor", share}, {"over", nullptr}});
            rows.push_back(std::to_string(asn) + "," + std::to_string(count) + "," + fmt(share) + ",");
        }
        emit("over_asn", records, "asn,count_on_tor,share_on_tor,over", rows);
    }

    {
        std::vector<json> records;
        std::vector<std::string> rows;
        if (!score.traced_downloads.empty()) {
            auto breakdown = analysis::ecosystem_breakdown(score.traced_downloads, out.catalog);
            for (const auto& [label, share] : breakdown.shares) {
                records.push_back(json{{"ecosystem", label}, {"share", share}});
                rows.push_back(label + "," + fmt(share));
            }
        }
        emit("ecosystem", records, "ecosystem,share", rows);
    }

    {
        std::vector<json> records;
        std::vector<std::string> rows;
        for (const auto& [port, count] : m.additional_by_port) {
            records.push_back(json{{"dst_port", port}, {"traced_non_bt_streams", count}});
            rows.push_back(std::to_string(port) + "," + std::to_string(count));
        }
        emit("ports", records, "dst_port,traced_non_bt_streams", rows);
    }

    if (out.daily_country_counts.size() >= 2) {
        auto series = analysis::rank_stability(out.daily_country_counts);
        std::vector<json> records;
        std::vector<std::string> rows;
        for (const auto& [key, diffs] : series) {
            for (size_t day = 0; day < diffs.size(); ++day) {
                records.push_back(json{{"country", key}, {"snapshot", day}, {"rank_minus_final", diffs[day]}});
                rows.push_back(key + "," + std::to_string(day) + "," + std::to_string(diffs[day]));
            }
        }
        emit("rank_stability", records, "country,snapshot,rank_minus_final", rows);
    }

    if (config.emit_event_log || config.emit_trace_log) {
        fs::path log_dir = dir / "logs";
        fs::create_directories(log_dir);
        if (config.emit_event_log) {
            fs::path path = log_dir / (prefix + ".events.ndjson");
            auto log = open_out(path);
            for (const auto& rec : out.event_log)
                log << json{{"tick", rec.tick}, {"host", rec.host}, {"kind", rec.kind}}.dump() << "\n";
            written.push_back(path.string());
        }
        if (config.emit_trace_log) {
            fs::path path = log_dir / (prefix + ".traces.ndjson");
            auto log = open_out(path);
            for (const auto& rec : out.trace_log) {
                if (rec.kind == adversary::TraceLogRecord::Kind::Trace) {
                    log << json{{"type", "trace"},
                                {"tick", rec.at},
                                {"circuit", rec.trace.circuit},
                                {"stream", rec.trace.stream},
                                {"method", adversary::to_string(rec.trace.method)},
                                {"endpoint", to_string(rec.trace.traced_endpoint)}}
                               .dump()
                        << "\n";
                } else {
                    log << json{{"type", "union"},
                                {"tick", rec.at},
                                {"a", rec.edge.a},
                                {"b", rec.edge.b},
                                {"provenance", adversary::to_string(rec.edge.provenance)}}
                               .dump()
                        << "\n";
                }
            }
            written.push_back(path.string());
        }
    }
    return written;
}

std::vector<std::string> write_defense_table(const scenario::ScenarioConfig& config,
                                             const std::vector<analysis::DefenseRow>& rows) {
    fs::path dir(config.report_dir);
    fs::create_directories(dir);
    std::vector<json> records;
    std::vector<std::string> csv_rows;
    for (const auto& row : rows) {
        records.push_back(json{{"policy", tor::to_string(row.policy)},
                               {"runs", row.runs},
                               {"mean_traced_fraction_all", row.mean_traced_fraction_all},
                               {"mean_traced_streams", row.mean_traced_streams},
                               {"mean_additional_traced", row.mean_additional_traced},
                               {"mean_multiplier", row.mean_multiplier}});
        csv_rows.push_back(std::string(tor::to_string(row.policy)) + "," + std::to_string(row.runs) + "," +
                           fmt(row.mean_traced_fraction_all) + "," + fmt(row.mean_traced_streams) + "," +
                           fmt(row.mean_additional_traced) + "," + fmt(row.mean_multiplier));
    }
    fs::path jsonl = dir / (config.name + ".defense.jsonl");
    fs::path csv = dir / (config.name + ".defense.csv");
    write_jsonl(jsonl, records);
    write_csv(csv, "policy,runs,mean_traced_fraction_all,mean_traced_streams,mean_additional_traced,mean_multiplier",
              csv_rows);
    return {jsonl.string(), csv.string()};
}

} // namespace torbtsim::reports
