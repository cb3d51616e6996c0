#include "torbtsim/analysis.hpp"
#include "torbtsim/bencode.hpp"
#include "torbtsim/reports.hpp"
#include "torbtsim/scenario.hpp"
#include "torbtsim/simulation.hpp"
#include "torbtsim/wire.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

namespace py = pybind11;
using namespace torbtsim;

namespace {

scenario::ScenarioConfig config_from_json_text(const std::string& text,
                                               const std::vector<std::string>& overrides) {
    nlohmann::json j =
        text.empty() ? scenario::default_scenario_json() : nlohmann::json::parse(text);
    for (const auto& assignment : overrides) scenario::apply_override(j, assignment);
    return scenario::parse_scenario(j);
}

py::dict metrics_dict(const analysis::ScoreReport& score) {
    py::dict m;
    m["total_streams"] = score.metrics.total_streams;
    m["bt_streams"] = score.metrics.bt_streams;
    m["traced_streams"] = score.metrics.traced_streams;
    m["traced_bt_streams"] = score.metrics.traced_bt_streams;
    m["additional_traced_streams"] = score.metrics.additional_traced_streams;
    m["traced_fraction_all"] = score.metrics.traced_fraction_all;
    m["additional_multiplier"] = score.metrics.additional_multiplier
                                     ? py::object(py::float_(*score.metrics.additional_multiplier))
                                     : py::object(py::none());
    py::dict ports;
    for (const auto& [port, count] : score.metrics.additional_by_port)
        ports[py::int_(port)] = count;
    m["additional_by_port"] = ports;
    py::dict methods;
    for (const auto& [method, stats] : score.by_method) {
        py::dict s;
        s["traced"] = stats.traced;
        s["correct"] = stats.correct;
        s["precision"] =
            stats.precision ? py::object(py::float_(*stats.precision)) : py::object(py::none());
        methods[adversary::to_string(method)] = s;
    }
    m["by_method"] = methods;
    m["precision_overall"] = score.precision_overall ? py::object(py::float_(*score.precision_overall))
                                                     : py::object(py::none());
    m["recall_tor_bt_users"] = score.recall_tor_bt_users
                                   ? py::object(py::float_(*score.recall_tor_bt_users))
                                   : py::object(py::none());
    m["direct_traces"] = score.direct_traces;
    m["conflicted_components"] = score.conflicted_components;
    m["ambiguous_correlations"] = score.ambiguous_correlations;
    py::dict by_country;
    for (const auto& [country, count] : score.traced_by_country) by_country[country.c_str()] = count;
    m["traced_by_country"] = by_country;
    return m;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "deterministic onion-routing + BitTorrent tracing simulator";

    py::register_exception<MalformedBencoding>(m, "MalformedBencoding", PyExc_ValueError);
    py::register_exception<ConfigInvalid>(m, "ConfigInvalid", PyExc_ValueError);

    m.def(
        "bencode_roundtrip",
        [](py::bytes data) {
            std::string in = data;
            return py::bytes(bencode::encode(bencode::decode(in)));
        },
        "decode + re-encode a bencoded value (raises on malformed input)");

    m.def(
        "encode_compact_peers",
        [](const std::vector<std::pair<std::string, uint16_t>>& peers) {
            std::vector<Endpoint> eps;
            for (const auto& [ip, port] : peers) {
                auto parsed = parse_ip(ip);
                if (!parsed) throw py::value_error("bad ipv4 literal: " + ip);
                eps.push_back({*parsed, port});
            }
            return py::bytes(wire::encode_compact_peers(eps));
        },
        py::arg("peers"), "pack (ip, port) pairs into the 6-byte-per-peer compact form");

    m.def(
        "decode_compact_peers",
        [](py::bytes data) {
            std::string in = data;
            std::vector<std::pair<std::string, uint16_t>> out;
            for (const auto& ep : wire::decode_compact_peers(in))
                out.emplace_back(format_ip(ep.ip), ep.port);
            return out;
        },
        py::arg("data"));

    m.def(
        "classify_stream",
        [](py::bytes payload_prefix, uint16_t dst_port) {
            std::string prefix = payload_prefix;
            return std::string(wire::to_string(wire::classify_stream(prefix, dst_port)));
        },
        py::arg("payload_prefix"), py::arg("dst_port"));

    m.def("default_scenario", []() { return scenario::default_scenario_json().dump(2); },
          "the bundled default scenario as JSON text");

    m.def(
        "run_scenario",
        [](const std::string& config_json, const std::vector<std::string>& overrides,
           bool write_reports) {
            scenario::ScenarioConfig config = config_from_json_text(config_json, overrides);
            simulation::RunOutput out = simulation::run_scenario(config);
            if (write_reports) reports::write_run_reports(config, out);
            py::dict result = metrics_dict(out.score);
            result["name"] = config.name;
            result["seed"] = config.seed;
            result["policy"] = tor::to_string(config.policy);
            return result;
        },
        py::arg("config_json") = "", py::arg("overrides") = std::vector<std::string>{},
        py::arg("write_reports") = false,
        "run one scenario and return its aggregate metrics as a dict");

    m.def(
        "over_representation",
        [](const std::map<std::string, uint64_t>& counts, const std::map<std::string, double>& baseline,
           size_t top_k) {
            py::list rows;
            for (const auto& row : analysis::over_representation(counts, baseline, top_k)) {
                py::dict d;
                d["key"] = row.key;
                d["count_on_tor"] = row.count_on_tor;
                d["share_on_tor"] = row.share_on_tor;
                d["share_baseline"] = row.share_baseline;
                d["over"] = row.over ? py::object(py::float_(*row.over)) : py::object(py::none());
                rows.append(d);
            }
            return rows;
        },
        py::arg("counts_on_tor"), py::arg("baseline"), py::arg("top_k") = 10);

    m.def(
        "rank_stability",
        [](const std::vector<std::map<std::string, uint64_t>>& daily) {
            return analysis::rank_stability(daily);
        },
        py::arg("daily_cumulative"));

    m.def(
        "compare_defenses",
        [](const std::string& config_json, const std::vector<std::string>& policies,
           const std::vector<uint64_t>& seeds) {
            nlohmann::json base =
                config_json.empty() ? scenario::default_scenario_json() : nlohmann::json::parse(config_json);
            std::vector<tor::PolicyKind> parsed;
            for (const auto& name : policies) {
                auto p = tor::parse_policy(name);
                if (!p) throw py::value_error("unknown policy: " + name);
                parsed.push_back(*p);
            }
            auto runner = [&](tor::PolicyKind policy, uint64_t seed) {
                nlohmann::json j = base;
                j["seed"] = seed;
                j["tor"]["policy"] = tor::to_string(policy);
                return simulation::run_scenario(scenario::parse_scenario(j)).score;
            };
            py::list rows;
            for (const auto& row : analysis::compare_defenses(parsed, seeds, runner)) {
                py::dict d;
                d["policy"] = tor::to_string(row.policy);
                d["runs"] = row.runs;
                d["mean_traced_fraction_all"] = row.mean_traced_fraction_all;
                d["mean_traced_streams"] = row.mean_traced_streams;
                d["mean_additional_traced"] = row.mean_additional_traced;
                d["mean_multiplier"] = row.mean_multiplier;
                d["traced_fraction_per_seed"] = row.traced_fraction_per_seed;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config_json") = "", py::arg("policies") = std::vector<std::string>{"multiplex_all"},
        py::arg("seeds") = std::vector<uint64_t>{1});

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
