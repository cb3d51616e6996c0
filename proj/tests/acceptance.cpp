// Acceptance suite: one check per criterion, one PASS/FAIL line each,
// nonzero exit if any fails.

#include "torbtsim/adversary.hpp"
#include "torbtsim/analysis.hpp"
#include "torbtsim/bencode.hpp"
#include "torbtsim/reports.hpp"
#include "torbtsim/rng.hpp"
#include "torbtsim/scenario.hpp"
#include "torbtsim/simulation.hpp"
#include "torbtsim/wire.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <vector>

using namespace torbtsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bencode::BValue random_bvalue(Rng& rng, int depth) {
    int kind = depth >= 6 ? int(rng.uniform_u64(0, 1)) : int(rng.uniform_u64(0, 3));
    switch (kind) {
        case 0: {
            std::string s;
            size_t len = rng.uniform_u64(0, 16);
            for (size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(rng.uniform_u64(0, 255)));
            return bencode::BValue(s);
        }
        case 1:
            return bencode::BValue(static_cast<int64_t>(rng.next_u64()));
        case 2: {
            bencode::BValue::List list;
            size_t n = rng.uniform_u64(0, 4);
            for (size_t i = 0; i < n; ++i) list.push_back(random_bvalue(rng, depth + 1));
            return bencode::BValue(std::move(list));
        }
        default: {
            bencode::BValue::Dict dict;
            size_t n = rng.uniform_u64(0, 4);
            for (size_t i = 0; i < n; ++i) {
                std::string key;
                size_t len = rng.uniform_u64(0, 8);
                for (size_t k = 0; k < len; ++k) key.push_back(static_cast<char>(rng.uniform_u64(0, 255)));
                dict[key] = random_bvalue(rng, depth + 1);
            }
            return bencode::BValue(std::move(dict));
        }
    }
}

// 1. codec round-trips at volume
void criterion_codec_roundtrip() {
    auto start = std::chrono::steady_clock::now();
    Rng rng(0xACCE97);
    size_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
        bencode::BValue v = random_bvalue(rng, 0);
        if (bencode::decode(bencode::encode(v)) != v) ++bad;
    }
    for (int i = 0; i < 1000; ++i) {
        std::vector<Endpoint> peers;
        size_t n = rng.uniform_u64(0, 10000);
        peers.reserve(n);
        for (size_t k = 0; k < n; ++k)
            peers.push_back({static_cast<uint32_t>(rng.next_u64()), rng.uniform_port(1, 65535)});
        if (wire::decode_compact_peers(wire::encode_compact_peers(peers)) != peers) ++bad;
    }
    double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "10000 trees + 1000 peer lists, " << bad << " mismatches, " << elapsed << " s";
    report(1, "codec round-trip", bad == 0 && elapsed < 10.0, detail.str());
}

// 2. Monte-Carlo DhtPortMatch, through the real adversary procedure, vs
// the closed-form oracle (1 - 1/64512)^(s-1)
void criterion_port_uniqueness() {
    auto start = std::chrono::steady_clock::now();
    Rng rng(0xD47);
    bool pass = true;
    std::ostringstream detail;
    for (size_t s : {size_t(2), size_t(10), size_t(100)}) {
        const size_t trials = 10000;
        size_t successes = 0, wrong_endpoint = 0;
        for (size_t t = 0; t < trials; ++t) {
            uint16_t victim_port = rng.uniform_port(1024, 65535);
            Endpoint victim{0x0A000001, victim_port};
            std::vector<Endpoint> swarm{victim};
            for (size_t i = 1; i < s; ++i)
                swarm.push_back({static_cast<uint32_t>(0x0A000001 + i), rng.uniform_port(1024, 65535)});
            adversary::Adversary::Config config;
            config.malicious_endpoint = {0x0b0000ff, 51413};
            adversary::Adversary adv(config, [&](const InfoHash&) { return swarm; });
            wire::AnnounceRequest req;
            req.info_hash.fill(1);
            req.peer_id.fill(2);
            req.port = victim_port;
            tor::TapStream tap;
            tap.exit_host = 1;
            tap.circuit = 1;
            tap.stream = 1;
            tap.destination = {0x0c000001, 6969};
            tap.payload_prefix = wire::encode_announce_request(req);
            tap.at = 1000;
            adv.on_stream(tap);
            if (!adv.trace_results().empty()) {
                ++successes;
                if (adv.trace_results()[0].traced_endpoint != victim) ++wrong_endpoint;
            }
        }
        double got = double(successes) / double(trials);
        double expected = std::pow(1.0 - 1.0 / 64512.0, double(s - 1));
        detail << "s=" << s << ": " << got << " vs " << expected << "  ";
        if (std::fabs(got - expected) > 0.02 || wrong_endpoint != 0) pass = false;
    }
    double elapsed = seconds_since(start);
    detail << elapsed << " s";
    report(2, "port-uniqueness oracle", pass && elapsed < 60.0, detail.str());
}

// 3. hijack fidelity under the measured behavior split
void criterion_hijack_fidelity() {
    scenario::ScenarioConfig config;
    config.name = "hijack-fidelity";
    config.seed = 31;
    config.virtual_duration_s = 1500;
    config.bt.n_peers = 2000;
    config.bt.tor_user_fraction = 1.0;
    config.bt.behavior_tracker_only = 0.72;
    config.bt.behavior_all_via_tor = 0.28;
    config.bt.downloads.mode = "unique";
    config.bt.catalog.n_items = 2000;
    config.bt.session_start_window_s = 900;
    config.bt.encryption_fraction = 0.0;
    config.n_entry = 2;
    config.n_middle = 2;
    config.n_exit = 1;
    config.instrumented_exits = {0};
    config.hijack_exit = 0;
    config.dht_match_enabled = false; // isolate the hijack procedure
    config.n_web_only_users = 0;
    config.web_requests_per_hour = 0;
    auto out = simulation::run_scenario(config);

    size_t wrong_endpoint = 0, all_via_tor_traced = 0;
    std::set<Endpoint> traced_set;
    for (const auto& t : out.direct_traces) {
        if (t.method != adversary::TraceMethod::Hijack) continue;
        traced_set.insert(t.traced_endpoint);
        auto owner = out.truth.circuit_owner.find(t.circuit);
        if (owner == out.truth.circuit_owner.end() || owner->second != t.traced_endpoint) ++wrong_endpoint;
    }
    for (const auto& ep : traced_set)
        if (out.all_via_tor_endpoints.count(ep)) ++all_via_tor_traced;

    size_t targeted = out.tracker_only_endpoints.size() + out.all_via_tor_endpoints.size();
    double traced_fraction = targeted > 0 ? double(traced_set.size()) / double(targeted) : 0.0;
    double tracker_only_share =
        targeted > 0 ? double(out.tracker_only_endpoints.size()) / double(targeted) : 0.0;

    bool pass = std::fabs(traced_fraction - 0.72) <= 0.03 &&
                std::fabs(traced_fraction - tracker_only_share) <= 0.03 && all_via_tor_traced == 0 &&
                wrong_endpoint == 0 && out.ambiguous_correlations == 0;
    std::ostringstream detail;
    detail << "traced " << traced_set.size() << "/" << targeted << " = " << traced_fraction
           << " (tracker-only share " << tracker_only_share << "), all-via-tor traced "
           << all_via_tor_traced << ", wrong-endpoint " << wrong_endpoint << ", ambiguous "
           << out.ambiguous_correlations;
    report(3, "hijack fidelity", pass, detail.str());
}

// 4. linkage closure equals a brute-force connected-components oracle
void criterion_linkage_closure() {
    auto start = std::chrono::steady_clock::now();
    scenario::ScenarioConfig config;
    config.name = "closure";
    config.seed = 97;
    config.virtual_duration_s = 14400;
    config.bt.n_peers = 1200;
    config.bt.tor_user_fraction = 0.8;
    config.bt.catalog.n_items = 600;
    config.n_web_only_users = 100;
    config.web_requests_per_hour = 12;
    auto out = simulation::run_scenario(config);

    // brute-force closure from the run's raw records: adjacency over the
    // union log, components by breadth-first search, traces propagated
    // per component unless endpoints conflict
    std::map<uint64_t, std::set<uint64_t>> adj;
    for (const auto& e : out.edges) {
        adj[e.a].insert(e.b);
        adj[e.b].insert(e.a);
    }
    std::map<uint64_t, std::vector<const adversary::ExitObservation*>> streams_by_circuit;
    for (const auto& obs : out.observations) streams_by_circuit[obs.circuit].push_back(&obs);
    std::map<uint64_t, std::set<Endpoint>> trace_endpoints_by_circuit;
    for (const auto& t : out.direct_traces) trace_endpoints_by_circuit[t.circuit].insert(t.traced_endpoint);

    std::set<uint64_t> visited;
    std::set<std::tuple<uint64_t, uint64_t, Endpoint>> oracle_traced; // (stream, circuit, endpoint)
    std::set<uint64_t> oracle_conflicted;
    std::set<uint64_t> all_circuits;
    for (const auto& [c, _] : streams_by_circuit) all_circuits.insert(c);
    for (const auto& [c, _] : adj) all_circuits.insert(c);
    for (const auto& [c, _] : trace_endpoints_by_circuit) all_circuits.insert(c);

    for (uint64_t root : all_circuits) {
        if (visited.count(root)) continue;
        std::vector<uint64_t> component;
        std::queue<uint64_t> queue;
        queue.push(root);
        visited.insert(root);
        while (!queue.empty()) {
            uint64_t c = queue.front();
            queue.pop();
            component.push_back(c);
            auto it = adj.find(c);
            if (it == adj.end()) continue;
            for (uint64_t next : it->second)
                if (visited.insert(next).second) queue.push(next);
        }
        std::set<Endpoint> endpoints;
        for (uint64_t c : component) {
            auto it = trace_endpoints_by_circuit.find(c);
            if (it != trace_endpoints_by_circuit.end()) endpoints.insert(it->second.begin(), it->second.end());
        }
        if (endpoints.empty()) continue;
        if (endpoints.size() > 1) {
            for (uint64_t c : component)
                if (streams_by_circuit.count(c)) oracle_conflicted.insert(c);
            continue;
        }
        for (uint64_t c : component) {
            auto it = streams_by_circuit.find(c);
            if (it == streams_by_circuit.end()) continue;
            for (const auto* obs : it->second) oracle_traced.insert({obs->stream, c, *endpoints.begin()});
        }
    }

    std::set<std::tuple<uint64_t, uint64_t, Endpoint>> got_traced;
    for (const auto& t : out.propagation.traced) got_traced.insert({t.stream, t.circuit, t.endpoint});
    bool same_traced = got_traced == oracle_traced;
    bool same_conflicted = out.propagation.conflicted_circuits == oracle_conflicted;
    double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << out.observations.size() << " streams, " << out.edges.size() << " edges, "
           << got_traced.size() << " traced (oracle " << oracle_traced.size() << "), conflicted circuits "
           << out.propagation.conflicted_circuits.size() << " (oracle " << oracle_conflicted.size() << "), "
           << elapsed << " s";
    report(4, "linkage closure exactness", same_traced && same_conflicted && elapsed < 120.0, detail.str());
}

// 5. over-representation arithmetic
void criterion_over_representation() {
    std::map<std::string, uint64_t> counts{{"JP", 130}, {"US", 870}};
    double jp_baseline = 0.13 / 5.6;
    std::map<std::string, double> baseline{{"JP", jp_baseline}, {"US", 1.0 - jp_baseline}};
    auto rows = analysis::over_representation(counts, baseline, 10);
    double jp_over = 0;
    for (const auto& row : rows)
        if (row.key == "JP" && row.over) jp_over = *row.over;

    std::map<std::string, uint64_t> sym_counts{{"A", 1}, {"B", 3}, {"C", 4}};
    std::map<std::string, double> sym_baseline{{"A", 0.125}, {"B", 0.375}, {"C", 0.5}};
    bool sym_ok = true;
    for (const auto& row : analysis::over_representation(sym_counts, sym_baseline, 0))
        if (!row.over || *row.over != 1.0) sym_ok = false;

    bool pass = std::fabs(jp_over - 5.6) <= 0.05 && sym_ok;
    std::ostringstream detail;
    detail << "japan over = " << jp_over << ", symmetric rows all exactly 1.0: " << (sym_ok ? "yes" : "no");
    report(5, "over-representation arithmetic", pass, detail.str());
}

// 6. ecosystem breakdown near the configured underground share
void criterion_ecosystem() {
    bt::CatalogConfig catalog_config; // defaults: 0.90 / 0.07 / 0.03
    catalog_config.n_items = 2000;
    Rng rng(404);
    bt::Catalog catalog = bt::Catalog::generate(catalog_config, rng);
    Rng sample_rng(405);
    auto downloads = catalog.sample(10000, sample_rng);
    auto breakdown = analysis::ecosystem_breakdown(downloads, catalog);
    double unknown = breakdown.shares.at("unknown");
    bool pass = std::fabs(unknown - 0.03) <= 0.01;
    std::ostringstream detail;
    detail << "unknown share = " << unknown << " over 10000 sampled downloads";
    report(6, "ecosystem breakdown", pass, detail.str());
}

// 7. defense ordering across paired seeds. Victims sit in per-peer
// swarms so the comparison isolates the policy mechanics: the P2P load
// is the hijack connect-back, and linkage noise from shared swarms
// cannot conflict components.
void criterion_defense_ordering() {
    scenario::ScenarioConfig base;
    base.name = "defense";
    base.virtual_duration_s = 2700;
    base.bt.n_peers = 250;
    base.bt.tor_user_fraction = 0.8;
    base.bt.downloads.mode = "unique";
    base.bt.catalog.n_items = 250;
    base.n_web_only_users = 10;
    base.web_requests_per_hour = 20;
    base.n_entry = 2;
    base.n_middle = 2;
    base.n_exit = 1;
    base.instrumented_exits = {0};
    base.hijack_exit = 0;

    std::vector<uint64_t> seeds{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    bool ordering_ok = true, same_circuit_zero = true;
    std::ostringstream detail;
    double mean_ma = 0, mean_pg = 0, mean_os = 0;
    for (uint64_t seed : seeds) {
        auto run_with = [&](tor::PolicyKind policy) {
            scenario::ScenarioConfig config = base;
            config.seed = seed;
            config.policy = policy;
            return simulation::run_scenario(config);
        };
        auto ma = run_with(tor::PolicyKind::MultiplexAll);
        auto pg = run_with(tor::PolicyKind::PortGroupIsolation);
        auto os = run_with(tor::PolicyKind::OneStreamPerCircuit);
        double f_ma = ma.score.metrics.traced_fraction_all;
        double f_pg = pg.score.metrics.traced_fraction_all;
        double f_os = os.score.metrics.traced_fraction_all;
        mean_ma += f_ma;
        mean_pg += f_pg;
        mean_os += f_os;
        if (!(f_ma >= f_pg && f_pg >= f_os)) {
            ordering_ok = false;
            detail << "seed " << seed << " breaks ordering (" << f_ma << ", " << f_pg << ", " << f_os
                   << ") ";
        }
        auto it = os.score.by_method.find(adversary::TraceMethod::LinkSameCircuit);
        if (it != os.score.by_method.end() && it->second.traced != 0) same_circuit_zero = false;
    }
    mean_ma /= double(seeds.size());
    mean_pg /= double(seeds.size());
    mean_os /= double(seeds.size());
    detail << "mean traced fractions: multiplex_all=" << mean_ma << " port_group=" << mean_pg
           << " one_stream=" << mean_os << ", same-circuit traces under one-stream: "
           << (same_circuit_zero ? "0" : "nonzero");
    report(7, "defense ordering", ordering_ok && same_circuit_zero, detail.str());
}

// 8 + 9. determinism of the bundled default scenario, and the
// aggregates-only discipline of its report files
void criterion_determinism_and_privacy() {
    scenario::ScenarioConfig config; // the bundled default
    fs::path dir_a = fs::temp_directory_path() / "torbtsim_acceptance_a";
    fs::path dir_b = fs::temp_directory_path() / "torbtsim_acceptance_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    config.report_dir = dir_a.string();
    auto out_a = simulation::run_scenario(config);
    auto written_a = reports::write_run_reports(config, out_a);
    config.report_dir = dir_b.string();
    auto out_b = simulation::run_scenario(config);
    reports::write_run_reports(config, out_b);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool identical = true;
    size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        if (!entry.is_regular_file()) continue;
        fs::path other = dir_b / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) identical = false;
        ++compared;
    }
    std::ostringstream det_detail;
    det_detail << compared << " report files byte-compared across two runs of the default scenario";
    report(8, "determinism", identical && compared >= 10, det_detail.str());

    // privacy scan: no ground-truth endpoint literal, nor any bare
    // ground-truth ip, appears in any report file
    std::set<std::string> needles;
    for (const auto& [ep, _] : out_a.truth.endpoint_country) {
        needles.insert(to_string(ep));
        needles.insert(format_ip(ep.ip));
    }
    size_t hits = 0;
    std::string offender;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        if (!entry.is_regular_file()) continue;
        std::string content = slurp(entry.path());
        for (const auto& needle : needles) {
            if (content.find(needle) != std::string::npos) {
                ++hits;
                offender = entry.path().filename().string() + " contains " + needle;
                break;
            }
        }
    }
    std::ostringstream priv_detail;
    priv_detail << needles.size() / 2 << " ground-truth endpoints scanned against " << compared
                << " files";
    if (hits > 0) priv_detail << "; " << offender;
    report(9, "privacy of reports", hits == 0, priv_detail.str());
}

} // namespace

int main() {
    criterion_codec_roundtrip();
    criterion_port_uniqueness();
    criterion_hijack_fidelity();
    criterion_linkage_closure();
    criterion_over_representation();
    criterion_ecosystem();
    criterion_defense_ordering();
    criterion_determinism_and_privacy();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", g_failures);
    return 1;
}
