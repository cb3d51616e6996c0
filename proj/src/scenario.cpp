#include "torbtsim/scenario.hpp"

#include "torbtsim/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace torbtsim::scenario {

using nlohmann::json;

namespace {

// Tor-side country/AS mix and the matching outside-of-Tor baseline
// shares used when a scenario does not supply its own tables.
struct DefaultRow {
    const char* country;
    uint32_t asn;
    double tor_share;
    double over; // 0 = no baseline coverage for this country
};

const DefaultRow kDefaultRows[] = {
    {"US", 7132, 0.14, 0.9}, {"JP", 4713, 0.13, 5.6}, {"DE", 3320, 0.13, 2.8}, {"FR", 3215, 0.05, 1.3},
    {"PL", 5617, 0.05, 1.8}, {"IT", 3269, 0.03, 0.9}, {"GB", 2856, 0.03, 0.6}, {"CN", 4134, 0.03, 0.0},
    {"CA", 577, 0.03, 0.7},  {"RU", 8402, 0.02, 1.4},
};
const DefaultRow kFillerRows[] = {
    {"NL", 1136, 0.06, 0.0}, {"SE", 3301, 0.06, 0.0}, {"ES", 3352, 0.06, 0.0},
    {"BR", 7738, 0.06, 0.0}, {"AU", 1221, 0.06, 0.0}, {"IN", 9829, 0.06, 0.0},
};

std::vector<sim::PopulationEntry> default_population() {
    std::vector<sim::PopulationEntry> out;
    for (const auto& row : kDefaultRows) out.push_back({row.country, row.asn, row.tor_share});
    for (const auto& row : kFillerRows) out.push_back({row.country, row.asn, row.tor_share});
    return out;
}

std::map<std::string, double> default_baseline() {
    std::map<std::string, double> out;
    double named = 0;
    for (const auto& row : kDefaultRows) {
        double share = row.over > 0 ? row.tor_share / row.over : 0.0;
        out[row.country] = share;
        named += share;
    }
    double filler = (1.0 - named) / double(std::size(kFillerRows));
    for (const auto& row : kFillerRows) out[row.country] = filler;
    return out;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigInvalid(path + ": " + message);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
}

double get_fraction(const json& j, const std::string& path, double fallback) {
    if (j.is_null()) return fallback;
    if (!j.is_number()) fail(path, "expected a number");
    double v = j.get<double>();
    if (v < 0.0 || v > 1.0) fail(path, "fraction must be in [0, 1]");
    return v;
}

template <typename T>
T get_number(const json& j, const std::string& path, T fallback) {
    if (j.is_null()) return fallback;
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<T>();
}

std::string get_string(const json& j, const std::string& path, const std::string& fallback) {
    if (j.is_null()) return fallback;
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path, bool fallback) {
    if (j.is_null()) return fallback;
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

json at(const json& j, const char* key) { return j.contains(key) ? j.at(key) : json(); }

void parse_tor(const json& j, ScenarioConfig& config) {
    check_keys(j, "tor",
               {"n_hops", "circuit_lifetime_s", "policy", "port_groups", "n_entry", "n_middle", "n_exit",
                "instrumented_exits", "hijack_exit"});
    config.n_hops = get_number<size_t>(at(j, "n_hops"), "tor.n_hops", config.n_hops);
    if (config.n_hops < 2 || config.n_hops > 8) fail("tor.n_hops", "must be in [2, 8]");
    config.circuit_lifetime_s =
        get_number<uint32_t>(at(j, "circuit_lifetime_s"), "tor.circuit_lifetime_s", config.circuit_lifetime_s);
    std::string policy = get_string(at(j, "policy"), "tor.policy", tor::to_string(config.policy));
    auto parsed = tor::parse_policy(policy);
    if (!parsed) fail("tor.policy", "unknown policy \"" + policy + "\"");
    config.policy = *parsed;
    if (j.contains("port_groups")) {
        if (!j.at("port_groups").is_array()) fail("tor.port_groups", "expected an array of arrays");
        config.port_groups.clear();
        for (const auto& group : j.at("port_groups")) {
            if (!group.is_array()) fail("tor.port_groups", "expected an array of arrays");
            std::vector<uint16_t> ports;
            for (const auto& port : group) {
                if (!port.is_number_unsigned() || port.get<uint64_t>() == 0 || port.get<uint64_t>() > 65535)
                    fail("tor.port_groups", "ports must be in [1, 65535]");
                ports.push_back(port.get<uint16_t>());
            }
            config.port_groups.push_back(std::move(ports));
        }
    }
    config.n_entry = get_number<size_t>(at(j, "n_entry"), "tor.n_entry", config.n_entry);
    config.n_middle = get_number<size_t>(at(j, "n_middle"), "tor.n_middle", config.n_middle);
    config.n_exit = get_number<size_t>(at(j, "n_exit"), "tor.n_exit", config.n_exit);
    if (j.contains("instrumented_exits")) {
        if (!j.at("instrumented_exits").is_array()) fail("tor.instrumented_exits", "expected an array");
        config.instrumented_exits.clear();
        for (const auto& idx : j.at("instrumented_exits")) {
            if (!idx.is_number_unsigned()) fail("tor.instrumented_exits", "expected exit indices");
            config.instrumented_exits.push_back(idx.get<size_t>());
        }
    }
    for (size_t idx : config.instrumented_exits)
        if (idx >= config.n_exit) fail("tor.instrumented_exits", "index " + std::to_string(idx) + " >= n_exit");
    if (j.contains("hijack_exit")) {
        if (!j.at("hijack_exit").is_number_unsigned()) fail("tor.hijack_exit", "expected an exit index");
        config.hijack_exit = j.at("hijack_exit").get<size_t>();
        if (*config.hijack_exit >= config.n_exit) fail("tor.hijack_exit", "index >= n_exit");
    }
}

void parse_adversary(const json& j, ScenarioConfig& config) {
    check_keys(j, "adversary",
               {"correlation_window_s", "freshness_window_s", "hijack", "dht_match", "linkage"});
    config.correlation_window_s = get_number<uint32_t>(at(j, "correlation_window_s"),
                                                       "adversary.correlation_window_s",
                                                       config.correlation_window_s);
    config.freshness_window_s = get_number<uint32_t>(at(j, "freshness_window_s"),
                                                     "adversary.freshness_window_s", config.freshness_window_s);
    config.hijack_enabled = get_bool(at(j, "hijack"), "adversary.hijack", config.hijack_enabled);
    config.dht_match_enabled = get_bool(at(j, "dht_match"), "adversary.dht_match", config.dht_match_enabled);
    config.linkage_enabled = get_bool(at(j, "linkage"), "adversary.linkage", config.linkage_enabled);
}

void parse_downloads(const json& j, bt::DownloadsConfig& downloads) {
    check_keys(j, "bittorrent.downloads", {"mode", "swarm_size", "per_peer_min", "per_peer_max"});
    downloads.mode = get_string(at(j, "mode"), "bittorrent.downloads.mode", downloads.mode);
    if (downloads.mode != "swarm_size" && downloads.mode != "popularity" && downloads.mode != "unique")
        fail("bittorrent.downloads.mode", "must be swarm_size, popularity, or unique");
    if (j.contains("swarm_size")) {
        const json& s = j.at("swarm_size");
        check_keys(s, "bittorrent.downloads.swarm_size", {"dist", "min", "max", "alpha", "fixed"});
        downloads.swarm_size_dist =
            get_string(at(s, "dist"), "bittorrent.downloads.swarm_size.dist", downloads.swarm_size_dist);
        if (downloads.swarm_size_dist != "pareto" && downloads.swarm_size_dist != "fixed" &&
            downloads.swarm_size_dist != "uniform")
            fail("bittorrent.downloads.swarm_size.dist", "must be pareto, fixed, or uniform");
        downloads.swarm_size_min =
            get_number<size_t>(at(s, "min"), "bittorrent.downloads.swarm_size.min", downloads.swarm_size_min);
        downloads.swarm_size_max =
            get_number<size_t>(at(s, "max"), "bittorrent.downloads.swarm_size.max", downloads.swarm_size_max);
        downloads.swarm_size_alpha = get_number<double>(at(s, "alpha"), "bittorrent.downloads.swarm_size.alpha",
                                                        downloads.swarm_size_alpha);
        downloads.swarm_size_fixed = get_number<size_t>(at(s, "fixed"), "bittorrent.downloads.swarm_size.fixed",
                                                        downloads.swarm_size_fixed);
    }
    downloads.per_peer_min =
        get_number<size_t>(at(j, "per_peer_min"), "bittorrent.downloads.per_peer_min", downloads.per_peer_min);
    downloads.per_peer_max =
        get_number<size_t>(at(j, "per_peer_max"), "bittorrent.downloads.per_peer_max", downloads.per_peer_max);
    if (downloads.per_peer_min > downloads.per_peer_max)
        fail("bittorrent.downloads.per_peer_min", "min > max");
}

void parse_catalog(const json& j, bt::CatalogConfig& catalog) {
    check_keys(j, "bittorrent.catalog", {"n_items", "shares", "tags", "popularity", "zipf_exponent"});
    catalog.n_items = get_number<size_t>(at(j, "n_items"), "bittorrent.catalog.n_items", catalog.n_items);
    if (j.contains("shares")) {
        const json& s = j.at("shares");
        check_keys(s, "bittorrent.catalog.shares", {"public", "private", "underground"});
        catalog.share_public = get_fraction(at(s, "public"), "bittorrent.catalog.shares.public", catalog.share_public);
        catalog.share_private =
            get_fraction(at(s, "private"), "bittorrent.catalog.shares.private", catalog.share_private);
        catalog.share_underground = get_fraction(at(s, "underground"), "bittorrent.catalog.shares.underground",
                                                 catalog.share_underground);
    }
    double sum = catalog.share_public + catalog.share_private + catalog.share_underground;
    if (std::fabs(sum - 1.0) > 1e-9) fail("bittorrent.catalog.shares", "must sum to 1");
    if (j.contains("tags")) {
        if (!j.at("tags").is_array()) fail("bittorrent.catalog.tags", "expected an array of strings");
        catalog.tag_vocabulary.clear();
        for (const auto& tag : j.at("tags")) {
            if (!tag.is_string()) fail("bittorrent.catalog.tags", "expected an array of strings");
            catalog.tag_vocabulary.push_back(tag.get<std::string>());
        }
        if (catalog.tag_vocabulary.empty()) fail("bittorrent.catalog.tags", "needs at least one tag");
    }
    catalog.popularity = get_string(at(j, "popularity"), "bittorrent.catalog.popularity", catalog.popularity);
    if (catalog.popularity != "uniform" && catalog.popularity != "zipf")
        fail("bittorrent.catalog.popularity", "must be uniform or zipf");
    catalog.zipf_exponent =
        get_number<double>(at(j, "zipf_exponent"), "bittorrent.catalog.zipf_exponent", catalog.zipf_exponent);
}

void parse_bittorrent(const json& j, ScenarioConfig& config) {
    check_keys(j, "bittorrent",
               {"n_peers", "tor_user_fraction", "behavior", "announce_interval_s", "announce_jitter",
                "encryption_fraction", "max_peers_in_response", "max_connections_per_swarm",
                "session_start_window_s", "session_duration_s", "dht_head_start_s", "connect_retry_delay_s",
                "pex", "declare_public_ip", "n_trackers", "downloads", "catalog"});
    bt::BtConfig& btc = config.bt;
    btc.n_peers = get_number<size_t>(at(j, "n_peers"), "bittorrent.n_peers", btc.n_peers);
    btc.tor_user_fraction =
        get_fraction(at(j, "tor_user_fraction"), "bittorrent.tor_user_fraction", btc.tor_user_fraction);
    if (j.contains("behavior")) {
        const json& b = j.at("behavior");
        check_keys(b, "bittorrent.behavior", {"tracker_only", "all_via_tor"});
        btc.behavior_tracker_only =
            get_fraction(at(b, "tracker_only"), "bittorrent.behavior.tracker_only", btc.behavior_tracker_only);
        btc.behavior_all_via_tor =
            get_fraction(at(b, "all_via_tor"), "bittorrent.behavior.all_via_tor", btc.behavior_all_via_tor);
    }
    if (std::fabs(btc.behavior_tracker_only + btc.behavior_all_via_tor - 1.0) > 1e-9)
        fail("bittorrent.behavior", "tracker_only + all_via_tor must sum to 1");
    btc.announce_interval_s =
        get_number<uint32_t>(at(j, "announce_interval_s"), "bittorrent.announce_interval_s", btc.announce_interval_s);
    if (btc.announce_interval_s == 0) fail("bittorrent.announce_interval_s", "must be positive");
    btc.announce_jitter = get_fraction(at(j, "announce_jitter"), "bittorrent.announce_jitter", btc.announce_jitter);
    btc.encryption_fraction =
        get_fraction(at(j, "encryption_fraction"), "bittorrent.encryption_fraction", btc.encryption_fraction);
    btc.max_peers_in_response = get_number<uint32_t>(at(j, "max_peers_in_response"),
                                                     "bittorrent.max_peers_in_response", btc.max_peers_in_response);
    btc.max_connections_per_swarm =
        get_number<size_t>(at(j, "max_connections_per_swarm"), "bittorrent.max_connections_per_swarm",
                           btc.max_connections_per_swarm);
    btc.session_start_window_s = get_number<uint32_t>(at(j, "session_start_window_s"),
                                                      "bittorrent.session_start_window_s",
                                                      btc.session_start_window_s);
    btc.session_duration_s =
        get_number<uint32_t>(at(j, "session_duration_s"), "bittorrent.session_duration_s", btc.session_duration_s);
    btc.dht_head_start_s =
        get_number<uint32_t>(at(j, "dht_head_start_s"), "bittorrent.dht_head_start_s", btc.dht_head_start_s);
    btc.connect_retry_delay_s = get_number<uint32_t>(at(j, "connect_retry_delay_s"),
                                                     "bittorrent.connect_retry_delay_s", btc.connect_retry_delay_s);
    if (j.contains("pex")) {
        const json& p = j.at("pex");
        check_keys(p, "bittorrent.pex", {"enabled", "delay_s"});
        btc.pex_enabled = get_bool(at(p, "enabled"), "bittorrent.pex.enabled", btc.pex_enabled);
        btc.pex_delay_s = get_number<uint32_t>(at(p, "delay_s"), "bittorrent.pex.delay_s", btc.pex_delay_s);
    }
    btc.declare_public_ip = get_bool(at(j, "declare_public_ip"), "bittorrent.declare_public_ip",
                                     btc.declare_public_ip);
    config.n_trackers = get_number<size_t>(at(j, "n_trackers"), "bittorrent.n_trackers", config.n_trackers);
    if (config.n_trackers == 0) fail("bittorrent.n_trackers", "must be positive");
    if (j.contains("downloads")) parse_downloads(j.at("downloads"), btc.downloads);
    if (j.contains("catalog")) parse_catalog(j.at("catalog"), btc.catalog);
}

void parse_web(const json& j, ScenarioConfig& config) {
    check_keys(j, "web", {"n_users", "requests_per_hour", "n_servers", "port_weights"});
    config.n_web_only_users = get_number<size_t>(at(j, "n_users"), "web.n_users", config.n_web_only_users);
    config.web_requests_per_hour =
        get_number<double>(at(j, "requests_per_hour"), "web.requests_per_hour", config.web_requests_per_hour);
    if (config.web_requests_per_hour < 0) fail("web.requests_per_hour", "must be >= 0");
    config.n_web_servers = get_number<size_t>(at(j, "n_servers"), "web.n_servers", config.n_web_servers);
    if (j.contains("port_weights")) {
        if (!j.at("port_weights").is_object()) fail("web.port_weights", "expected an object");
        config.web_port_weights.clear();
        for (const auto& [key, value] : j.at("port_weights").items()) {
            unsigned long port = 0;
            try {
                port = std::stoul(key);
            } catch (...) {
                fail("web.port_weights", "key \"" + key + "\" is not a port");
            }
            if (port == 0 || port > 65535) fail("web.port_weights", "port out of range");
            config.web_port_weights[static_cast<uint16_t>(port)] =
                get_fraction(value, "web.port_weights." + key, 0.0);
        }
        if (config.web_port_weights.empty()) fail("web.port_weights", "needs at least one port");
    }
}

void parse_population(const json& j, ScenarioConfig& config) {
    if (!j.is_array()) fail("population", "expected an array");
    config.population.clear();
    double sum = 0;
    for (const auto& row : j) {
        check_keys(row, "population[]", {"country", "asn", "weight"});
        sim::PopulationEntry entry;
        entry.country = get_string(at(row, "country"), "population[].country", "");
        if (entry.country.size() != 2) fail("population[].country", "expected an ISO-3166 alpha-2 code");
        entry.asn = get_number<uint32_t>(at(row, "asn"), "population[].asn", 0);
        entry.weight = get_fraction(at(row, "weight"), "population[].weight", 0.0);
        sum += entry.weight;
        config.population.push_back(std::move(entry));
    }
    if (std::fabs(sum - 1.0) > 1e-9) fail("population", "weights must sum to 1");
}

void parse_baseline(const json& j, ScenarioConfig& config) {
    if (!j.is_object()) fail("baseline", "expected an object of country -> share");
    config.baseline.clear();
    double sum = 0;
    for (const auto& [key, value] : j.items()) {
        double share = get_fraction(value, "baseline." + key, 0.0);
        config.baseline[key] = share;
        sum += share;
    }
    if (std::fabs(sum - 1.0) > 1e-9) fail("baseline", "shares must sum to 1");
}

} // namespace

ScenarioConfig::ScenarioConfig() : population(default_population()), baseline(default_baseline()) {}

ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig config;
    check_keys(j, "",
               {"name", "seed", "virtual_duration_s", "report_dir", "snapshot_interval_s", "top_k", "latency",
                "logs", "tor", "adversary", "bittorrent", "web", "population", "baseline"});
    config.name = get_string(at(j, "name"), "name", config.name);
    config.seed = get_number<uint64_t>(at(j, "seed"), "seed", config.seed);
    config.virtual_duration_s =
        get_number<uint32_t>(at(j, "virtual_duration_s"), "virtual_duration_s", config.virtual_duration_s);
    if (config.virtual_duration_s == 0) fail("virtual_duration_s", "must be positive");
    config.report_dir = get_string(at(j, "report_dir"), "report_dir", config.report_dir);
    config.snapshot_interval_s =
        get_number<uint32_t>(at(j, "snapshot_interval_s"), "snapshot_interval_s", config.snapshot_interval_s);
    if (config.snapshot_interval_s == 0) fail("snapshot_interval_s", "must be positive");
    config.top_k = get_number<size_t>(at(j, "top_k"), "top_k", config.top_k);
    if (j.contains("latency")) {
        const json& l = j.at("latency");
        check_keys(l, "latency", {"min_ms", "max_ms"});
        config.latency_min_ms = get_number<uint32_t>(at(l, "min_ms"), "latency.min_ms", config.latency_min_ms);
        config.latency_max_ms = get_number<uint32_t>(at(l, "max_ms"), "latency.max_ms", config.latency_max_ms);
        if (config.latency_min_ms > config.latency_max_ms) fail("latency", "min_ms > max_ms");
        if (config.latency_min_ms == 0) fail("latency.min_ms", "must be positive");
    }
    if (j.contains("logs")) {
        const json& l = j.at("logs");
        check_keys(l, "logs", {"events", "traces"});
        config.emit_event_log = get_bool(at(l, "events"), "logs.events", config.emit_event_log);
        config.emit_trace_log = get_bool(at(l, "traces"), "logs.traces", config.emit_trace_log);
    }
    if (j.contains("tor")) parse_tor(j.at("tor"), config);
    if (j.contains("adversary")) parse_adversary(j.at("adversary"), config);
    if (j.contains("bittorrent")) parse_bittorrent(j.at("bittorrent"), config);
    if (j.contains("web")) parse_web(j.at("web"), config);
    if (j.contains("population")) parse_population(j.at("population"), config);
    if (j.contains("baseline")) parse_baseline(j.at("baseline"), config);

    if (config.instrumented_exits.empty()) fail("tor.instrumented_exits", "needs at least one exit");
    if (!config.hijack_exit) config.hijack_exit = config.instrumented_exits.front();
    // the rewrite runs on an instrumented exit
    bool hijack_instrumented = false;
    for (size_t idx : config.instrumented_exits)
        if (idx == *config.hijack_exit) hijack_instrumented = true;
    if (!hijack_instrumented) fail("tor.hijack_exit", "must be one of the instrumented exits");
    // validates duplicate ports across groups
    tor::CircuitPolicy(config.policy, config.port_groups);
    return config;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }
    return parse_scenario(j);
}

void apply_override(json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigInvalid("override \"" + assignment + "\" is not key=value");
    std::string path = assignment.substr(0, eq);
    std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw; // unquoted strings are taken verbatim
    }
    json* node = &j;
    size_t pos = 0;
    while (true) {
        size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (key.empty()) throw ConfigInvalid("override path \"" + path + "\" has an empty segment");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

nlohmann::json to_json(const ScenarioConfig& config) {
    json j;
    j["name"] = config.name;
    j["seed"] = config.seed;
    j["virtual_duration_s"] = config.virtual_duration_s;
    j["report_dir"] = config.report_dir;
    j["snapshot_interval_s"] = config.snapshot_interval_s;
    j["top_k"] = config.top_k;
    j["latency"] = {{"min_ms", config.latency_min_ms}, {"max_ms", config.latency_max_ms}};
    j["logs"] = {{"events", config.emit_event_log}, {"traces", config.emit_trace_log}};
    json tor_j;
    tor_j["n_hops"] = config.n_hops;
    tor_j["circuit_lifetime_s"] = config.circuit_lifetime_s;
    tor_j["policy"] = tor::to_string(config.policy);
    tor_j["port_groups"] = config.port_groups;
    tor_j["n_entry"] = config.n_entry;
    tor_j["n_middle"] = config.n_middle;
    tor_j["n_exit"] = config.n_exit;
    tor_j["instrumented_exits"] = config.instrumented_exits;
    if (config.hijack_exit) tor_j["hijack_exit"] = *config.hijack_exit;
    j["tor"] = tor_j;
    j["adversary"] = {{"correlation_window_s", config.correlation_window_s},
                      {"freshness_window_s", config.freshness_window_s},
                      {"hijack", config.hijack_enabled},
                      {"dht_match", config.dht_match_enabled},
                      {"linkage", config.linkage_enabled}};
    json bt_j;
    bt_j["n_peers"] = config.bt.n_peers;
    bt_j["tor_user_fraction"] = config.bt.tor_user_fraction;
    bt_j["behavior"] = {{"tracker_only", config.bt.behavior_tracker_only},
                        {"all_via_tor", config.bt.behavior_all_via_tor}};
    bt_j["announce_interval_s"] = config.bt.announce_interval_s;
    bt_j["announce_jitter"] = config.bt.announce_jitter;
    bt_j["encryption_fraction"] = config.bt.encryption_fraction;
    bt_j["max_peers_in_response"] = config.bt.max_peers_in_response;
    bt_j["max_connections_per_swarm"] = config.bt.max_connections_per_swarm;
    bt_j["session_start_window_s"] = config.bt.session_start_window_s;
    bt_j["session_duration_s"] = config.bt.session_duration_s;
    bt_j["dht_head_start_s"] = config.bt.dht_head_start_s;
    bt_j["connect_retry_delay_s"] = config.bt.connect_retry_delay_s;
    bt_j["pex"] = {{"enabled", config.bt.pex_enabled}, {"delay_s", config.bt.pex_delay_s}};
    bt_j["declare_public_ip"] = config.bt.declare_public_ip;
    bt_j["n_trackers"] = config.n_trackers;
    bt_j["downloads"] = {{"mode", config.bt.downloads.mode},
                         {"swarm_size",
                          {{"dist", config.bt.downloads.swarm_size_dist},
                           {"min", config.bt.downloads.swarm_size_min},
                           {"max", config.bt.downloads.swarm_size_max},
                           {"alpha", config.bt.downloads.swarm_size_alpha},
                           {"fixed", config.bt.downloads.swarm_size_fixed}}},
                         {"per_peer_min", config.bt.downloads.per_peer_min},
                         {"per_peer_max", config.bt.downloads.per_peer_max}};
    bt_j["catalog"] = {{"n_items", config.bt.catalog.n_items},
                       {"shares",
                        {{"public", config.bt.catalog.share_public},
                         {"private", config.bt.catalog.share_private},
                         {"underground", config.bt.catalog.share_underground}}},
                       {"tags", config.bt.catalog.tag_vocabulary},
                       {"popularity", config.bt.catalog.popularity},
                       {"zipf_exponent", config.bt.catalog.zipf_exponent}};
    j["bittorrent"] = bt_j;
    json web_port_weights = json::object();
    for (const auto& [port, weight] : config.web_port_weights)
        web_port_weights[std::to_string(port)] = weight;
    j["web"] = {{"n_users", config.n_web_only_users},
                {"requests_per_hour", config.web_requests_per_hour},
                {"n_servers", config.n_web_servers},
                {"port_weights", web_port_weights}};
    json population = json::array();
    for (const auto& entry : config.population)
        population.push_back({{"country", entry.country}, {"asn", entry.asn}, {"weight", entry.weight}});
    j["population"] = population;
    json baseline = json::object();
    for (const auto& [country, share] : config.baseline) baseline[country] = share;
    j["baseline"] = baseline;
    return j;
}

nlohmann::json default_scenario_json() { return to_json(ScenarioConfig{}); }

} // namespace torbtsim::scenario
