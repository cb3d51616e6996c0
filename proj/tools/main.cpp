#include "torbtsim/analysis.hpp"
#include "torbtsim/bencode.hpp"
#include "torbtsim/errors.hpp"
#include "torbtsim/reports.hpp"
#include "torbtsim/scenario.hpp"
#include "torbtsim/simulation.hpp"
#include "torbtsim/wire.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace torbtsim;

namespace {

nlohmann::json load_raw_config(const std::string& path) {
    if (path.empty()) return scenario::default_scenario_json();
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }
    return j;
}

scenario::ScenarioConfig resolve_config(const std::string& config_path,
                                        const std::vector<std::string>& overrides,
                                        const std::string& out_dir) {
    nlohmann::json j = load_raw_config(config_path);
    for (const auto& assignment : overrides) scenario::apply_override(j, assignment);
    if (!out_dir.empty()) j["report_dir"] = out_dir;
    return scenario::parse_scenario(j);
}

void print_summary(const scenario::ScenarioConfig& config, const simulation::RunOutput& out) {
    const auto& m = out.score.metrics;
    std::cout << config.name << " seed=" << config.seed << " policy=" << tor::to_string(config.policy)
              << ": streams=" << m.total_streams << " bt=" << m.bt_streams << " traced=" << m.traced_streams
              << " (" << m.traced_fraction_all * 100.0 << "% of all)"
              << " additional=" << m.additional_traced_streams << " direct_traces=" << out.score.direct_traces
              << "\n";
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir) {
    scenario::ScenarioConfig config = resolve_config(config_path, overrides, out_dir);
    simulation::RunOutput out = simulation::run_scenario(config);
    auto written = reports::write_run_reports(config, out);
    print_summary(config, out);
    for (const auto& path : written) std::cout << "  wrote " << path << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& out_dir, std::vector<uint64_t> seeds, std::vector<std::string> policy_names) {
    nlohmann::json base = load_raw_config(config_path);
    for (const auto& assignment : overrides) scenario::apply_override(base, assignment);
    if (!out_dir.empty()) base["report_dir"] = out_dir;
    scenario::ScenarioConfig base_config = scenario::parse_scenario(base);
    if (seeds.empty()) seeds.push_back(base_config.seed);
    std::vector<tor::PolicyKind> policies;
    if (policy_names.empty()) policy_names.push_back(tor::to_string(base_config.policy));
    for (const auto& name : policy_names) {
        auto parsed = tor::parse_policy(name);
        if (!parsed) throw ConfigInvalid("unknown policy \"" + name + "\"");
        policies.push_back(*parsed);
    }

    auto runner = [&](tor::PolicyKind policy, uint64_t seed) {
        nlohmann::json j = base;
        j["seed"] = seed;
        j["tor"]["policy"] = tor::to_string(policy);
        j["name"] = base_config.name + "-" + tor::to_string(policy);
        scenario::ScenarioConfig config = scenario::parse_scenario(j);
        simulation::RunOutput out = simulation::run_scenario(config);
        reports::write_run_reports(config, out);
        print_summary(config, out);
        return out.score;
    };
    auto rows = analysis::compare_defenses(policies, seeds, runner);
    auto written = reports::write_defense_table(base_config, rows);
    std::cout << "policy comparison (" << seeds.size() << " seed" << (seeds.size() == 1 ? "" : "s")
              << " each):\n";
    for (const auto& row : rows)
        std::cout << "  " << tor::to_string(row.policy)
                  << ": mean traced fraction = " << row.mean_traced_fraction_all
                  << ", mean additional = " << row.mean_additional_traced << "\n";
    for (const auto& path : written) std::cout << "  wrote " << path << "\n";
    return 0;
}

bool roundtrip_fixture(const std::string& stem, const std::string& bytes) {
    auto starts_with = [&](const char* prefix) { return stem.rfind(prefix, 0) == 0; };
    if (starts_with("bencode")) return bencode::encode(bencode::decode(bytes)) == bytes;
    if (starts_with("announce_request"))
        return wire::encode_announce_request(wire::decode_announce_request(bytes)) == bytes;
    if (starts_with("announce_response"))
        return wire::encode_announce_response(wire::decode_announce_response(bytes)) == bytes;
    if (starts_with("compact_peers"))
        return wire::encode_compact_peers(wire::decode_compact_peers(bytes)) == bytes;
    if (starts_with("bt_handshake")) return wire::encode_handshake(wire::decode_handshake(bytes)) == bytes;
    if (starts_with("krpc")) return wire::encode_krpc(wire::decode_krpc(bytes)) == bytes;
    throw IoFailure("fixture " + stem + " has no known message kind prefix");
}

int cmd_validate_codecs(const std::string& dir) {
    if (!fs::exists(dir)) throw IoFailure("fixture directory " + dir + " does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".bin") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cout << "warning: no .bin fixtures under " << dir << "; 0 validated\n";
        return 0;
    }
    size_t failures = 0;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bool ok = false;
        std::string note;
        try {
            ok = roundtrip_fixture(path.stem().string(), bytes);
            if (!ok) note = "re-encoded bytes differ";
        } catch (const std::exception& e) {
            note = e.what();
        }
        if (ok) {
            std::cout << "ok   " << path.filename().string() << "\n";
        } else {
            std::cout << "FAIL " << path.filename().string() << ": " << note << "\n";
            ++failures;
        }
    }
    std::cout << files.size() - failures << "/" << files.size() << " fixtures round-trip\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic onion-routing + BitTorrent tracing simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    std::vector<uint64_t> seeds;
    std::vector<std::string> policies;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config file (bundled default when omitted)");
        cmd->add_option("--out", out_dir, "report directory (overrides report_dir)");
        cmd->add_option("--override", overrides, "config override key=value (repeatable)");
    };

    CLI::App* run = app.add_subcommand("run", "run one scenario and write reports");
    add_common(run);
    run->add_option("--seed", seeds, "seed (overrides the config seed)");
    run->add_option("--policy", policies, "circuit policy (overrides the config policy)");

    CLI::App* sweep = app.add_subcommand("sweep", "replay a scenario across seeds and policies");
    add_common(sweep);
    sweep->add_option("--seed", seeds, "seeds (repeatable)");
    sweep->add_option("--policy", policies, "policies (repeatable)");

    std::string fixture_dir = "tests/fixtures/codecs";
    CLI::App* validate = app.add_subcommand("validate-codecs", "round-trip the golden wire fixtures");
    validate->add_option("dir", fixture_dir, "fixture directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            if (seeds.size() > 1) throw ConfigInvalid("run takes a single --seed");
            if (policies.size() > 1) throw ConfigInvalid("run takes a single --policy");
            if (!seeds.empty()) overrides.push_back("seed=" + std::to_string(seeds[0]));
            if (!policies.empty()) overrides.push_back("tor.policy=" + policies[0]);
            return cmd_run(config_path, overrides, out_dir);
        }
        if (app.got_subcommand(sweep)) return cmd_sweep(config_path, overrides, out_dir, seeds, policies);
        if (app.got_subcommand(validate)) return cmd_validate_codecs(fixture_dir);
    } catch (const ConfigInvalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
