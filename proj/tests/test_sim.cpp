#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "torbtsim/errors.hpp"
#include "torbtsim/sim.hpp"

#include <algorithm>
#include <cmath>

using namespace torbtsim;
using namespace torbtsim::sim;

TEST_CASE("events fire at their tick in (fire_at, seq) order") {
    Engine engine;
    std::vector<int> order;
    engine.schedule(5, 1, "ping", [&]() {
        order.push_back(1);
        CHECK(engine.now() == 5);
    });
    engine.schedule(3, 2, "a", [&]() { order.push_back(2); });
    engine.schedule(3, 3, "b", [&]() { order.push_back(3); }); // same tick: insertion order
    size_t dispatched = engine.run_until(10);
    CHECK(dispatched == 3);
    CHECK(order == std::vector<int>{2, 3, 1});
    CHECK(engine.now() == 10);
}

TEST_CASE("scheduling in the past throws") {
    Engine engine;
    engine.schedule(7, 0, "x", []() {});
    engine.run_until(7);
    CHECK(engine.now() == 7);
    CHECK_THROWS_AS(engine.schedule(3, 0, "late", []() {}), SchedulingInPast);
    CHECK_NOTHROW(engine.schedule(7, 0, "same-tick", []() {}));
}

TEST_CASE("run_until boundary is inclusive and advances the clock") {
    Engine engine;
    CHECK(engine.run_until(100) == 0);
    CHECK(engine.now() == 100);

    Engine engine2;
    int fired = 0;
    engine2.schedule(1, 0, "e1", [&]() { ++fired; });
    engine2.schedule(2, 0, "e2", [&]() { ++fired; });
    engine2.schedule(3, 0, "e3", [&]() { ++fired; });
    CHECK(engine2.run_until(2) == 2);
    CHECK(fired == 2);
    CHECK(engine2.now() == 2);
}

TEST_CASE("events scheduled while running are dispatched within the deadline") {
    Engine engine;
    std::vector<SimTime> seen;
    engine.schedule(1, 0, "seed", [&]() {
        seen.push_back(engine.now());
        engine.schedule(4, 0, "child", [&]() { seen.push_back(engine.now()); });
    });
    engine.run_until(10);
    CHECK(seen == std::vector<SimTime>{1, 4});
}

TEST_CASE("clock is monotone across a shuffled schedule") {
    Engine engine;
    Rng rng(99);
    SimTime last = 0;
    bool monotone = true;
    for (int i = 0; i < 500; ++i) {
        SimTime at = rng.uniform_u64(0, 10000);
        engine.schedule(at, 0, "e", [&, at]() {
            if (engine.now() < last || engine.now() != at) monotone = false;
            last = engine.now();
        });
    }
    engine.run_until(10000);
    CHECK(monotone);
}

TEST_CASE("identical schedules give identical event logs") {
    auto run = [](uint64_t seed) {
        Engine engine;
        engine.set_logging(true);
        Rng rng(seed);
        for (int i = 0; i < 200; ++i)
            engine.schedule(rng.uniform_u64(0, 5000), static_cast<HostId>(rng.uniform_u64(0, 9)),
                            "k" + std::to_string(rng.uniform_u64(0, 3)), []() {});
        engine.run_until(5000);
        return engine.event_log();
    };
    auto a = run(42), b = run(42);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].tick == b[i].tick);
        CHECK(a[i].host == b[i].host);
        CHECK(a[i].kind == b[i].kind);
    }
}

TEST_CASE("registry rejects duplicate endpoints") {
    HostRegistry registry;
    registry.add({0x01020304, 80}, "US", 1);
    CHECK_THROWS_AS(registry.add({0x01020304, 80}, "DE", 2), std::invalid_argument);
    CHECK_NOTHROW(registry.add({0x01020304, 81}, "DE", 2));
    CHECK(registry.size() == 2);
}

TEST_CASE("degenerate population table puts every host in the one country") {
    HostRegistry registry;
    Rng rng(1);
    auto hosts = sample_population({{"JP", 4713, 1.0}}, 10, registry, rng);
    CHECK(hosts.size() == 10);
    for (auto id : hosts) {
        CHECK(registry.get(id).country == "JP");
        CHECK(registry.get(id).asn == 4713);
    }
}

TEST_CASE("two-country split lands within 2 points of half") {
    HostRegistry registry;
    Rng rng(7);
    auto hosts = sample_population({{"US", 1, 0.5}, {"DE", 2, 0.5}}, 10000, registry, rng);
    size_t us = 0;
    for (auto id : hosts)
        if (registry.get(id).country == "US") ++us;
    double share = double(us) / 10000.0;
    CHECK(share > 0.48);
    CHECK(share < 0.52);
}

TEST_CASE("weights must sum to one") {
    HostRegistry registry;
    Rng rng(3);
    CHECK_THROWS_AS(sample_population({{"US", 1, 0.5}, {"DE", 2, 0.4}}, 10, registry, rng),
                    WeightSumInvalid);
}

TEST_CASE("sampled listening ports pass a ks test against uniform") {
    HostRegistry registry;
    Rng rng(2026);
    const size_t n = 100000;
    auto hosts = sample_population({{"US", 1, 1.0}}, n, registry, rng);
    std::vector<uint16_t> ports;
    ports.reserve(n);
    for (auto id : hosts) ports.push_back(registry.get(id).endpoint.port);
    std::sort(ports.begin(), ports.end());
    // F(x) = (x - 1023) / 64512 on [1024, 65535]
    double d = 0;
    for (size_t i = 0; i < n; ++i) {
        double f = double(ports[i] - 1023) / 64512.0;
        d = std::max(d, std::fabs(double(i + 1) / double(n) - f));
        d = std::max(d, std::fabs(f - double(i) / double(n)));
    }
    double critical = 1.628 / std::sqrt(double(n)); // alpha = 0.01
    CHECK(d < critical);
}

TEST_CASE("no two sampled hosts share an endpoint") {
    HostRegistry registry;
    Rng rng(5);
    auto hosts = sample_population({{"US", 1, 0.7}, {"JP", 2, 0.3}}, 5000, registry, rng);
    std::set<Endpoint> seen;
    for (auto id : hosts) CHECK(seen.insert(registry.get(id).endpoint).second);
}
