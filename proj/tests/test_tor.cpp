#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "torbtsim/tor.hpp"

#include <map>

using namespace torbtsim;
using namespace torbtsim::tor;

namespace {

struct World {
    sim::Engine engine;
    sim::HostRegistry registry;
    TorOverlay overlay;

    explicit World(uint64_t seed = 1) : overlay(engine, registry, Rng(seed)) {}

    sim::HostId relay(uint8_t roles) {
        sim::HostId h = registry.add({registry.next_ip(), 9001}, "ZZ", 0);
        overlay.add_relay(h, roles);
        return h;
    }
    sim::HostId client() { return registry.add({registry.next_ip(), 40000}, "US", 1); }
};

constexpr uint8_t kEntry = static_cast<uint8_t>(RelayRole::Entry);
constexpr uint8_t kMiddle = static_cast<uint8_t>(RelayRole::Middle);
constexpr uint8_t kExit = static_cast<uint8_t>(RelayRole::Exit);

} // namespace

TEST_CASE("three relays force the unique circuit") {
    World w;
    sim::HostId e = w.relay(kEntry), m = w.relay(kMiddle), x = w.relay(kExit);
    sim::HostId c = w.client();
    Circuit& circuit = w.overlay.build_circuit(c);
    CHECK(circuit.hops == std::vector<sim::HostId>{e, m, x});
    CHECK(circuit.owner == c);
    CHECK(circuit.exit() == x);
}

TEST_CASE("exit choice is uniform across exits") {
    World w(1234);
    w.relay(kEntry);
    w.relay(kEntry);
    w.relay(kMiddle);
    w.relay(kMiddle);
    std::vector<sim::HostId> exits;
    for (int i = 0; i < 6; ++i) exits.push_back(w.relay(kExit));
    sim::HostId c = w.client();
    std::map<sim::HostId, int> counts;
    for (int i = 0; i < 1000; ++i) ++counts[w.overlay.build_circuit(c).exit()];
    for (auto exit : exits) {
        double share = counts[exit] / 1000.0;
        CHECK(share > 1.0 / 6.0 - 0.05);
        CHECK(share < 1.0 / 6.0 + 0.05);
    }
}

TEST_CASE("too few relays raise InsufficientRelays") {
    World w;
    w.relay(kEntry);
    w.relay(kExit);
    sim::HostId c = w.client();
    CHECK_THROWS_AS(w.overlay.build_circuit(c), InsufficientRelays); // no middle for n=3
    World w2;
    w2.relay(kEntry | kMiddle | kExit);
    CHECK_THROWS_AS(w2.overlay.build_circuit(w2.client()), InsufficientRelays); // must be distinct
}

TEST_CASE("hops are distinct and role-respecting") {
    World w(77);
    for (int i = 0; i < 4; ++i) w.relay(kEntry | kMiddle | kExit);
    sim::HostId c = w.client();
    for (int i = 0; i < 200; ++i) {
        Circuit& circuit = w.overlay.build_circuit(c);
        CHECK(circuit.hops.size() == 3);
        CHECK(circuit.hops[0] != circuit.hops[1]);
        CHECK(circuit.hops[1] != circuit.hops[2]);
        CHECK(circuit.hops[0] != circuit.hops[2]);
    }
}

TEST_CASE("multiplex_all reuses the newest live circuit") {
    World w;
    w.relay(kEntry);
    w.relay(kMiddle);
    w.relay(kExit);
    sim::HostId c = w.client();
    w.overlay.set_policy(CircuitPolicy(PolicyKind::MultiplexAll));
    Stream& s1 = w.overlay.open_stream(c, {0x08080808, 80}, "web");
    w.engine.run_until(1000); // 1 s later
    Stream& s2 = w.overlay.open_stream(c, {0x08080809, 6881}, "bittorrent");
    CHECK(s1.circuit == s2.circuit);
}

TEST_CASE("circuits expire after their lifetime") {
    World w;
    w.relay(kEntry);
    w.relay(kMiddle);
    w.relay(kExit);
    sim::HostId c = w.client();
    w.overlay.set_policy(CircuitPolicy(PolicyKind::MultiplexAll));
    w.overlay.set_circuit_lifetime(sim::seconds(600));
    uint64_t first = w.overlay.open_stream(c, {0x08080808, 80}, "web").circuit;
    w.engine.run_until(sim::seconds(599));
    CHECK(w.overlay.open_stream(c, {0x08080808, 80}, "web").circuit == first);
    w.engine.run_until(sim::seconds(600));
    CHECK(w.overlay.open_stream(c, {0x08080808, 80}, "web").circuit != first);
}

TEST_CASE("one_stream_per_circuit always builds") {
    World w;
    w.relay(kEntry);
    w.relay(kMiddle);
    w.relay(kExit);
    sim::HostId c = w.client();
    w.overlay.set_policy(CircuitPolicy(PolicyKind::OneStreamPerCircuit));
    uint64_t c1 = w.overlay.open_stream(c, {0x08080808, 80}, "web").circuit;
    uint64_t c2 = w.overlay.open_stream(c, {0x08080808, 80}, "web").circuit;
    CHECK(c1 != c2);
}

TEST_CASE("port groups isolate destination ports") {
    World w;
    w.relay(kEntry);
    w.relay(kMiddle);
    w.relay(kExit);
    sim::HostId c = w.client();
    w.overlay.set_policy(CircuitPolicy(PolicyKind::PortGroupIsolation, {{80, 443}, {6881}}));
    uint64_t web = w.overlay.open_stream(c, {0x08080808, 80}, "web").circuit;
    uint64_t bt = w.overlay.open_stream(c, {0x08080809, 6881}, "bittorrent").circuit;
    uint64_t web2 = w.overlay.open_stream(c, {0x08080810, 443}, "web").circuit;
    uint64_t other = w.overlay.open_stream(c, {0x08080811, 22222}, "other").circuit; // residual group
    CHECK(web != bt);
    CHECK(web == web2);
    CHECK(other != web);
    CHECK(other != bt);
}

TEST_CASE("per-application isolation separates app tags") {
    World w;
    w.relay(kEntry);
    w.relay(kMiddle);
    w.relay(kExit);
    sim::HostId c = w.client();
    w.overlay.set_policy(CircuitPolicy(PolicyKind::PerApplicationIsolation));
    uint64_t web = w.overlay.open_stream(c, {0x08080808, 80}, "web").circuit;
    uint64_t bt = w.overlay.open_stream(c, {0x08080808, 80}, "bittorrent").circuit;
    uint64_t web2 = w.overlay.open_stream(c, {0x08080809, 443}, "web").circuit;
    CHECK(web != bt);
    CHECK(web == web2);
}

TEST_CASE("a port may not sit in two groups") {
    CHECK_THROWS_AS(CircuitPolicy(PolicyKind::PortGroupIsolation, {{80, 443}, {443}}), ConfigInvalid);
}

TEST_CASE("only instrumented exits feed the tap, without the owner") {
    World w(9);
    w.relay(kEntry);
    w.relay(kMiddle);
    sim::HostId exit_a = w.relay(kExit);
    sim::HostId c = w.client();
    std::vector<TapStream> taps;
    ExitTap tap;
    tap.on_stream = [&](const TapStream& t) { taps.push_back(t); };
    w.overlay.set_tap(std::move(tap));

    SUBCASE("not instrumented: silent") {
        Stream& s = w.overlay.open_stream(c, {0x08080808, 80}, "web");
        w.overlay.send(s.id, "GET / HTTP/1.1\r\n\r\n", [](sim::HostId, Endpoint, std::string) {});
        w.engine.run_until(sim::seconds(10));
        CHECK(taps.empty());
    }
    SUBCASE("instrumented: one observation per stream payload") {
        w.overlay.set_instrumented_exits({exit_a});
        Stream& s = w.overlay.open_stream(c, {0x08080808, 80}, "web");
        w.overlay.send(s.id, "GET / HTTP/1.1\r\n\r\n", [](sim::HostId, Endpoint, std::string) {});
        w.engine.run_until(sim::seconds(10));
        REQUIRE(taps.size() == 1);
        CHECK(taps[0].exit_host == exit_a);
        CHECK(taps[0].circuit == s.circuit);
        CHECK(taps[0].destination == Endpoint{0x08080808, 80});
        // the stream got classified at the exit
        CHECK(w.overlay.stream(s.id).cls == wire::StreamClass::Http);
    }
}

TEST_CASE("replies cross the tap and can be rewritten in flight") {
    World w(11);
    w.relay(kEntry);
    w.relay(kMiddle);
    sim::HostId exit_relay = w.relay(kExit);
    sim::HostId c = w.client();
    sim::HostId server = w.registry.add({0x08080808, 80}, "ZZ", 0);
    w.overlay.set_instrumented_exits({exit_relay});
    ExitTap tap;
    tap.on_response = [](const TapStream&, std::string bytes) { return bytes + " tampered"; };
    w.overlay.set_tap(std::move(tap));

    Stream& s = w.overlay.open_stream(c, {0x08080808, 80}, "web");
    std::string client_got;
    w.overlay.reply(s.id, server, "hello", [&](std::string bytes) { client_got = bytes; });
    w.engine.run_until(sim::seconds(10));
    CHECK(client_got == "hello tampered");
}
