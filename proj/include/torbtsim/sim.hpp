#pragma once

#include "torbtsim/endpoint.hpp"
#include "torbtsim/rng.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace torbtsim::sim {

// Virtual clock, 1 tick = 1 virtual millisecond.
using SimTime = uint64_t;

constexpr SimTime seconds(uint64_t s) { return s * 1000; }
constexpr SimTime hours(uint64_t h) { return h * 3600 * 1000; }

using HostId = int32_t;
constexpr HostId kNoHost = -1;

struct Host {
    HostId id = kNoHost;
    Endpoint endpoint;
    std::string country; // ISO-3166 alpha-2
    uint32_t asn = 0;
};

struct EventLogRecord {
    SimTime tick = 0;
    HostId host = kNoHost;
    std::string kind;
};

// Deterministic discrete-event engine. Dispatch order is (fire_at, seq)
// lexicographic; seq is a global insertion counter, so ties break in
// insertion order.
class Engine {
  public:
    SimTime now() const { return now_; }

    // Throws SchedulingInPast when at < now().
    uint64_t schedule(SimTime at, HostId target, std::string kind, std::function<void()> fn);

    // Dispatches every event with fire_at <= deadline (including ones
    // scheduled while running); afterwards the clock sits at deadline.
    size_t run_until(SimTime deadline);

    void set_logging(bool on) { logging_ = on; }
    const std::vector<EventLogRecord>& event_log() const { return log_; }

  private:
    struct Pending {
        SimTime at;
        uint64_t seq;
        HostId target;
        std::string kind;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Pending& a, const Pending& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    SimTime now_ = 0;
    uint64_t next_seq_ = 0;
    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
    bool logging_ = false;
    std::vector<EventLogRecord> log_;
};

// Host table; enforces endpoint uniqueness across hosts.
class HostRegistry {
  public:
    // Throws std::invalid_argument if the endpoint is already taken.
    HostId add(Endpoint ep, std::string country, uint32_t asn);

    const Host& get(HostId id) const { return hosts_.at(static_cast<size_t>(id)); }
    size_t size() const { return hosts_.size(); }
    const std::vector<Host>& all() const { return hosts_; }

    // Sequential allocator for infrastructure addresses.
    uint32_t next_ip() { return next_ip_++; }

  private:
    std::vector<Host> hosts_;
    std::set<Endpoint> used_;
    uint32_t next_ip_ = 0x0b000001; // 11.0.0.1
};

struct PopulationEntry {
    std::string country;
    uint32_t asn = 0;
    double weight = 0;
};

constexpr uint16_t kPeerPortLo = 1024;
constexpr uint16_t kPeerPortHi = 65535;

// Samples n hosts whose (country, asn) follow the table weights
// multinomially; IPs are allocated uniquely from the registry and
// listening ports uniformly from [1024, 65535]. Weights must sum to
// 1 +/- 1e-9 (WeightSumInvalid otherwise).
std::vector<HostId> sample_population(const std::vector<PopulationEntry>& table, size_t n,
                                      HostRegistry& registry, Rng& rng);

} // namespace torbtsim::sim
