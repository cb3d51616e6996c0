#include "torbtsim/sim.hpp"

#include "torbtsim/errors.hpp"

#include <cmath>

namespace torbtsim::sim {

uint64_t Engine::schedule(SimTime at, HostId target, std::string kind, std::function<void()> fn) {
    if (at < now_)
        throw SchedulingInPast("event \"" + kind + "\" at tick " + std::to_string(at) + " but clock is " +
                               std::to_string(now_));
    uint64_t seq = next_seq_++;
    queue_.push(Pending{at, seq, target, std::move(kind), std::move(fn)});
    return seq;
}

size_t Engine::run_until(SimTime deadline) {
    size_t dispatched = 0;
    while (!queue_.empty() && queue_.top().at <= deadline) {
        Pending ev = queue_.top();
        queue_.pop();
        now_ = ev.at;
        if (logging_) log_.push_back({ev.at, ev.target, ev.kind});
        ev.fn();
        ++dispatched;
    }
    if (deadline > now_) now_ = deadline;
    return dispatched;
}

HostId HostRegistry::add(Endpoint ep, std::string country, uint32_t asn) {
    if (!used_.insert(ep).second)
        throw std::invalid_argument("endpoint already registered: " + to_string(ep));
    HostId id = static_cast<HostId>(hosts_.size());
    hosts_.push_back(Host{id, ep, std::move(country), asn});
    return id;
}

std::vector<HostId> sample_population(const std::vector<PopulationEntry>& table, size_t n,
                                      HostRegistry& registry, Rng& rng) {
    double sum = 0;
    for (const auto& row : table) sum += row.weight;
    if (std::fabs(sum - 1.0) > 1e-9)
        throw WeightSumInvalid("population weights sum to " + std::to_string(sum));
    std::vector<double> weights;
    weights.reserve(table.size());
    for (const auto& row : table) weights.push_back(row.weight);

    std::vector<HostId> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& row = table[rng.weighted_index(weights)];
        Endpoint ep{registry.next_ip(), rng.uniform_port(kPeerPortLo, kPeerPortHi)};
        out.push_back(registry.add(ep, row.country, row.asn));
    }
    return out;
}

} // namespace torbtsim::sim
