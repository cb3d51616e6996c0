#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace torbtsim {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic generator: std::mt19937_64 (its output sequence is
// fixed by the standard, so traces are reproducible across platforms).
// Bounded sampling uses plain modulo; the bias is ~range/2^64 and the
// contract here is determinism, not cryptographic uniformity.
class Rng {
  public:
    explicit Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return gen_(); }

    // inclusive bounds
    uint64_t uniform_u64(uint64_t lo, uint64_t hi) {
        return lo + next_u64() % (hi - lo + 1);
    }

    uint16_t uniform_port(uint16_t lo, uint16_t hi) {
        return static_cast<uint16_t>(uniform_u64(lo, hi));
    }

    double uniform01() { return (next_u64() >> 11) * (1.0 / 9007199254740992.0); }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    bool bernoulli(double p) { return uniform01() < p; }

    // index into weights proportional to weight; weights need not be
    // normalized but must have a positive sum
    size_t weighted_index(std::span<const double> weights) {
        double total = 0;
        for (double w : weights) total += w;
        double x = uniform01() * total;
        double acc = 0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_u64(0, i - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent child stream: used to keep subsystems (population,
    // catalog, traffic, circuits, ...) decoupled so a policy change in
    // one does not perturb the draws of another.
    Rng fork(uint64_t stream_id) const { return Rng(splitmix64(seed_ ^ splitmix64(stream_id))); }

  private:
    uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace torbtsim
