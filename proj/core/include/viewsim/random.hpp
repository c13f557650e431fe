#pragma once

#include <cstdint>
#include <random>

namespace viewsim {

// SplitMix64 finalizer, used for seed expansion and stream derivation.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic random source. The generator is std::mt19937_64, whose
// output sequence is fully specified by the standard, so identical seeds
// yield identical draws on every platform. Floating-point helpers avoid
// std::*_distribution on purpose: those are implementation-defined.
//
// Independent sub-streams are derived with derive(tag); drawing from one
// stream never advances another. The experiment driver gives each
// subsystem (traffic, attacks, client selection) its own stream so that
// changing a control-plane period cannot perturb the workload.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in the open interval (0,1).
    double uniform01();

    // Uniform integer in [0, n); n must be >= 1.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p);

    // Exponential inter-arrival delta: -ln(u)/rate, strictly positive.
    // Rejects rate <= 0.
    double exponential(double rate);

    // Independent child stream; deterministic in (seed, tag).
    RandomSource derive(std::uint64_t stream_tag) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace viewsim
