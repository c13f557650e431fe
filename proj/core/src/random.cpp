#include "viewsim/random.hpp"

#include <cmath>
#include <stdexcept>

namespace viewsim {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), gen_(seed) {}

std::uint64_t RandomSource::next_u64() {
    return gen_();
}

double RandomSource::uniform01() {
    // 53 random bits -> [0,1); nudge 0 up so the interval is open.
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u <= 0.0) {
        u = 0x1.0p-53;
    }
    return u;
}

std::size_t RandomSource::uniform_index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index: n must be >= 1");
    }
    // Fixed-point multiply keeps the mapping platform-independent.
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
    return static_cast<std::size_t>(wide >> 64);
}

bool RandomSource::bernoulli(double p) {
    return uniform01() < p;
}

double RandomSource::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("exponential: rate must be > 0");
    }
    // u in (0,1) gives 1-u in (0,1): the result is finite and never zero.
    const double u = uniform01();
    return -std::log(1.0 - u) / rate;
}

RandomSource RandomSource::derive(std::uint64_t stream_tag) const {
    return RandomSource(splitmix64(seed_ + splitmix64(stream_tag)));
}

} // namespace viewsim
