#pragma once

#include <cstdint>
#include <limits>

namespace fnets {

/// Counter-based 64-bit generator: output i of stream (key, stream) is a SplitMix64
/// finaliser applied to a mix of the three words. Streams are independent of the
/// order in which other streams are consumed, so parallel replications reproduce.
/// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key, std::uint64_t stream = 0) : key_(key), stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        std::uint64_t z = key_ ^ mix(stream_ + 0x9e3779b97f4a7c15ULL) ^ mix(counter_++ * 0xbf58476d1ce4e5b9ULL + 1);
        return mix(z);
    }

    /// Independent child stream, e.g. one per replication or per series.
    CounterRng substream(std::uint64_t id) const { return CounterRng(mix(key_ + 0x632be59bd9b4e019ULL) ^ id, mix(stream_ ^ (id + 1))); }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace fnets
