#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace anonprice {

struct McResult {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Uniform draw on [0, 1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

using SampleFn = std::function<double(std::mt19937_64&)>;

// Splits `samples` across `shards` independently seeded streams and merges the
// running moments in shard order, so the result depends only on
// (samples, seed, shards). Shards run on separate threads when shards > 1.
McResult run_monte_carlo(std::uint64_t samples, std::uint64_t seed, unsigned shards, const SampleFn& draw);

}  // namespace anonprice
