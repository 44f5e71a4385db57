#include "anonprice/monte_carlo.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace anonprice {

namespace {

struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double tot = na + nb;
        mean += d * nb / tot;
        m2 += o.m2 + d * d * na * nb / tot;
        n += o.n;
    }
};

Moments run_shard(std::uint64_t count, std::uint64_t seed, unsigned shard, const SampleFn& draw) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), shard};
    std::mt19937_64 rng(seq);
    Moments m;
    for (std::uint64_t i = 0; i < count; ++i) m.add(draw(rng));
    return m;
}

}  // namespace

McResult run_monte_carlo(std::uint64_t samples, std::uint64_t seed, unsigned shards, const SampleFn& draw) {
    if (samples == 0) throw std::invalid_argument("monte carlo: samples must be positive");
    if (shards == 0) throw std::invalid_argument("monte carlo: shards must be positive");
    if (shards > samples) shards = static_cast<unsigned>(samples);

    std::vector<Moments> parts(shards);
    const std::uint64_t base = samples / shards;
    const std::uint64_t extra = samples % shards;
    auto count_of = [&](unsigned s) { return base + (s < extra ? 1 : 0); };

    if (shards == 1) {
        parts[0] = run_shard(samples, seed, 0, draw);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(shards);
        for (unsigned s = 0; s < shards; ++s) {
            workers.emplace_back([&, s] { parts[s] = run_shard(count_of(s), seed, s, draw); });
        }
        for (auto& w : workers) w.join();
    }

    Moments total;
    for (const auto& p : parts) total.merge(p);
    const double var = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
    return {total.mean, std::sqrt(var / static_cast<double>(total.n)), samples, seed};
}

}  // namespace anonprice
