#include "anonprice/unit_demand.hpp"

#include "anonprice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace anonprice {

namespace {

struct Split {
    std::vector<TriangularDist> tri;
    std::vector<double> r0;  // Tri(inf) members
    double b = 0.0;          // largest triangular v
};

Split split_items(const Instance& inst, double h, double cap, const char* fn) {
    if (inst.gamma) throw unsupported_error(std::string(fn) + ": hybrid instances are not supported");
    if (!(h >= 0.0 && h < 1.0)) throw std::invalid_argument(std::string(fn) + ": h must lie in [0, 1)");
    Split s;
    for (const auto& d : inst.dists) {
        if (const auto* t = std::get_if<TriangularDist>(&d)) {
            s.tri.push_back(*t);
            if (t->q > 0.0) s.b = std::max(s.b, t->v);
        } else if (const auto* ti = std::get_if<TriInfinityDist>(&d)) {
            s.r0.push_back(ti->r0);
        } else {
            throw unsupported_error(std::string(fn) + ": only triangular and Tri(inf) items are supported");
        }
    }
    if (!(cap > s.b)) throw std::invalid_argument(std::string(fn) + ": cap must exceed every v_i");
    return s;
}

}  // namespace

std::vector<double> bupp_prices(const Instance& inst, double h, double cap) {
    split_items(inst, h, cap, "bupp_prices");
    std::vector<double> out;
    out.reserve(inst.dists.size());
    for (const auto& d : inst.dists) {
        if (const auto* t = std::get_if<TriangularDist>(&d)) out.push_back((1.0 - h) * t->v);
        else out.push_back(cap);
    }
    return out;
}

BuppBound bupp_expected_revenue_lower(const Instance& inst, double h, double cap) {
    Split s = split_items(inst, h, cap, "bupp_expected_revenue_lower");

    // A Tri(inf) value above cap + h b beats every triangular utility (at most h v_i).
    // Logs via log1p: x / (x + r0) rounds away r0 once cap is large.
    const double x = cap + h * s.b;
    double log_none_above = 0.0;  // log prod_inf F(cap + h b)
    double log_none_at_cap = 0.0;  // log prod_inf F(cap)
    double truncation = 0.0;
    for (double r0 : s.r0) {
        log_none_above -= std::log1p(r0 / x);
        log_none_at_cap -= std::log1p(r0 / cap);
        truncation += r0 * (h * s.b + r0) / (x + r0);
    }
    const double cap_term = -cap * std::expm1(log_none_above);
    const double none_at_cap = std::exp(log_none_at_cap);

    std::stable_sort(s.tri.begin(), s.tri.end(), [](const auto& x, const auto& y) { return x.v > y.v; });
    double sum = 0.0;
    double lose_earlier = 1.0;  // prod_{j<i} (1-h)(1-q_j) / (1 - h(1-q_j)), times (1-h) per item
    for (const auto& t : s.tri) {
        sum += (1.0 - h) * t.v * t.q * lose_earlier;
        const double keep = 1.0 - t.q;
        lose_earlier *= (1.0 - h) * keep / (1.0 - h * keep);
    }
    truncation += -std::expm1(log_none_at_cap) * sum;
    return {cap_term + none_at_cap * sum, truncation};
}

McResult simulate_unit_demand(const Instance& inst, const std::vector<double>& prices, std::uint64_t samples,
                              std::uint64_t seed, unsigned shards) {
    if (inst.gamma) throw unsupported_error("simulate_unit_demand: hybrid instances are not supported");
    if (prices.size() != inst.dists.size())
        throw std::invalid_argument("simulate_unit_demand: need one price per item");
    const auto& dists = inst.dists;
    auto draw = [&dists, &prices](std::mt19937_64& rng) {
        double best = -std::numeric_limits<double>::infinity();
        double pay = 0.0;
        for (std::size_t i = 0; i < dists.size(); ++i) {
            const double u = quantile(dists[i], uniform01(rng)) - prices[i];
            if (u >= 0.0 && u > best) {
                best = u;
                pay = prices[i];
            }
        }
        return pay;
    };
    return run_monte_carlo(samples, seed, shards, draw);
}

}  // namespace anonprice
