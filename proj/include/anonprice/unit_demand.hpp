#pragma once

#include "anonprice/monte_carlo.hpp"
#include "anonprice/revenue.hpp"

#include <cstdint>
#include <vector>

namespace anonprice {

// Uniform price p on every item sells exactly when some value reaches p, the
// same event as a single-item anonymous price.
inline double upm_revenue(const Instance& inst, double p) { return ap_revenue(inst, p); }

inline constexpr double kDefaultItemCap = 1e9;

// cap for every Tri(inf) item, (1 - h) v_i for every triangular item, in input order.
std::vector<double> bupp_prices(const Instance& inst, double h, double cap = kDefaultItemCap);

struct BuppBound {
    double value = 0.0;
    // Distance to the cap -> inf limit of the same bound.
    double truncation_error = 0.0;
};

// Lower bound on the revenue of bupp_prices against a unit-demand buyer:
//   cap (1 - prod_inf F(cap + h b))
//   + prod_inf F(cap) sum_i (1-h)^i v_i q_i prod_{j<i} (1-q_j)/(1 - h(1-q_j))
// with triangular items sorted by v descending and b = max v_i.
BuppBound bupp_expected_revenue_lower(const Instance& inst, double h, double cap = kDefaultItemCap);

// Unit-demand buyer with values drawn independently from inst.dists; buys the
// item maximizing w_i - p_i whenever that utility is >= 0, lowest index on ties.
McResult simulate_unit_demand(const Instance& inst, const std::vector<double>& prices, std::uint64_t samples,
                              std::uint64_t seed, unsigned shards = 1);

}  // namespace anonprice
