#pragma once

#include "anonprice/distribution.hpp"
#include "anonprice/monte_carlo.hpp"
#include "anonprice/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace anonprice {

struct Instance {
    std::vector<Distribution> dists;
    std::optional<double> gamma;  // continuous component Cont(gamma)
};

double ap_revenue(const Instance& inst, double p);

struct ApOptimum {
    double price;
    double revenue;
};

// Grid-and-refine search for sup_p ap(p). When the supremum is only approached
// as p -> inf (sum of r(0) terms), price is kApPriceCap and revenue is that limit.
inline constexpr double kApPriceCap = 1e9;
ApOptimum ap_optimal(const Instance& inst);

// Tail integral of 1 - exp(-Q(x)) over [a, inf). Swappable so that callers
// evaluating many nearby gammas can reuse work.
using GapTail = std::function<Integral(double a, const QuadratureConfig&)>;

// Discrete: sum r(0) + int_0^inf (1 - prod D). Hybrid: the P1 objective below.
Integral myerson_revenue(const Instance& inst, const QuadratureConfig& cfg);

// 2 + int_1^inf (1 - w(x) prod D_i(x)) dx with w = exp(-Q(max(x, gamma))), or
// w = 1 without a continuous component.
Integral p1_objective(const std::vector<Distribution>& dists, std::optional<double> gamma,
                      const QuadratureConfig& cfg, const GapTail& tail = {});

// Closed form for triangular instances: r0 terms plus sum v_i q_i prod_{j<i} (1 - q_j), v descending.
double myerson_revenue_triangular(const Instance& inst);

double potential_total(const Instance& inst, double p);
double potential_total(const std::vector<Distribution>& dists, double p);

// R(p) - Psi(p) - R(max(p, gamma)); the last term only with a continuous component.
double constraint_slack(const Instance& inst, double p);

enum class Constraint {
    Auto,  // AP for discrete instances, C2 for hybrid ones
    AP,
    C2,
    Both,
};

struct FeasibilityReport {
    bool feasible = true;
    bool ap_checked = false;
    bool c2_checked = false;
    double worst_ap = 0.0;  // max AP(p) over the grid
    double worst_ap_price = 0.0;
    double worst_slack = 0.0;  // min slack over the grid
    double worst_slack_price = 0.0;
    std::size_t points = 0;
};

FeasibilityReport feasibility_check(const Instance& inst, const std::vector<double>& grid,
                                    Constraint which = Constraint::Auto, double ap_tol = 1e-9);

// Grid on (1, inf) covering every support supremum, monopoly price and D
// breakpoint (with neighbours on both sides) plus a log grid up to kApPriceCap.
std::vector<double> default_feasibility_grid(const Instance& inst, std::size_t log_points = 2048);

McResult simulate_myerson(const Instance& inst, std::uint64_t samples, std::uint64_t seed, unsigned shards = 1);
McResult simulate_ap(const Instance& inst, double p, std::uint64_t samples, std::uint64_t seed, unsigned shards = 1);

}  // namespace anonprice
