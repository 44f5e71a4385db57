#include "anonprice/revenue.hpp"

#include "anonprice/errors.hpp"
#include "anonprice/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace anonprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_discrete(const Instance& inst, const char* fn) {
    if (inst.gamma) throw unsupported_error(std::string(fn) + ": hybrid instances are not supported");
}

// Running product of step-function factors, kept as a log-sum plus a count of
// exact zeros so factors can be swapped in and out without drift to 0/0.
class StepProduct {
public:
    void add(double d) {
        if (d <= 0.0) ++zeros_;
        else if (d < 1.0) log_ += std::log(d);
    }
    void remove(double d) {
        if (d <= 0.0) --zeros_;
        else if (d < 1.0) log_ -= std::log(d);
    }
    double value() const { return zeros_ > 0 ? 0.0 : std::exp(log_); }

private:
    double log_ = 0.0;
    long zeros_ = 0;
};

// int_a^b (1 - w(x) prod_i D_i(x)) dx. The weight is exp(-Q(max(x, gamma)))
// with a continuous component and 1 otherwise.
Integral integrate_gap(const std::vector<Distribution>& dists, double a, double b, std::optional<double> gamma,
                       const QuadratureConfig& cfg) {
    Integral out;
    if (!(b > a)) return out;

    std::vector<std::size_t> smooth;
    std::vector<std::pair<double, std::size_t>> events;
    std::vector<double> cuts{a, b};
    std::vector<double> current(dists.size(), 1.0);
    StepProduct prod;

    for (std::size_t i = 0; i < dists.size(); ++i) {
        const auto& d = dists[i];
        if (is_vanished(d)) continue;
        const bool step = has_step_virtual_value_cdf(d);
        for (double x : virtual_value_breakpoints(d)) {
            if (!(x > a && x < b)) continue;
            cuts.push_back(x);
            if (step) events.emplace_back(x, i);
        }
        if (step) {
            current[i] = virtual_value_cdf(d, a);
            prod.add(current[i]);
        } else {
            smooth.push_back(i);
        }
    }
    if (gamma && *gamma > a && *gamma < b) cuts.push_back(*gamma);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::sort(events.begin(), events.end());

    auto weight = [&](double x) {
        if (!gamma) return 1.0;
        const double m = std::max(x, *gamma);
        return m <= 1.0 ? 0.0 : std::exp(-Q(m));
    };

    std::size_t next_event = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        while (next_event < events.size() && events[next_event].first <= lo) {
            const std::size_t i = events[next_event].second;
            prod.remove(current[i]);
            current[i] = virtual_value_cdf(dists[i], events[next_event].first);
            prod.add(current[i]);
            ++next_event;
        }
        const double step_value = prod.value();
        const bool const_weight = !gamma || hi <= *gamma;
        if (smooth.empty() && const_weight) {
            out.value += (1.0 - weight(lo) * step_value) * (hi - lo);
            continue;
        }
        if (smooth.empty() && step_value == 0.0) {
            out.value += hi - lo;
            continue;
        }
        auto f = [&](double x) {
            double v = weight(x) * step_value;
            for (std::size_t i : smooth) v *= virtual_value_cdf(dists[i], x);
            return 1.0 - v;
        };
        out += integrate(f, lo, hi, cfg);
    }
    return out;
}

double breakpoint_ceiling(const std::vector<Distribution>& dists) {
    double b = 0.0;
    for (const auto& d : dists) {
        if (is_vanished(d)) continue;
        for (double x : virtual_value_breakpoints(d))
            if (std::isfinite(x)) b = std::max(b, x);
    }
    return b;
}

double r0_total(const std::vector<Distribution>& dists) {
    double s = 0.0;
    for (const auto& d : dists) s += monopoly_stats(d).r0;
    return s;
}

// Prices where AP may peak or jump.
std::vector<double> kink_prices(const std::vector<Distribution>& dists) {
    std::vector<double> out;
    for (const auto& d : dists) {
        if (is_vanished(d)) continue;
        const auto ms = monopoly_stats(d);
        for (double x : {ms.v, ms.u}) {
            if (std::isfinite(x) && x > 0.0) out.push_back(x);
        }
        if (const auto* pw = std::get_if<PiecewiseRQDist>(&d)) {
            for (std::size_t j = 1; j < pw->knots().size(); ++j) {
                const auto [q, r] = pw->knots()[j];
                if (r > 0.0) out.push_back(r / q);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double golden_max(const Instance& inst, double lo, double hi, double& arg) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = ap_revenue(inst, c);
    double fd = ap_revenue(inst, d);
    for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = ap_revenue(inst, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = ap_revenue(inst, d);
        }
    }
    if (fc >= fd) {
        arg = c;
        return fc;
    }
    arg = d;
    return fd;
}

}  // namespace

double ap_revenue(const Instance& inst, double p) {
    require_discrete(inst, "ap_revenue");
    if (!(p > 0.0)) throw std::domain_error("ap_revenue: price must be positive");
    // 1 - prod F = -expm1(sum log(1 - S)), accurate when every S is tiny.
    double log_prod = 0.0;
    for (const auto& d : inst.dists) {
        const double s = survival(d, p);
        if (s >= 1.0) return p;
        log_prod += std::log1p(-s);
    }
    return -p * std::expm1(log_prod);
}

ApOptimum ap_optimal(const Instance& inst) {
    require_discrete(inst, "ap_optimal");
    std::vector<double> cand = log_grid(1e-3, kApPriceCap, 512);
    const auto kinks = kink_prices(inst.dists);
    cand.insert(cand.end(), kinks.begin(), kinks.end());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::vector<double> val(cand.size());
    for (std::size_t k = 0; k < cand.size(); ++k) val[k] = ap_revenue(inst, cand[k]);

    std::vector<std::size_t> order(cand.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    const std::size_t top = std::min<std::size_t>(8, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::size_t x, std::size_t y) { return val[x] > val[y]; });

    ApOptimum best{cand[order[0]], val[order[0]]};
    // AP is left-continuous and smooth between kinks, so refine on each side of
    // the leading candidates without crossing into a neighbouring piece.
    for (std::size_t t = 0; t < top; ++t) {
        const std::size_t k = order[t];
        for (int side : {-1, 1}) {
            const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(k) + side;
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(cand.size())) continue;
            const double lo = std::min(cand[k], cand[static_cast<std::size_t>(j)]);
            const double hi = std::max(cand[k], cand[static_cast<std::size_t>(j)]);
            double arg = 0.0;
            const double v = golden_max(inst, lo, hi, arg);
            if (v > best.revenue) best = {arg, v};
        }
    }
    const double at_inf = r0_total(inst.dists);
    if (at_inf > best.revenue) best = {kApPriceCap, at_inf};
    return best;
}

Integral p1_objective(const std::vector<Distribution>& dists, std::optional<double> gamma, const QuadratureConfig& cfg,
                      const GapTail& tail) {
    if (gamma && !(*gamma >= 1.0)) throw std::invalid_argument("p1_objective: gamma must be >= 1");
    const double top = std::max(1.0, breakpoint_ceiling(dists));
    Integral out{2.0, 0.0};
    if (!gamma) {
        out += integrate_gap(dists, 1.0, top, gamma, cfg);
        return out;
    }
    const double g = std::max(top, *gamma);
    out += integrate_gap(dists, 1.0, g, gamma, cfg);
    out += tail ? tail(g, cfg) : q_gap_tail(g, cfg);
    return out;
}

Integral myerson_revenue(const Instance& inst, const QuadratureConfig& cfg) {
    if (inst.gamma) return p1_objective(inst.dists, inst.gamma, cfg);
    Integral out{r0_total(inst.dists), 0.0};
    out += integrate_gap(inst.dists, 0.0, breakpoint_ceiling(inst.dists), std::nullopt, cfg);
    return out;
}

double myerson_revenue_triangular(const Instance& inst) {
    require_discrete(inst, "myerson_revenue_triangular");
    double r0 = 0.0;
    std::vector<TriangularDist> tri;
    for (const auto& d : inst.dists) {
        if (const auto* t = std::get_if<TriangularDist>(&d)) tri.push_back(*t);
        else if (const auto* ti = std::get_if<TriInfinityDist>(&d)) r0 += ti->r0;
        else throw unsupported_error("myerson_revenue_triangular: non-triangular distribution");
    }
    std::stable_sort(tri.begin(), tri.end(), [](const auto& x, const auto& y) { return x.v > y.v; });
    double sum = 0.0;
    double survive = 1.0;
    for (const auto& t : tri) {
        sum += t.v * t.q * survive;
        survive *= 1.0 - t.q;
    }
    return r0 + sum;
}

double potential_total(const std::vector<Distribution>& dists, double p) {
    double s = 0.0;
    for (const auto& d : dists) s += potential(d, p);
    return s;
}

double potential_total(const Instance& inst, double p) { return potential_total(inst.dists, p); }

double constraint_slack(const Instance& inst, double p) {
    if (!(p > 1.0)) throw std::domain_error("constraint_slack: p must exceed 1");
    double slack = R(p) - potential_total(inst.dists, p);
    if (inst.gamma) slack -= R(std::max(p, *inst.gamma));
    return slack;
}

FeasibilityReport feasibility_check(const Instance& inst, const std::vector<double>& grid, Constraint which,
                                    double ap_tol) {
    if (which == Constraint::Auto) which = inst.gamma ? Constraint::C2 : Constraint::AP;
    const bool check_ap = which == Constraint::AP || which == Constraint::Both;
    const bool check_c2 = which == Constraint::C2 || which == Constraint::Both;
    if (check_ap) require_discrete(inst, "feasibility_check");

    FeasibilityReport rep;
    rep.ap_checked = check_ap;
    rep.c2_checked = check_c2;
    rep.worst_slack = kInf;
    for (double p : grid) {
        if (!(p > 1.0)) throw std::domain_error("feasibility_check: grid points must exceed 1");
        ++rep.points;
        if (check_ap) {
            const double ap = ap_revenue(inst, p);
            if (ap > rep.worst_ap) {
                rep.worst_ap = ap;
                rep.worst_ap_price = p;
            }
        }
        if (check_c2) {
            const double s = constraint_slack(inst, p);
            if (s < rep.worst_slack) {
                rep.worst_slack = s;
                rep.worst_slack_price = p;
            }
        }
    }
    if (check_ap && rep.worst_ap > 1.0 + ap_tol) rep.feasible = false;
    if (check_c2 && rep.worst_slack < -1e-9) rep.feasible = false;
    if (!check_c2) rep.worst_slack = 0.0;
    return rep;
}

std::vector<double> default_feasibility_grid(const Instance& inst, std::size_t log_points) {
    std::vector<double> knots = kink_prices(inst.dists);
    for (const auto& d : inst.dists) {
        if (is_vanished(d)) continue;
        for (double x : virtual_value_breakpoints(d))
            if (std::isfinite(x)) knots.push_back(x);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    std::vector<double> grid = log_grid(1.0 + 1e-9, kApPriceCap, log_points);
    for (std::size_t k = 0; k < knots.size(); ++k) {
        const double x = knots[k];
        grid.push_back(x);
        grid.push_back(std::nextafter(x, kInf));
        grid.push_back(x * (1.0 - 1e-9));
        if (k + 1 < knots.size()) {
            const double y = knots[k + 1];
            for (double f : {0.25, 0.5, 0.75}) grid.push_back(x + f * (y - x));
        }
    }
    std::erase_if(grid, [](double p) { return !(p > 1.0) || !std::isfinite(p); });
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

McResult simulate_myerson(const Instance& inst, std::uint64_t samples, std::uint64_t seed, unsigned shards) {
    require_discrete(inst, "simulate_myerson");
    for (const auto& d : inst.dists) {
        if (monopoly_stats(d).r0 > 0.0)
            throw unsupported_error("simulate_myerson: distributions with r(0) > 0 have no attainable optimum");
    }
    const auto& dists = inst.dists;
    const std::size_t n = dists.size();
    auto draw = [&dists, n](std::mt19937_64& rng) {
        double best = -kInf;
        std::size_t w = n;
        std::vector<double> phi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double b = quantile(dists[i], uniform01(rng));
            phi[i] = virtual_value(dists[i], b);
            if (phi[i] >= 0.0 && phi[i] > best) {
                best = phi[i];
                w = i;
            }
        }
        if (w == n) return 0.0;
        // Lower-indexed rivals win ties, higher-indexed ones lose them.
        double strict = -kInf;
        double weak = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j < w) strict = std::max(strict, phi[j]);
            else if (j > w) weak = std::max(weak, phi[j]);
        }
        double pay = lower_inverse_virtual_value(dists[w], weak);
        if (strict >= 0.0) pay = std::max(pay, inverse_virtual_value(dists[w], strict));
        return pay;
    };
    return run_monte_carlo(samples, seed, shards, draw);
}

McResult simulate_ap(const Instance& inst, double p, std::uint64_t samples, std::uint64_t seed, unsigned shards) {
    require_discrete(inst, "simulate_ap");
    if (!(p > 0.0)) throw std::domain_error("simulate_ap: price must be positive");
    const auto& dists = inst.dists;
    auto draw = [&dists, p](std::mt19937_64& rng) {
        bool sold = false;
        // Draw every coordinate so the stream layout does not depend on p.
        for (const auto& d : dists) sold = (quantile(d, uniform01(rng)) >= p) || sold;
        return sold ? p : 0.0;
    };
    return run_monte_carlo(samples, seed, shards, draw);
}

}  // namespace anonprice
