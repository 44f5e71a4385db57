#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace anonprice {

// Tri(v, q): CDF p(1-q)/(p(1-q) + vq) below v with mass q at v. q = 0 encodes
// a vanished distribution (all value at 0).
struct TriangularDist {
    double v = 1.0;
    double q = 0.0;
};

// Tri(inf, r0): CDF p/(p + r0), all revenue at infinity.
struct TriInfinityDist {
    double r0 = 1.0;
};

// Regular distribution given by its piecewise-linear concave revenue curve r(q).
class PiecewiseRQDist {
public:
    using Knot = std::pair<double, double>;  // (q, r)

    explicit PiecewiseRQDist(std::vector<Knot> knots);

    const std::vector<Knot>& knots() const { return knots_; }
    const std::vector<double>& slopes() const { return slopes_; }
    // r_j - s_j q_j, the revenue-axis intercept of segment j.
    const std::vector<double>& intercepts() const { return intercepts_; }

private:
    std::vector<Knot> knots_;
    std::vector<double> slopes_;
    std::vector<double> intercepts_;
};

using BaseDistribution = std::variant<TriangularDist, TriInfinityDist, PiecewiseRQDist>;

// Base distribution with its potential lowered by a running total on (0, u_bar]
// and all value above u_bar moved onto a mass at u_bar. Repeated shifts are kept
// flat on the original base, so the closed-form density stays exact.
struct PotentialShiftedDist {
    struct Shift {
        double u_bar;
        double delta;
    };
    BaseDistribution base;
    std::vector<Shift> shifts;  // u_bar strictly decreasing, delta > 0

    double u_bar() const { return shifts.back().u_bar; }
    double total_delta() const;
};

using Distribution = std::variant<TriangularDist, TriInfinityDist, PiecewiseRQDist, PotentialShiftedDist>;

struct MonopolyStats {
    double v;   // monopoly price (largest maximizer of p(1 - F(p)))
    double q;   // monopoly quantile (smallest maximizer of r)
    double u;   // support supremum
    double r0;  // r(0)
};

// Validated constructors.
Distribution triangular(double v, double q);
Distribution tri_infinity(double r0 = 1.0);
Distribution piecewise_rq(std::vector<PiecewiseRQDist::Knot> knots);

// Left-continuous CDF Pr{x < p} and its right limit Pr{x <= p}.
double cdf(const Distribution& d, double p);
double cdf_right(const Distribution& d, double p);
// 1 - cdf(d, p) = Pr{x >= p}, without cancellation in the upper tail.
double survival(const Distribution& d, double p);
// Density of the continuous part (left limit in p).
double pdf(const Distribution& d, double p);
// Smallest p with Pr{x <= p} >= u, for u in [0, 1).
double quantile(const Distribution& d, double u);
double revenue_quantile(const Distribution& d, double q);
MonopolyStats monopoly_stats(const Distribution& d);

double support_infimum(const Distribution& d);
double support_supremum(const Distribution& d);
bool is_vanished(const Distribution& d);
bool has_mass_at(const Distribution& d, double x);

// Phi(p) = p - (1 - F(p))/f(p); p above the support maps to p itself.
double virtual_value(const Distribution& d, double p);
// lim_{x -> p+} Phi(x).
double virtual_value_above(const Distribution& d, double p);
// D(p) = Pr{Phi(x) <= p}, stored right-continuous.
double virtual_value_cdf(const Distribution& d, double p);
// sup{x : Phi(x) <= p}.
double inverse_virtual_value(const Distribution& d, double p);
// inf{x : Phi(x) >= p}; the threshold bid when ties are won.
double lower_inverse_virtual_value(const Distribution& d, double p);

// Psi(p) = ln(1 + p(1 - F(p))/F(p)); +inf where F(p) = 0.
double potential(const Distribution& d, double p);
// Psi(v) at the monopoly price; Psi is flat on (0, v] only for triangular shapes. 0 when vanished.
double peak_potential(const Distribution& d);

// Points where D may jump or kink, and whether D is a pure step function.
std::vector<double> virtual_value_breakpoints(const Distribution& d);
bool has_step_virtual_value_cdf(const Distribution& d);

// v > 1 and Phi(v+) >= 1.
bool satisfies_c1(const Distribution& d);

Distribution shift_potential(const Distribution& d, double delta, double u_bar);
Distribution compress(const Distribution& d, double eps, double u_star);

}  // namespace anonprice
