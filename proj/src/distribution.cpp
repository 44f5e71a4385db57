#include "anonprice/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace anonprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-12;
constexpr double kVanishTol = 1e-13;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void below_support(const char* fn) {
    throw std::domain_error(std::string(fn) + ": argument below the support");
}

// ---------------------------------------------------------------------------
// Triangular family. c = vq/(1-q) is the constant p(1-F)/F below v.

bool tri_vanished(const TriangularDist& d) { return d.q <= 0.0; }
bool tri_point(const TriangularDist& d) { return d.q >= 1.0; }
double tri_c(const TriangularDist& d) { return d.v * d.q / (1.0 - d.q); }

double cdf_of(const TriangularDist& d, double p) {
    if (p <= 0.0) return 0.0;
    if (tri_vanished(d)) return 1.0;
    if (p > d.v) return 1.0;
    if (tri_point(d)) return 0.0;
    return p / (p + tri_c(d));
}

double cdf_right_of(const TriangularDist& d, double p) {
    if (p >= d.v && !tri_vanished(d)) return 1.0;
    return cdf_of(d, p);
}

double pdf_of(const TriangularDist& d, double p) {
    if (tri_vanished(d) || tri_point(d) || p <= 0.0 || p > d.v) return 0.0;
    const double c = tri_c(d);
    return c / ((p + c) * (p + c));
}

double value_at_quantile(const TriangularDist& d, double t) {
    if (tri_vanished(d)) return 0.0;
    if (t <= d.q) return d.v;
    return tri_c(d) * (1.0 - t) / t;
}

double revenue_of(const TriangularDist& d, double q) {
    if (tri_vanished(d)) return 0.0;
    if (q <= d.q) return q * d.v;
    return tri_c(d) * (1.0 - q);
}

MonopolyStats monopoly_of(const TriangularDist& d) {
    if (tri_vanished(d)) return {0.0, 0.0, 0.0, 0.0};
    return {d.v, d.q, d.v, 0.0};
}

double infimum_of(const TriangularDist& d) { return tri_point(d) ? d.v : 0.0; }
double supremum_of(const TriangularDist& d) { return tri_vanished(d) ? 0.0 : d.v; }

double phi_of(const TriangularDist& d, double p) {
    if (tri_vanished(d)) {
        if (p < 0.0) below_support("virtual_value");
        return p;
    }
    if (p > d.v) return p;
    if (p == d.v) return d.v;
    if (tri_point(d) || p < 0.0) below_support("virtual_value");
    return -tri_c(d);
}

double phi_above_of(const TriangularDist& d, double p) {
    if (tri_vanished(d) || p >= d.v) return p;
    if (tri_point(d)) below_support("virtual_value_above");
    return -tri_c(d);
}

double vcdf_of(const TriangularDist& d, double p) {
    if (tri_vanished(d) || p >= d.v) return 1.0;
    return 1.0 - d.q;
}

double phi_inv_of(const TriangularDist& d, double p) {
    if (tri_vanished(d) || p >= d.v) return p;
    return d.v;
}

double phi_inv_lower_of(const TriangularDist& d, double p) {
    if (tri_vanished(d)) return std::max(p, 0.0);
    if (p > d.v) return p;
    if (!tri_point(d) && p <= -tri_c(d)) return 0.0;
    return d.v;
}

double potential_of(const TriangularDist& d, double p) {
    if (tri_vanished(d) || p > d.v) return 0.0;
    if (tri_point(d)) return kInf;
    return std::log1p(tri_c(d));
}

double peak_of(const TriangularDist& d) {
    if (tri_vanished(d)) return 0.0;
    if (tri_point(d)) return kInf;
    return std::log1p(tri_c(d));
}

// ---------------------------------------------------------------------------
// Tri(inf, r0).

double cdf_of(const TriInfinityDist& d, double p) { return p <= 0.0 ? 0.0 : p / (p + d.r0); }
double cdf_right_of(const TriInfinityDist& d, double p) { return cdf_of(d, p); }
double pdf_of(const TriInfinityDist& d, double p) { return p < 0.0 ? 0.0 : d.r0 / ((p + d.r0) * (p + d.r0)); }
double value_at_quantile(const TriInfinityDist& d, double t) { return d.r0 * (1.0 - t) / t; }
double revenue_of(const TriInfinityDist& d, double q) { return d.r0 * (1.0 - q); }
MonopolyStats monopoly_of(const TriInfinityDist& d) { return {kInf, 0.0, kInf, d.r0}; }
double infimum_of(const TriInfinityDist&) { return 0.0; }
double supremum_of(const TriInfinityDist&) { return kInf; }

double phi_of(const TriInfinityDist& d, double p) {
    if (p < 0.0) below_support("virtual_value");
    return -d.r0;
}
double phi_above_of(const TriInfinityDist& d, double p) { return phi_of(d, p); }
double vcdf_of(const TriInfinityDist&, double) { return 1.0; }
double phi_inv_of(const TriInfinityDist&, double) { return kInf; }
double phi_inv_lower_of(const TriInfinityDist& d, double p) { return p <= -d.r0 ? 0.0 : kInf; }
double potential_of(const TriInfinityDist& d, double) { return std::log1p(d.r0); }
double peak_of(const TriInfinityDist& d) { return std::log1p(d.r0); }

// ---------------------------------------------------------------------------
// Piecewise-linear revenue curve. The value at quantile t is P(t) = r(t)/t =
// a_j/t + s_j on segment j, non-increasing in t.

std::size_t pw_segments(const PiecewiseRQDist& d) { return d.slopes().size(); }
double pw_q(const PiecewiseRQDist& d, std::size_t j) { return d.knots()[j].first; }

double pw_top(const PiecewiseRQDist& d) { return d.intercepts()[0] > 0.0 ? kInf : d.slopes()[0]; }

double value_at_quantile(const PiecewiseRQDist& d, double t) {
    const auto& k = d.knots();
    if (t <= 0.0) return pw_top(d);
    // Segment j with q_j < t <= q_{j+1}.
    auto it = std::lower_bound(k.begin() + 1, k.end(), t, [](const auto& kn, double x) { return kn.first < x; });
    std::size_t j = static_cast<std::size_t>(it - k.begin()) - 1;
    j = std::min(j, pw_segments(d) - 1);
    return d.intercepts()[j] / t + d.slopes()[j];
}

double pw_bottom(const PiecewiseRQDist& d) { return d.knots().back().second; }

// Largest t in (0, 1] with P(t) >= p, or 0.
double pw_tail_quantile(const PiecewiseRQDist& d, double p) {
    if (p <= pw_bottom(d)) return 1.0;
    if (pw_top(d) < p) return 0.0;
    const std::size_t m = pw_segments(d);
    std::size_t k = 0;
    for (std::size_t j = 1; j < m; ++j) {
        if (value_at_quantile(d, pw_q(d, j)) >= p) k = j;
        else break;
    }
    const double a = d.intercepts()[k];
    const double lo = pw_q(d, k);
    const double hi = pw_q(d, k + 1);
    if (a <= 0.0) return hi;
    return std::clamp(a / (p - d.slopes()[k]), lo, hi);
}

// Index of the segment holding quantile t, choosing q_j <= t < q_{j+1}.
std::size_t pw_segment_right(const PiecewiseRQDist& d, double t) {
    const auto& k = d.knots();
    auto it = std::upper_bound(k.begin(), k.end(), t, [](double x, const auto& kn) { return x < kn.first; });
    std::size_t j = static_cast<std::size_t>(it - k.begin());
    j = j == 0 ? 0 : j - 1;
    return std::min(j, pw_segments(d) - 1);
}

// Index of the segment holding quantile t, choosing q_j < t <= q_{j+1}.
std::size_t pw_segment_left(const PiecewiseRQDist& d, double t) {
    const auto& k = d.knots();
    auto it = std::lower_bound(k.begin(), k.end(), t, [](const auto& kn, double x) { return kn.first < x; });
    std::size_t j = static_cast<std::size_t>(it - k.begin());
    j = j == 0 ? 0 : j - 1;
    return std::min(j, pw_segments(d) - 1);
}

bool pw_top_mass(const PiecewiseRQDist& d) { return d.intercepts()[0] <= 0.0 && d.slopes()[0] > 0.0; }

bool pw_vanished(const PiecewiseRQDist& d) {
    return std::all_of(d.knots().begin(), d.knots().end(), [](const auto& k) { return k.second <= 0.0; });
}

double cdf_of(const PiecewiseRQDist& d, double p) {
    if (p <= 0.0) return 0.0;
    return 1.0 - pw_tail_quantile(d, p);
}

double cdf_right_of(const PiecewiseRQDist& d, double p) {
    if (pw_top_mass(d) && p >= d.slopes()[0]) return 1.0;
    return cdf_of(d, p);
}

double pdf_of(const PiecewiseRQDist& d, double p) {
    if (p <= pw_bottom(d) || p > pw_top(d)) return 0.0;
    const double t = pw_tail_quantile(d, p);
    const std::size_t j = pw_segment_right(d, t);
    const double a = d.intercepts()[j];
    if (a <= 0.0) return 0.0;
    const double g = p - d.slopes()[j];
    return a / (g * g);
}

double revenue_of(const PiecewiseRQDist& d, double q) {
    const auto& k = d.knots();
    if (q <= 0.0) return k.front().second;
    if (q >= 1.0) return k.back().second;
    const std::size_t j = pw_segment_left(d, q);
    return k[j].second + d.slopes()[j] * (q - k[j].first);
}

MonopolyStats monopoly_of(const PiecewiseRQDist& d) {
    const auto& k = d.knots();
    const double r0 = k.front().second;
    if (pw_vanished(d)) return {0.0, 0.0, 0.0, 0.0};
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (k[j].second > best * (1.0 + 1e-15)) {
            best = k[j].second;
            arg = j;
        }
    }
    const double u = pw_top(d);
    if (arg == 0) return {kInf, 0.0, u, r0};
    return {k[arg].second / k[arg].first, k[arg].first, u, r0};
}

double infimum_of(const PiecewiseRQDist& d) { return pw_bottom(d); }
double supremum_of(const PiecewiseRQDist& d) { return pw_vanished(d) ? 0.0 : pw_top(d); }

double phi_of(const PiecewiseRQDist& d, double p) {
    if (pw_vanished(d)) return p;
    const double u = pw_top(d);
    if (p > u) return p;
    if (p == u) return u;
    if (p < pw_bottom(d)) below_support("virtual_value");
    const double t = pw_tail_quantile(d, p);
    if (t >= 1.0) return d.slopes().back();
    return d.slopes()[pw_segment_right(d, t)];
}

double phi_above_of(const PiecewiseRQDist& d, double p) {
    if (pw_vanished(d) || p >= pw_top(d)) return p;
    if (p < pw_bottom(d)) below_support("virtual_value_above");
    // Prices just above p lie on the last segment whose upper knot price clears
    // p; the relative margin keeps p = r_j / q_j from slipping past knot j.
    std::size_t k = 0;
    for (std::size_t j = 1; j < pw_segments(d); ++j) {
        if (value_at_quantile(d, pw_q(d, j)) > p * (1.0 + 1e-12)) k = j;
        else break;
    }
    return d.slopes()[k];
}

// Number of leading segments whose slope satisfies pred.
template <class Pred>
std::size_t pw_leading(const PiecewiseRQDist& d, Pred pred) {
    std::size_t j = 0;
    while (j < pw_segments(d) && pred(d.slopes()[j])) ++j;
    return j;
}

double vcdf_of(const PiecewiseRQDist& d, double p) {
    const std::size_t j = pw_leading(d, [p](double s) { return s > p; });
    return 1.0 - pw_q(d, j);
}

double phi_inv_of(const PiecewiseRQDist& d, double p) {
    if (pw_vanished(d)) return p;
    if (p >= pw_top(d)) return p;
    const std::size_t j = pw_leading(d, [p](double s) { return s > p; });
    if (j == 0) return pw_top(d);
    return value_at_quantile(d, pw_q(d, j));
}

double phi_inv_lower_of(const PiecewiseRQDist& d, double p) {
    if (pw_vanished(d)) return std::max(p, 0.0);
    const double u = pw_top(d);
    if (p > u) return p;
    const std::size_t j = pw_leading(d, [p](double s) { return s >= p; });
    if (j == 0) return u;
    return value_at_quantile(d, pw_q(d, j));
}

double potential_of(const PiecewiseRQDist& d, double p) {
    const double f = cdf_of(d, p);
    if (f <= 0.0) return kInf;
    if (f >= 1.0) return 0.0;
    return std::log1p(p * (1.0 - f) / f);
}

double peak_of(const PiecewiseRQDist& d) {
    if (pw_vanished(d)) return 0.0;
    const auto ms = monopoly_of(d);
    if (std::isinf(ms.v)) return kInf;
    return potential_of(d, ms.v);
}

// ---------------------------------------------------------------------------
// Dispatch helpers for the base of a shifted distribution.

template <class F>
auto on_base(const BaseDistribution& b, F&& f) {
    return std::visit([&](const auto& x) { return f(x); }, b);
}

double base_cdf(const BaseDistribution& b, double p) {
    return on_base(b, [p](const auto& x) { return cdf_of(x, p); });
}
double base_pdf(const BaseDistribution& b, double p) {
    return on_base(b, [p](const auto& x) { return pdf_of(x, p); });
}
double base_potential(const BaseDistribution& b, double p) {
    return on_base(b, [p](const auto& x) { return potential_of(x, p); });
}
MonopolyStats base_monopoly(const BaseDistribution& b) {
    return on_base(b, [](const auto& x) { return monopoly_of(x); });
}
double base_infimum(const BaseDistribution& b) {
    return on_base(b, [](const auto& x) { return infimum_of(x); });
}

// ---------------------------------------------------------------------------
// Potential-shifted distribution. With k = 1 - e^{-Delta} and c = 1 - 1/p:
//   F' = F / (1 - k (1 - c F)),
//   f' = (f - k (f + F^2/p^2)) / (1 - k (1 - c F))^2.

double shift_k(const PotentialShiftedDist& d) { return -std::expm1(-d.total_delta()); }

double cont_cdf(const PotentialShiftedDist& d, double p) {
    if (p <= 0.0) return 0.0;
    const double f = base_cdf(d.base, p);
    if (f <= 0.0) return 0.0;
    const double k = shift_k(d);
    return f / (1.0 - k * (1.0 - (1.0 - 1.0 / p) * f));
}

double cont_pdf(const PotentialShiftedDist& d, double p) {
    const double f = base_cdf(d.base, p);
    const double g = base_pdf(d.base, p);
    const double k = shift_k(d);
    const double den = 1.0 - k * (1.0 - (1.0 - 1.0 / p) * f);
    return (g - k * (g + f * f / (p * p))) / (den * den);
}

double cont_phi(const PotentialShiftedDist& d, double p) {
    const double f = cont_pdf(d, p);
    const double one_minus = 1.0 - cont_cdf(d, p);
    if (f <= 0.0) return one_minus > 0.0 ? -kInf : p;
    return p - one_minus / f;
}

double shifted_v(const PotentialShiftedDist& d) { return std::min(base_monopoly(d.base).v, d.u_bar()); }

double cdf_of(const PotentialShiftedDist& d, double p) {
    if (p > d.u_bar()) return 1.0;
    return cont_cdf(d, p);
}

double cdf_right_of(const PotentialShiftedDist& d, double p) {
    if (p >= d.u_bar()) return 1.0;
    return cont_cdf(d, p);
}

double pdf_of(const PotentialShiftedDist& d, double p) {
    if (p <= 0.0 || p > d.u_bar()) return 0.0;
    return std::max(cont_pdf(d, p), 0.0);
}

double value_at_quantile(const PotentialShiftedDist& d, double t) {
    const double ub = d.u_bar();
    if (1.0 - cont_cdf(d, ub) >= t) return ub;
    // Largest p with F(p) <= 1 - t; F is continuous and increasing below u_bar.
    double lo = base_infimum(d.base);
    double hi = ub;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cont_cdf(d, mid) <= 1.0 - t) lo = mid;
        else hi = mid;
    }
    return lo;
}

double revenue_of(const PotentialShiftedDist& d, double q) {
    if (q <= 0.0) return 0.0;
    return q * value_at_quantile(d, q);
}

MonopolyStats monopoly_of(const PotentialShiftedDist& d) {
    const double v = shifted_v(d);
    return {v, 1.0 - cont_cdf(d, v), d.u_bar(), 0.0};
}

double infimum_of(const PotentialShiftedDist& d) { return base_infimum(d.base); }
double supremum_of(const PotentialShiftedDist& d) { return d.u_bar(); }

bool shifted_mass(const PotentialShiftedDist& d) { return 1.0 - cont_cdf(d, d.u_bar()) > kMassTol; }

double phi_of(const PotentialShiftedDist& d, double p) {
    const double ub = d.u_bar();
    if (p > ub) return p;
    if (p == ub && shifted_mass(d)) return ub;
    if (p < base_infimum(d.base)) below_support("virtual_value");
    return cont_phi(d, p);
}

double phi_above_of(const PotentialShiftedDist& d, double p) {
    if (p >= d.u_bar()) return p;
    return phi_of(d, std::min(p * (1.0 + 1e-12), std::nextafter(d.u_bar(), 0.0)));
}

// sup{x in [v, u_bar) : Phi(x) <= p} for p below u_bar, by bisection.
double shifted_upper_crossing(const PotentialShiftedDist& d, double p) {
    const double ub = d.u_bar();
    double lo = shifted_v(d);
    double hi = ub;
    if (lo >= hi) return lo;
    if (cont_phi(d, ub) <= p) return ub;
    while (hi - lo > 1e-10 * std::max(1.0, ub)) {
        const double mid = 0.5 * (lo + hi);
        if (cont_phi(d, mid) <= p) lo = mid;
        else hi = mid;
    }
    return lo;
}

double vcdf_of(const PotentialShiftedDist& d, double p) {
    if (p >= d.u_bar()) return 1.0;
    return cont_cdf(d, shifted_upper_crossing(d, p));
}

double phi_inv_of(const PotentialShiftedDist& d, double p) {
    if (p >= d.u_bar()) return p;
    return shifted_upper_crossing(d, p);
}

double phi_inv_lower_of(const PotentialShiftedDist& d, double p) {
    const double ub = d.u_bar();
    if (p > ub) return p;
    double lo = shifted_v(d);
    if (p <= cont_phi(d, 0.5 * lo)) return base_infimum(d.base);
    double hi = ub;
    if (lo >= hi || cont_phi(d, ub) < p) return ub;
    while (hi - lo > 1e-10 * std::max(1.0, ub)) {
        const double mid = 0.5 * (lo + hi);
        if (cont_phi(d, mid) >= p) hi = mid;
        else lo = mid;
    }
    return hi;
}

double potential_of(const PotentialShiftedDist& d, double p) {
    if (p > d.u_bar()) return 0.0;
    return std::max(base_potential(d.base, p) - d.total_delta(), 0.0);
}

double peak_of(const PotentialShiftedDist& d) { return potential_of(d, shifted_v(d)); }

// ---------------------------------------------------------------------------

template <class F>
auto visit_dist(const Distribution& d, F&& f) {
    return std::visit([&](const auto& x) { return f(x); }, d);
}

Distribution vanished_at(double v) { return TriangularDist{v, 0.0}; }

}  // namespace

// ---------------------------------------------------------------------------

PiecewiseRQDist::PiecewiseRQDist(std::vector<Knot> knots) {
    if (knots.size() < 2) throw std::invalid_argument("piecewise_rq: need at least two knots");
    if (knots.front().first != 0.0 || knots.back().first != 1.0)
        throw std::invalid_argument("piecewise_rq: knots must start at q = 0 and end at q = 1");
    for (std::size_t j = 0; j < knots.size(); ++j) {
        const auto [q, r] = knots[j];
        if (!std::isfinite(q) || !std::isfinite(r) || r < 0.0)
            throw std::invalid_argument("piecewise_rq: revenues must be finite and non-negative");
        if (j > 0 && !(q > knots[j - 1].first))
            throw std::invalid_argument("piecewise_rq: quantiles must be strictly increasing");
    }
    // Drop interior knots that do not change the slope.
    std::vector<Knot> kept{knots.front()};
    std::vector<double> slopes;
    for (std::size_t j = 1; j < knots.size(); ++j) {
        const double s = (knots[j].second - kept.back().second) / (knots[j].first - kept.back().first);
        if (!slopes.empty() && std::abs(s - slopes.back()) <= 1e-12 * std::max(1.0, std::abs(s))) {
            kept.back() = knots[j];
            slopes.back() = (kept.back().second - kept[kept.size() - 2].second) /
                            (kept.back().first - kept[kept.size() - 2].first);
            continue;
        }
        if (!slopes.empty() && s > slopes.back() + 1e-9 * std::max(1.0, std::abs(slopes.back())))
            throw std::invalid_argument("piecewise_rq: revenue curve must be concave");
        kept.push_back(knots[j]);
        slopes.push_back(s);
    }
    knots_ = std::move(kept);
    slopes_ = std::move(slopes);
    intercepts_.resize(slopes_.size());
    for (std::size_t j = 0; j < slopes_.size(); ++j) {
        intercepts_[j] = std::max(knots_[j].second - slopes_[j] * knots_[j].first, 0.0);
    }
}

double PotentialShiftedDist::total_delta() const {
    double s = 0.0;
    for (const auto& sh : shifts) s += sh.delta;
    return s;
}

Distribution triangular(double v, double q) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("triangular: v must be positive and finite");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("triangular: q must lie in [0, 1]");
    return TriangularDist{v, q};
}

Distribution tri_infinity(double r0) {
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw std::invalid_argument("tri_infinity: r0 must be positive and finite");
    return TriInfinityDist{r0};
}

Distribution piecewise_rq(std::vector<PiecewiseRQDist::Knot> knots) { return PiecewiseRQDist(std::move(knots)); }

double cdf(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return cdf_of(x, p); });
}
double cdf_right(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return cdf_right_of(x, p); });
}
double survival(const Distribution& d, double p) {
    if (p <= 0.0) return 1.0;
    return std::visit(overloaded{
                          [p](const TriangularDist& x) {
                              if (tri_vanished(x) || p > x.v) return 0.0;
                              if (tri_point(x)) return 1.0;
                              const double c = tri_c(x);
                              return c / (p + c);
                          },
                          [p](const TriInfinityDist& x) { return x.r0 / (p + x.r0); },
                          [p](const PiecewiseRQDist& x) { return pw_tail_quantile(x, p); },
                          [p](const PotentialShiftedDist& x) { return 1.0 - cdf_of(x, p); },
                      },
                      d);
}

double pdf(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return pdf_of(x, p); });
}

double quantile(const Distribution& d, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in [0, 1)");
    if (u == 0.0) return support_infimum(d);
    return visit_dist(d, [u](const auto& x) { return value_at_quantile(x, 1.0 - u); });
}

double revenue_quantile(const Distribution& d, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("revenue_quantile: q must lie in [0, 1]");
    return visit_dist(d, [q](const auto& x) { return revenue_of(x, q); });
}

MonopolyStats monopoly_stats(const Distribution& d) {
    return visit_dist(d, [](const auto& x) { return monopoly_of(x); });
}

double support_infimum(const Distribution& d) {
    return visit_dist(d, [](const auto& x) { return infimum_of(x); });
}
double support_supremum(const Distribution& d) {
    return visit_dist(d, [](const auto& x) { return supremum_of(x); });
}

bool is_vanished(const Distribution& d) {
    return std::visit(overloaded{
                          [](const TriangularDist& x) { return tri_vanished(x); },
                          [](const TriInfinityDist&) { return false; },
                          [](const PiecewiseRQDist& x) { return pw_vanished(x); },
                          [](const PotentialShiftedDist&) { return false; },
                      },
                      d);
}

bool has_mass_at(const Distribution& d, double x) { return cdf_right(d, x) - cdf(d, x) > kMassTol; }

double virtual_value(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return phi_of(x, p); });
}
double virtual_value_above(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return phi_above_of(x, p); });
}
double virtual_value_cdf(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return vcdf_of(x, p); });
}
double inverse_virtual_value(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return phi_inv_of(x, p); });
}
double lower_inverse_virtual_value(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return phi_inv_lower_of(x, p); });
}
double potential(const Distribution& d, double p) {
    return visit_dist(d, [p](const auto& x) { return potential_of(x, p); });
}
double peak_potential(const Distribution& d) {
    return visit_dist(d, [](const auto& x) { return peak_of(x); });
}

std::vector<double> virtual_value_breakpoints(const Distribution& d) {
    return std::visit(
        overloaded{
            [](const TriangularDist& x) {
                return tri_vanished(x) ? std::vector<double>{} : std::vector<double>{x.v};
            },
            [](const TriInfinityDist&) { return std::vector<double>{}; },
            [](const PiecewiseRQDist& x) {
                std::vector<double> out;
                for (double s : x.slopes())
                    if (s > 0.0) out.push_back(s);
                return out;
            },
            [](const PotentialShiftedDist& x) {
                const double v = shifted_v(x);
                const double ub = x.u_bar();
                std::vector<double> out{ub};
                if (v < ub) {
                    out.push_back(cont_phi(x, std::min(v * (1.0 + 1e-12), std::nextafter(ub, 0.0))));
                    out.push_back(cont_phi(x, ub));
                    if (const auto* pw = std::get_if<PiecewiseRQDist>(&x.base)) {
                        for (std::size_t j = 1; j + 1 < pw->knots().size(); ++j) {
                            const double val = value_at_quantile(*pw, pw_q(*pw, j));
                            if (val > v && val < ub) {
                                out.push_back(cont_phi(x, val));
                                out.push_back(cont_phi(x, std::min(val * (1.0 + 1e-12), ub)));
                            }
                        }
                    }
                }
                std::erase_if(out, [](double b) { return !(b > 0.0) || !std::isfinite(b); });
                return out;
            },
        },
        d);
}

bool has_step_virtual_value_cdf(const Distribution& d) {
    if (const auto* s = std::get_if<PotentialShiftedDist>(&d)) return shifted_v(*s) >= s->u_bar();
    return true;
}

bool satisfies_c1(const Distribution& d) {
    if (is_vanished(d)) return true;
    if (std::holds_alternative<TriInfinityDist>(d)) return false;
    const auto ms = monopoly_stats(d);
    if (!(ms.v > 1.0) || std::isinf(ms.v)) return false;
    return virtual_value_above(d, ms.v) >= 1.0 - 1e-12;
}

Distribution shift_potential(const Distribution& d, double delta, double u_bar) {
    if (!(delta >= 0.0)) throw std::invalid_argument("shift_potential: delta must be non-negative");
    if (delta == 0.0) return d;
    const double sup = support_supremum(d);
    if (!(u_bar > 0.0) || u_bar > sup * (1.0 + 1e-12))
        throw std::invalid_argument("shift_potential: u_bar must not exceed the support supremum");
    u_bar = std::min(u_bar, sup);
    const double psi_u = potential(d, u_bar);
    if (delta > psi_u + 1e-12 * std::max(1.0, psi_u))
        throw std::invalid_argument("shift_potential: delta exceeds the potential at u_bar");
    delta = std::min(delta, psi_u);

    // Constant potential on (0, u_bar]: the result is triangular with p(1-F)/F = a.
    auto constant_case = [&](double psi) -> Distribution {
        const double a = std::expm1(psi - delta);
        if (a <= kVanishTol * std::max(1.0, u_bar)) return vanished_at(u_bar);
        return TriangularDist{u_bar, a / (u_bar + a)};
    };

    return std::visit(
        overloaded{
            [&](const TriangularDist& x) -> Distribution {
                if (tri_vanished(x) || tri_point(x)) return x;
                return constant_case(std::log1p(tri_c(x)));
            },
            [&](const TriInfinityDist& x) -> Distribution { return constant_case(std::log1p(x.r0)); },
            [&](const PiecewiseRQDist& x) -> Distribution {
                if (pw_vanished(x)) return x;
                PotentialShiftedDist s{x, {{u_bar, delta}}};
                if (peak_of(s) <= kVanishTol) return vanished_at(u_bar);
                return s;
            },
            [&](const PotentialShiftedDist& x) -> Distribution {
                PotentialShiftedDist s = x;
                if (u_bar >= s.u_bar()) s.shifts.back().delta += delta;
                else s.shifts.push_back({u_bar, delta});
                if (peak_of(s) <= kVanishTol) return vanished_at(u_bar);
                return s;
            },
        },
        d);
}

Distribution compress(const Distribution& d, double eps, double u_star) {
    if (!(eps > 0.0)) throw std::invalid_argument("compress: eps must be positive");
    if (!(u_star > 1.0)) throw std::invalid_argument("compress: u_star must exceed 1");
    const double scale = 1.0 + eps;
    return std::visit(
        overloaded{
            [&](const TriangularDist& x) -> Distribution {
                if (tri_vanished(x)) return x;
                const double v = x.v / scale;
                // All virtual value sits at v; at or below 1 after scaling it becomes non-positive.
                if (v <= 1.0) return vanished_at(std::min(v, u_star));
                return TriangularDist{std::min(v, u_star), x.q};
            },
            [&](const TriInfinityDist&) -> Distribution { return vanished_at(u_star); },
            [&](const PiecewiseRQDist& x) -> Distribution {
                // Rebuild r from the scaled, clipped slopes; segments whose slope
                // falls to 1 or below carry no positive virtual value any more.
                std::vector<PiecewiseRQDist::Knot> out{{0.0, 0.0}};
                double q = 0.0;
                double r = 0.0;
                for (std::size_t j = 0; j < x.slopes().size(); ++j) {
                    const double s = x.slopes()[j] / scale;
                    if (!(s > 1.0)) break;
                    const double len = pw_q(x, j + 1) - pw_q(x, j);
                    q = pw_q(x, j + 1);
                    r += std::min(s, u_star) * len;
                    out.emplace_back(q, r);
                }
                if (q <= 0.0) return vanished_at(u_star);
                if (q < 1.0) out.emplace_back(1.0, 0.0);
                return PiecewiseRQDist(std::move(out));
            },
            [&](const PotentialShiftedDist&) -> Distribution {
                throw std::invalid_argument("compress: shifted distributions are not supported");
            },
        },
        d);
}

}  // namespace anonprice
