#include "anonprice/special_functions.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace anonprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

double dilog_series(double z) {
    double sum = 0.0;
    double zk = z;
    for (int k = 1; k < 400; ++k) {
        const double term = zk / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
        zk *= z;
    }
    return sum;
}

// Li2(z) given both z and 1 - z, so callers can pass an accurate complement.
double dilog_pair(double z, double one_minus_z) {
    if (z <= 0.5) return dilog_series(z);
    if (one_minus_z <= 0.0) return kPi2Over6;
    return kPi2Over6 - std::log(z) * std::log(one_minus_z) - dilog_series(one_minus_z);
}

void require_above_one(double p, const char* fn) {
    if (!(p > 1.0)) throw std::domain_error(std::string(fn) + ": argument must exceed 1");
}

// L(p) = ln(p^2 / (p^2 - 1)), accurate near p = 1 and for large p.
double log_ratio(double p) {
    if (p < 2.0) return 2.0 * std::log(p) - std::log((p - 1.0) * (p + 1.0));
    return -std::log1p(-1.0 / (p * p));
}

bool at_pole(double p) { return p <= 1.0 + kSingularGap; }

}  // namespace

double dilog(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("dilog: argument outside [0, 1]");
    return dilog_pair(z, 1.0 - z);
}

double R(double p) {
    require_above_one(p, "R");
    if (std::isinf(p)) return 0.0;
    if (at_pole(p)) return kInf;
    if (p < 2.0) return p * log_ratio(p);
    // p * sum_k p^{-2k} / k, all terms positive.
    const double z = 1.0 / (p * p);
    double sum = 0.0;
    double zk = z;
    for (int k = 1; k < 100; ++k) {
        const double term = zk / k;
        sum += term;
        if (term < 1e-18 * sum) break;
        zk *= z;
    }
    return p * sum;
}

double Q(double p) {
    require_above_one(p, "Q");
    if (std::isinf(p)) return 0.0;
    if (at_pole(p)) return kInf;
    const double z = 1.0 / (p * p);
    const double one_minus_z = (p - 1.0) * (p + 1.0) * z;
    return log_ratio(p) - 0.5 * dilog_pair(z, one_minus_z);
}

double R_prime(double p) {
    require_above_one(p, "R_prime");
    if (std::isinf(p)) return 0.0;
    if (at_pole(p)) return -kInf;
    if (p < 2.0) return log_ratio(p) - 2.0 / ((p - 1.0) * (p + 1.0));
    // -R'(p) = sum_k (2 - 1/k) p^{-2k}
    const double z = 1.0 / (p * p);
    double sum = 0.0;
    double zk = z;
    for (int k = 1; k < 100; ++k) {
        const double term = (2.0 - 1.0 / k) * zk;
        sum += term;
        if (term < 1e-18 * sum) break;
        zk *= z;
    }
    return -sum;
}

double Q_prime(double p) {
    require_above_one(p, "Q_prime");
    if (std::isinf(p)) return 0.0;
    if (at_pole(p)) return -kInf;
    // Chain rule on both terms of Q: L'(p) + L(p)/p.
    const double pm = (p - 1.0) * (p + 1.0);
    return -2.0 / (p * pm) + log_ratio(p) / p;
}

namespace {

template <class F, class DF>
double invert_decreasing(double y, F f, DF df, const char* fn) {
    if (!(y > 0.0) || std::isnan(y)) throw std::domain_error(std::string(fn) + ": argument must be positive");
    if (std::isinf(y)) return 1.0 + kSingularGap;
    // Bisect on t = ln(p - 1), which keeps resolution near the pole.
    double t_lo = std::log(kSingularGap);
    double t_hi = std::log(1e12);
    while (f(1.0 + std::exp(t_hi)) > y) t_hi += std::log(1e3);
    const double lowest_finite = f(1.0 + 2.0 * kSingularGap);
    if (y >= lowest_finite) return 1.0 + kSingularGap;
    auto g = [&](double t) { return f(1.0 + std::exp(t)) - y; };
    auto [a, b] = boost::math::tools::bisect(g, t_lo, t_hi, boost::math::tools::eps_tolerance<double>(40));
    const double lo = 1.0 + std::exp(std::min(a, b));
    const double hi = 1.0 + std::exp(std::max(a, b));
    if (!(hi > lo)) return lo;
    const double guess = 0.5 * (lo + hi);
    auto fd = [&](double p) { return std::make_pair(f(p) - y, df(p)); };
    return boost::math::tools::newton_raphson_iterate(fd, guess, lo, hi, std::numeric_limits<double>::digits - 2);
}

}  // namespace

double R_inverse(double y) {
    return invert_decreasing(y, [](double p) { return R(p); }, [](double p) { return R_prime(p); }, "R_inverse");
}

double Q_inverse(double y) {
    return invert_decreasing(y, [](double p) { return Q(p); }, [](double p) { return Q_prime(p); }, "Q_inverse");
}

double H_aux(double s, double p) {
    return std::log1p(-1.0 / p) + std::log1p(s / p) +
           (p - (1.0 + s)) * (1.0 / (p - 1.0) + 1.0 / (p + s) - 2.0 / p);
}

LemmaReport check_lemma_rq(const std::vector<double>& grid) {
    LemmaReport rep;
    auto flag = [&rep](const char* name, double p, double lhs, double rhs) {
        rep.violations.push_back({name, p, 0.0, lhs, rhs});
    };
    constexpr double rel = 1e-14;
    for (double p : grid) {
        require_above_one(p, "check_lemma_rq");
        ++rep.points;
        const double rp = R_prime(p);
        const double qp = Q_prime(p);
        if (std::abs(rp - p * qp) > 1e-9 * std::max(1.0, std::abs(rp))) flag("R'=pQ'", p, rp, p * qp);
        if (!(rp < qp)) flag("R'<Q'", p, rp, qp);
        if (!(qp < 0.0)) flag("Q'<0", p, qp, 0.0);
        const double h = 1e-3 * (p - 1.0);
        const double r2 = (R_prime(p + h) - R_prime(p - h)) / (2.0 * h);
        if (!(r2 > 0.0)) flag("R''>0", p, r2, 0.0);
        const double r = R(p);
        if (r < (1.0 / p) * (1.0 - rel)) flag("R>=1/p", p, r, 1.0 / p);
        if (r > (1.0 / (p - 1.0)) * (1.0 + rel)) flag("R<=1/(p-1)", p, r, 1.0 / (p - 1.0));
        const double ar = std::abs(rp);
        if (ar < (1.0 / (p * p)) * (1.0 - rel)) flag("|R'|>=1/p^2", p, ar, 1.0 / (p * p));
        if (ar > (1.0 / (p * (p - 1.0))) * (1.0 + rel)) flag("|R'|<=1/(p^2-p)", p, ar, 1.0 / (p * (p - 1.0)));
    }
    return rep;
}

LemmaReport check_inequality_suite(const std::vector<std::pair<double, double>>& grid_xy,
                                   const std::vector<std::pair<double, double>>& grid_sp) {
    constexpr double tol = 1e-10;
    LemmaReport rep;
    auto flag = [&rep](const char* name, double a, double b, double lhs, double rhs) {
        rep.violations.push_back({name, a, b, lhs, rhs});
    };
    for (auto [x, y] : grid_xy) {
        if (!(x > 1.0 && y >= x)) throw std::domain_error("check_inequality_suite: need y >= x > 1");
        ++rep.points;
        const double dr = R(x) - R(y);
        const double e = std::exp(dr);
        const double a = -std::expm1(-dr);

        const double rhs1 = (1.0 - x / y) * (x + e - 1.0) / ((x - 1.0) * (x - 1.0));
        if (a > rhs1 + tol) flag("ineq1", x, y, a, rhs1);

        const double b = -std::expm1(-(Q(x) - Q(y)));
        if (a / y > b + tol) flag("ineq2-lower", x, y, a / y, b);
        if (b > a / x + tol) flag("ineq2-upper", x, y, b, a / x);

        const double w = e / (x + e - 1.0);
        if (w < 1.0 / y - tol) flag("ineq3", x, y, w, 1.0 / y);
        if (1.0 - 1.0 / y < (x - 1.0) * w - tol) flag("ineq4", x, y, 1.0 - 1.0 / y, (x - 1.0) * w);
    }
    const double s_max = 1.0 / std::sqrt(3.0);
    for (auto [s, p] : grid_sp) {
        if (!(s >= 0.0 && s <= s_max && p > 1.0)) throw std::domain_error("check_inequality_suite: (s, p) outside domain");
        ++rep.points;
        const double h = H_aux(s, p);
        if (h >= tol) flag("H<0", s, p, h, 0.0);
    }
    return rep;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g;
    if (n == 0) return g;
    if (n == 1) return {lo};
    g.reserve(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        g.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1)));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> dense_rq_grid() { return log_grid(1.0 + 1e-6, 1e6, 1000); }

std::vector<std::pair<double, double>> dense_xy_grid() {
    const auto xs = log_grid(1.0 + 1e-3, 1e3, 200);
    std::vector<std::pair<double, double>> g;
    g.reserve(xs.size() * (xs.size() + 1) / 2);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i; j < xs.size(); ++j) g.emplace_back(xs[i], xs[j]);
    return g;
}

std::vector<std::pair<double, double>> dense_sp_grid() {
    // p - 1 log-spaced over [1e-4, 99] so that p covers (1, 100].
    const auto pm = log_grid(1e-4, 99.0, 200);
    std::vector<std::pair<double, double>> g;
    g.reserve(200 * 200);
    for (int i = 0; i < 200; ++i) {
        const double s = 0.577 * i / 199.0;
        for (double d : pm) g.emplace_back(s, 1.0 + d);
    }
    return g;
}

}  // namespace anonprice
