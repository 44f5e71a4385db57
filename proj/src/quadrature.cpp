#include "anonprice/quadrature.hpp"

#include "anonprice/special_functions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace anonprice {

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("quadrature: abs_tol must be positive");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("quadrature: rel_tol must be positive");
    if (!(tail_cutoff > 1.0)) throw std::invalid_argument("quadrature: tail_cutoff must exceed 1");
    if (max_subdivisions < 1) throw std::invalid_argument("quadrature: max_subdivisions must be >= 1");
}

Integral integrate(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg) {
    if (!(b > a)) return {};
    // Boost compares an unscaled error estimate against a scaled tolerance, so
    // short intervals never converge; integrate over [0, 1] instead.
    const double w = b - a;
    auto g = [&](double t) { return f(a + w * t) * w; };
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        g, 0.0, 1.0, cfg.max_subdivisions, cfg.rel_tol, &err, &l1);
    return {v, err};
}

Integral integrate_tail(const std::function<double(double)>& f, double a, const QuadratureConfig& cfg) {
    if (!(a > 0.0)) throw std::invalid_argument("integrate_tail: lower limit must be positive");
    auto g = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double x = a / t;
        return f(x) * a / (t * t);
    };
    return integrate(g, 0.0, 1.0, cfg);
}

namespace {

double q_gap(double x) { return -std::expm1(-Q(x)); }

}  // namespace

Integral q_gap_tail(double a, const QuadratureConfig& cfg) {
    if (!(a >= 1.0)) throw std::domain_error("q_gap_tail: lower limit must be >= 1");
    if (std::isinf(a)) return {};
    if (a >= 2.0) return integrate_tail(q_gap, a, cfg);
    Integral out = integrate(q_gap, a, 2.0, cfg);
    out += integrate_tail(q_gap, 2.0, cfg);
    return out;
}

}  // namespace anonprice
