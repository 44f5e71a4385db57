#include "anonprice/instances.hpp"

#include "anonprice/errors.hpp"
#include "anonprice/special_functions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace anonprice {

Integral cstar(const QuadratureConfig& cfg, const std::function<double(double)>& q_override) {
    cfg.validate();
    Integral out{2.0, 0.0};
    if (!q_override) {
        out += q_gap_tail(1.0, cfg);
        return out;
    }
    auto f = [&](double x) { return x <= 1.0 ? 1.0 : -std::expm1(-q_override(x)); };
    out += integrate(f, 1.0, 2.0, cfg);
    out += integrate_tail(f, 2.0, cfg);
    return out;
}

Instance lower_bound_instance(double eps, std::size_t n) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("lower_bound_instance: eps must lie in (0, 1)");
    if (n == 0) throw std::invalid_argument("lower_bound_instance: n must be positive");
    const double b = 8.0 / eps;
    const double a = Q_inverse(std::log(8.0 / eps));
    const double step = (b - a) / static_cast<double>(n);

    Instance inst;
    inst.dists.reserve(n + 2);
    inst.dists.push_back(tri_infinity(1.0));
    double r_prev = 0.0;
    for (std::size_t i = 1; i <= n + 1; ++i) {
        const double v = i == n + 1 ? a : b - static_cast<double>(i - 1) * step;
        const double r = R(v);
        const double d = r - r_prev;
        inst.dists.push_back(triangular(v, d / (v + d)));
        r_prev = r;
    }
    return inst;
}

std::size_t default_lower_bound_size(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("default_lower_bound_size: eps must lie in (0, 1)");
    return static_cast<std::size_t>(std::ceil(80.0 / (eps * eps)));
}

Instance checked_lower_bound_instance(double eps, std::size_t n, double ap_tol) {
    Instance inst = lower_bound_instance(eps, n);
    const auto rep = feasibility_check(inst, default_feasibility_grid(inst), Constraint::AP, ap_tol);
    if (!rep.feasible) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "lower_bound_instance(" << eps << ", " << n << "): AP reaches " << rep.worst_ap << " at p = "
            << rep.worst_ap_price << "; increase n";
        throw feasibility_error(msg.str());
    }
    return inst;
}

Instance cont_discretize(double gamma, std::size_t n) {
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw std::invalid_argument("cont_discretize: gamma must be >= 1");
    if (n == 0 || n > kMaxDiscretization)
        throw std::invalid_argument("cont_discretize: n must lie in [1, " + std::to_string(kMaxDiscretization) + "]");
    const std::size_t count = n * n;
    const double nn = static_cast<double>(n);
    Instance inst;
    inst.dists.reserve(count);
    double r_prev = 0.0;
    for (std::size_t i = 1; i <= count; ++i) {
        const double v = gamma + nn - static_cast<double>(i - 1) / nn;
        const double r = R(v);
        const double e = std::expm1(r - r_prev);
        inst.dists.push_back(triangular(v, e / (v + e)));
        r_prev = r;
    }
    return inst;
}

Integral opt_cont(double gamma, const QuadratureConfig& cfg) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("opt_cont: gamma must be >= 1");
    cfg.validate();
    Integral out{2.0, 0.0};
    if (gamma > 1.0 && std::isfinite(gamma)) out.value += (gamma - 1.0) * -std::expm1(-Q(gamma));
    out += q_gap_tail(gamma, cfg);
    return out;
}

}  // namespace anonprice
