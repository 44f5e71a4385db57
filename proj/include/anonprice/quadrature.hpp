#pragma once

#include <functional>

namespace anonprice {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double tail_cutoff = 1e3;        // truncation point T for improper integrals
    unsigned max_subdivisions = 15;  // maximum bisection depth of the adaptive rule

    void validate() const;
};

struct Integral {
    double value = 0.0;
    double abs_err = 0.0;

    Integral& operator+=(const Integral& o) {
        value += o.value;
        abs_err += o.abs_err;
        return *this;
    }
};

// Adaptive Gauss-Kronrod on a finite interval.
Integral integrate(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg);

// Integral over [a, inf) for an integrand decaying at least like x^-2; uses the
// substitution x = a / t so the tail becomes a proper integral over (0, 1].
Integral integrate_tail(const std::function<double(double)>& f, double a, const QuadratureConfig& cfg);

// Integral of 1 - exp(-Q(x)) over [a, inf), a >= 1.
Integral q_gap_tail(double a, const QuadratureConfig& cfg);

}  // namespace anonprice
