#pragma once

#include "anonprice/quadrature.hpp"
#include "anonprice/revenue.hpp"

#include <cstddef>
#include <functional>

namespace anonprice {

// C* = 2 + int_1^inf (1 - exp(-Q(x))) dx. `q_override` replaces Q in the
// integrand (test hook).
Integral cstar(const QuadratureConfig& cfg = {}, const std::function<double(double)>& q_override = {});

// {Tri(inf, 1)} followed by Tri(v_i, q_i), i = 1..n+1, with v_1 = 8/eps down to
// v_{n+1} = Q^{-1}(ln(8/eps)) in equal steps. q_i solves
// v_i q_i / (1 - q_i) = R(v_i) - R(v_{i-1}), R(v_0) = 0.
Instance lower_bound_instance(double eps, std::size_t n);

// ceil(80 / eps^2).
std::size_t default_lower_bound_size(double eps);

// lower_bound_instance followed by a runtime AP check; throws feasibility_error
// if the AP optimum exceeds 1 + ap_tol.
Instance checked_lower_bound_instance(double eps, std::size_t n, double ap_tol = 1e-6);

inline constexpr std::size_t kMaxDiscretization = 128;

// n^2 triangular distributions, v_i = gamma + n - (i-1)/n, each making the
// potential constraint tight at its own v_i.
Instance cont_discretize(double gamma, std::size_t n);

// 2 + (gamma - 1)(1 - exp(-Q(gamma))) + int_gamma^inf (1 - exp(-Q(x))) dx.
Integral opt_cont(double gamma, const QuadratureConfig& cfg = {});

}  // namespace anonprice
