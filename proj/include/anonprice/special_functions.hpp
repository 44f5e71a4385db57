#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace anonprice {

// Points in (1, 1 + kSingularGap] are treated as the pole of R and Q.
inline constexpr double kSingularGap = 1e-12;

// Dilogarithm Li2(z) on [0, 1].
double dilog(double z);

// R(p) = p ln(p^2 / (p^2 - 1)) and Q(p) = ln(p^2 / (p^2 - 1)) - Li2(1/p^2) / 2.
// Both accept p = +inf (value 0) and throw std::domain_error for p <= 1.
double R(double p);
double Q(double p);
double R_prime(double p);
double Q_prime(double p);

// Unique p > 1 with R(p) = y (resp. Q(p) = y). Values of y above R(1 + kSingularGap)
// cannot be represented and clamp to 1 + kSingularGap.
double R_inverse(double y);
double Q_inverse(double y);

// H(s, p) = ln(1 - 1/p) + ln(1 + s/p) + (p - 1 - s)(1/(p-1) + 1/(p+s) - 2/p).
double H_aux(double s, double p);

struct LemmaViolation {
    std::string check;
    double x = 0.0;
    double y = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct LemmaReport {
    std::size_t points = 0;
    std::vector<LemmaViolation> violations;
    bool ok() const { return violations.empty(); }
};

LemmaReport check_lemma_rq(const std::vector<double>& grid);

LemmaReport check_inequality_suite(const std::vector<std::pair<double, double>>& grid_xy,
                                   const std::vector<std::pair<double, double>>& grid_sp);

// n points geometrically spaced over [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

// The dense grids used by the lemma suites.
std::vector<double> dense_rq_grid();
std::vector<std::pair<double, double>> dense_xy_grid();
std::vector<std::pair<double, double>> dense_sp_grid();

}  // namespace anonprice
