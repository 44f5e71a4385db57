#include "anonprice/errors.hpp"
#include "anonprice/instances.hpp"
#include "anonprice/unit_demand.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anonprice;

namespace {

Instance random_triangular(std::mt19937_64& rng, std::size_t max_n) {
    std::uniform_real_distribution<double> v(1.0, 20.0), q(0.02, 0.9);
    Instance inst;
    const std::size_t n = 1 + rng() % max_n;
    for (std::size_t i = 0; i < n; ++i) inst.dists.push_back(triangular(v(rng), q(rng)));
    return inst;
}

Instance triangular_members(const Instance& inst) {
    Instance out;
    for (const auto& d : inst.dists)
        if (std::holds_alternative<TriangularDist>(d)) out.dists.push_back(d);
    return out;
}

}  // namespace

TEST_SUITE("unitdemand") {

TEST_CASE("uniform pricing is anonymous pricing") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const auto inst = random_triangular(rng, 6);
        for (double p : {0.3, 1.0, 2.7, 9.0}) CHECK(upm_revenue(inst, p) == ap_revenue(inst, p));
    }
    CHECK(upm_revenue({}, 2.0) == 0.0);
    CHECK(upm_revenue({{triangular(2.0, 0.5)}, std::nullopt}, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("uniform pricing Monte Carlo matches the anonymous price closed form") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 5; ++t) {
        const auto inst = random_triangular(rng, 5);
        const double p = ap_optimal(inst).price;
        const auto mc = simulate_unit_demand(inst, std::vector<double>(inst.dists.size(), p), 200'000, 100 + t);
        CHECK(std::abs(mc.mean - upm_revenue(inst, p)) <= 4.0 * mc.std_err);
    }
}

TEST_CASE("bupp_prices") {
    const Instance inst{{tri_infinity(1.0), triangular(2.0, 0.5)}, std::nullopt};
    const auto p = bupp_prices(inst, 0.1, 1e6);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == 1e6);
    CHECK(p[1] == doctest::Approx(1.8).epsilon(1e-15));
    const auto zero = bupp_prices({{triangular(3.0, 0.4), triangular(2.0, 0.5)}, std::nullopt}, 0.0);
    CHECK(zero[0] == 3.0);
    CHECK(zero[1] == 2.0);
    CHECK_THROWS_AS(bupp_prices({{piecewise_rq({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}})}, std::nullopt}, 0.1),
                    unsupported_error);
    CHECK_THROWS_AS(bupp_prices(inst, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bupp_prices(inst, 0.1, 1.5), std::invalid_argument);
}

TEST_CASE("single buyer bound and its true revenue") {
    const Instance inst{{triangular(2.0, 0.5)}, std::nullopt};
    const auto b = bupp_expected_revenue_lower(inst, 0.1);
    CHECK(b.value == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(b.truncation_error == 0.0);
    // 1.8 (1 - F(1.8)) with F(1.8) = 0.9 / 1.9
    const double exact = 1.8 / 1.9;
    const auto mc = simulate_unit_demand(inst, bupp_prices(inst, 0.1), 1'000'000, 5);
    CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.std_err);
    CHECK(b.value <= exact);
}

TEST_CASE("h = 0 reproduces the closed-form OPT") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        const auto inst = random_triangular(rng, 8);
        CHECK(bupp_expected_revenue_lower(inst, 0.0).value == doctest::Approx(myerson_revenue_triangular(inst)).epsilon(1e-13));
    }
    const auto lb = lower_bound_instance(0.5, 20);
    const auto b = bupp_expected_revenue_lower(lb, 0.0);
    CHECK(std::abs(b.value + b.truncation_error - myerson_revenue_triangular(lb)) < 1e-12);
}

TEST_CASE("truncation error closes the gap to the cap limit") {
    const auto lb = lower_bound_instance(0.5, 10);
    const double h = 0.01;
    const auto far = bupp_expected_revenue_lower(lb, h, 1e300);
    for (double cap : {50.0, 1e3, 1e6, 1e9}) {
        const auto b = bupp_expected_revenue_lower(lb, h, cap);
        CHECK(b.value + b.truncation_error == doctest::Approx(far.value).epsilon(1e-12));
        CHECK(b.truncation_error > 0.0);
    }
}

TEST_CASE("item-pricing bound against OPT") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        const auto inst = random_triangular(rng, 8);
        const double n = static_cast<double>(inst.dists.size());
        for (double h : {0.001, 0.01, 0.05}) {
            const double bound = bupp_expected_revenue_lower(inst, h).value;
            CHECK(bound >= (1.0 - (n + 1) * h) * myerson_revenue_triangular(inst) - 1e-12);
        }
    }
    for (std::size_t n : {20u, 50u}) {
        const auto lb = lower_bound_instance(0.2, n);
        const double eps_prime = 0.05;
        const double h = eps_prime / (3.0 * (n + 2));
        const auto b = bupp_expected_revenue_lower(lb, h);
        CHECK(b.value >= myerson_revenue_triangular(lb) - eps_prime);
        CHECK(b.value >= (1.0 - (n + 2) * h) * myerson_revenue_triangular(triangular_members(lb)));
    }
}

TEST_CASE("simulated item pricing respects both bounds") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> unit(0.2, 1.5);
    for (int t = 0; t < 8; ++t) {
        const auto inst = random_triangular(rng, 5);
        const double h = 0.05;
        const auto mc = simulate_unit_demand(inst, bupp_prices(inst, h), 200'000, 900 + t);
        CHECK(mc.mean >= bupp_expected_revenue_lower(inst, h).value - 4.0 * mc.std_err);

        std::vector<double> prices;
        for (const auto& d : inst.dists) prices.push_back(std::get<TriangularDist>(d).v * unit(rng));
        const auto any = simulate_unit_demand(inst, prices, 200'000, 700 + t);
        CHECK(any.mean <= myerson_revenue_triangular(inst) + 4.0 * any.std_err);
    }
}

TEST_CASE("simulate_unit_demand edge cases") {
    const Instance inst{{triangular(3.0, 0.4), triangular(2.0, 0.5)}, std::nullopt};
    CHECK_THROWS_AS(simulate_unit_demand(inst, {1.0}, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_unit_demand(inst, {1.0, 1.0}, 0, 1), std::invalid_argument);
    const auto none = simulate_unit_demand(inst, {3.5, 2.5}, 10'000, 1);
    CHECK(none.mean == 0.0);
    const auto a = simulate_unit_demand(inst, {2.0, 1.5}, 10'000, 9, 2);
    const auto b = simulate_unit_demand(inst, {2.0, 1.5}, 10'000, 9, 2);
    CHECK(a.mean == b.mean);
}

TEST_CASE("ties go to the lowest index") {
    // Point masses at 2 and 1.5 priced 1 and 0.5: both utilities equal 1.
    const Instance inst{{triangular(2.0, 1.0), triangular(1.5, 1.0)}, std::nullopt};
    CHECK(simulate_unit_demand(inst, {1.0, 0.5}, 1000, 3).mean == 1.0);
    const Instance flipped{{triangular(1.5, 1.0), triangular(2.0, 1.0)}, std::nullopt};
    CHECK(simulate_unit_demand(flipped, {0.5, 1.0}, 1000, 3).mean == 0.5);
    // zero utility still buys
    CHECK(simulate_unit_demand({{triangular(2.0, 1.0)}, std::nullopt}, {2.0}, 1000, 3).mean == 2.0);
}

}  // TEST_SUITE
