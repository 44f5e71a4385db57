#include "anonprice/errors.hpp"
#include "anonprice/instances.hpp"
#include "anonprice/special_functions.hpp"

#include <doctest.h>

#include <cmath>

using namespace anonprice;

TEST_SUITE("instances") {

TEST_CASE("C* value") {
    const auto c = cstar();
    // mpmath quad of 2 + int_1^inf (1 - exp(-Q)) at 30 digits: 2.62016153847217...
    CHECK(std::abs(c.value - 2.62016153847217) < 1e-10);
    CHECK(std::abs(c.value - 2.6202) < 2e-3);
    CHECK(c.abs_err <= 1e-6);
    CHECK(cstar({}, [](double) { return 0.0; }).value == 2.0);
}

TEST_CASE("lower-bound instance layout") {
    for (double eps : {0.5, 0.2}) {
        const std::size_t n = 40;
        const auto inst = lower_bound_instance(eps, n);
        REQUIRE(inst.dists.size() == n + 2);
        CHECK(std::holds_alternative<TriInfinityDist>(inst.dists[0]));
        const auto& first = std::get<TriangularDist>(inst.dists[1]);
        const auto& last = std::get<TriangularDist>(inst.dists.back());
        CHECK(first.v == doctest::Approx(8.0 / eps).epsilon(1e-15));
        CHECK(last.v == doctest::Approx(Q_inverse(std::log(8.0 / eps))).epsilon(1e-12));
        // v q / (1 - q) telescopes linearly onto R(v_i)
        double acc = 0.0;
        for (std::size_t i = 1; i < inst.dists.size(); ++i) {
            const auto& t = std::get<TriangularDist>(inst.dists[i]);
            CHECK(t.q > 0.0);
            CHECK(t.q < 1.0);
            acc += t.v * t.q / (1.0 - t.q);
            CHECK(acc == doctest::Approx(R(t.v)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(lower_bound_instance(1.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(lower_bound_instance(0.5, 0), std::invalid_argument);
    CHECK(default_lower_bound_size(0.1) == 8000);
    CHECK(default_lower_bound_size(0.5) == 320);
}

TEST_CASE("lower-bound sandwich at desk scale") {
    const double c = cstar().value;
    for (double eps : {0.5, 0.2}) {
        const auto inst = checked_lower_bound_instance(eps, default_lower_bound_size(eps));
        const double opt = myerson_revenue_triangular(inst);
        CHECK(opt >= 1.0);
        CHECK(opt <= c);
        CHECK(opt >= c - eps);
        CHECK(ap_optimal(inst).revenue <= 1.0 + 1e-6);
    }
}

TEST_CASE("lower-bound instance with eps = 0.1 and n = 4000") {
    const auto inst = lower_bound_instance(0.1, 4000);
    // triangular OPT summation, frozen from an independent double-precision Python evaluation
    CHECK(myerson_revenue_triangular(inst) == doctest::Approx(2.57298594377704).epsilon(1e-11));
    CHECK(std::abs(myerson_revenue(inst, {}).value - myerson_revenue_triangular(inst)) < 1e-6);
}

TEST_CASE("cont_discretize layout") {
    const auto one = cont_discretize(1.0, 1);
    REQUIRE(one.dists.size() == 1);
    const auto& t = std::get<TriangularDist>(one.dists[0]);
    const double e = std::expm1(R(2.0));
    CHECK(t.v == 2.0);
    CHECK(t.q == doctest::Approx(e / (2.0 + e)).epsilon(1e-14));

    const auto inst = cont_discretize(1.5, 4);
    REQUIRE(inst.dists.size() == 16);
    CHECK(std::get<TriangularDist>(inst.dists.front()).v == doctest::Approx(5.5));
    CHECK(std::get<TriangularDist>(inst.dists.back()).v == doctest::Approx(1.75));
    CHECK_THROWS_AS(cont_discretize(1.0, kMaxDiscretization + 1), std::invalid_argument);
    CHECK_THROWS_AS(cont_discretize(0.5, 4), std::invalid_argument);
}

TEST_CASE("cont_discretize makes C2 tight at every knot") {
    for (double gamma : {1.0, 2.5, 5.0}) {
        for (std::size_t n : {1u, 8u, 64u}) {
            const auto inst = cont_discretize(gamma, n);
            double worst = 0.0;
            for (const auto& d : inst.dists) {
                const double v = std::get<TriangularDist>(d).v;
                worst = std::max(worst, std::abs(constraint_slack(inst, v)));
            }
            CHECK(worst <= 1e-9);
        }
    }
}

TEST_CASE("discretization converges to opt_cont") {
    const double expect[] = {2.52203820325, 2.57197207968, 2.59639820599, 2.60836311478, 2.61428144457};
    const std::size_t ns[] = {4, 8, 16, 32, 64};
    for (int i = 0; i < 5; ++i) {
        const auto inst = cont_discretize(1.0, ns[i]);
        CHECK(p1_objective(inst.dists, std::nullopt, {}).value == doctest::Approx(expect[i]).epsilon(1e-10));
    }
    for (double gamma : {1.0, 2.0}) {
        const double target = opt_cont(gamma).value;
        double prev_gap = 1e9;
        for (std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
            const double gap = std::abs(p1_objective(cont_discretize(gamma, n).dists, std::nullopt, {}).value - target);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
    }
}

TEST_CASE("opt_cont values") {
    const double gammas[] = {1.0, 1.5, 2.0, 4.0, 10.0};
    const double expect[] = {2.62016153848, 2.50357692099, 2.40378259400, 2.22308788341, 2.09530956120};
    double prev = 1e9;
    for (int i = 0; i < 5; ++i) {
        const double v = opt_cont(gammas[i]).value;
        CHECK(v == doctest::Approx(expect[i]).epsilon(1e-10));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(opt_cont(1.0).value == doctest::Approx(cstar().value).epsilon(1e-13));
    CHECK(std::abs(opt_cont(1e4).value - 2.0) < 1e-3);
    CHECK(opt_cont(2.0).value == doctest::Approx(myerson_revenue({{}, 2.0}, {}).value).epsilon(1e-12));
}

}  // TEST_SUITE
