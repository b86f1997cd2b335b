#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jcas/chernoff.hpp"
#include "jcas/scenario.hpp"

using namespace jcas;

TEST_CASE("thermal overlap closed form reference values", "[chernoff]") {
    REQUIRE(qs_thermal_closed(1.0, 2.0, 0.5) ==
            Catch::Approx(0.96592582628906831).epsilon(1e-13));
    REQUIRE(qs_thermal_closed(0.0, 3.0, 0.5) == Catch::Approx(0.5).epsilon(1e-14));
    REQUIRE(qs_thermal_closed(0.1, 1.0, 0.5) ==
            Catch::Approx(0.85688926830284307).epsilon(1e-13));

    // equal states and the s = 0 endpoint give overlap 1
    for (double n : {0.0, 0.3, 7.0}) {
        REQUIRE(qs_thermal_closed(n, n, 0.31) == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(qs_thermal_closed(n, 2.0, 0.0) == Catch::Approx(1.0).margin(1e-12));
    }

    REQUIRE_THROWS_AS(qs_thermal_closed(-0.1, 1.0, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(qs_thermal_closed(0.1, 1.0, 1.5), std::domain_error);
}

TEST_CASE("thermal overlap transposition symmetry", "[chernoff]") {
    for (double n1 : {0.0, 0.2, 1.0, 4.0})
        for (double n2 : {0.1, 1.0, 9.0})
            for (double s : {0.1, 0.35, 0.7}) {
                const double a = qs_thermal_closed(n1, n2, s);
                const double b = qs_thermal_closed(n2, n1, 1.0 - s);
                REQUIRE(a == Catch::Approx(b).epsilon(1e-12));
            }
}

TEST_CASE("gaussian overlap matches the thermal closed form", "[chernoff]") {
    for (double n1 : {0.0, 0.1, 1.0, 10.0})
        for (double n2 : {0.0, 0.1, 1.0, 10.0})
            for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
                const double closed = qs_thermal_closed(n1, n2, s);
                const double full = qs_gaussian(make_thermal(n1), make_thermal(n2), s);
                REQUIRE(full == Catch::Approx(closed).epsilon(1e-10));
            }
}

TEST_CASE("coherent versus vacuum overlap is flat in s", "[chernoff]") {
    const std::complex<double> alpha(0.5, -0.6);
    GaussianState coh = displace(make_thermal(0.0), 0, alpha);
    const double expect = std::exp(-std::norm(alpha));
    for (double s : {0.15, 0.5, 0.85})
        REQUIRE(qs_gaussian(coh, make_thermal(0.0), s) == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("gaussian overlap log-convexity in s", "[chernoff]") {
    GaussianQsEvaluator ev(make_thermal(0.1), make_thermal(1.0));
    GaussianQsEvaluator ranging(return_idler_state(0.99, 5.0, 0.0, 1e4),
                                return_idler_state(0.99, 5.0, 5.0, 1e4));
    for (auto* e : {&ev, &ranging}) {
        std::vector<double> lq;
        const int n = 99;
        for (int k = 1; k <= n; ++k) lq.push_back(e->log_q(k / static_cast<double>(n + 1)));
        for (int k = 1; k + 1 < n; ++k)
            REQUIRE(lq[k + 1] - 2.0 * lq[k] + lq[k - 1] >= -1e-9);
    }
}

TEST_CASE("evaluator rejects mismatched or unphysical states", "[chernoff]") {
    REQUIRE_THROWS_AS(GaussianQsEvaluator(make_thermal(0.1), make_tmsv(0.1)), std::domain_error);
    GaussianState bad = make_thermal(0.0);
    bad.cov *= 0.5;  // symplectic eigenvalue 1/2
    REQUIRE_THROWS_AS(GaussianQsEvaluator(bad, make_thermal(0.0)), std::domain_error);
}

TEST_CASE("optimized exponent for a thermal pair", "[chernoff]") {
    ChernoffResult r =
        optimize_exponent([](double s) { return qs_thermal_closed(0.1, 1.0, s); });
    REQUIRE(r.exponent == Catch::Approx(0.16271750170141441).margin(1e-9));
    REQUIRE(r.s_star == Catch::Approx(0.38441012000795094).margin(1e-4));
    REQUIRE(r.q_value == Catch::Approx(std::exp(-r.exponent)).epsilon(1e-12));

    // dense grid scan can do no better than the golden-section result
    double grid_best = 0.0;
    for (int k = 1; k < 10000; ++k)
        grid_best = std::max(grid_best, -std::log(qs_thermal_closed(0.1, 1.0, k / 10000.0)));
    REQUIRE(r.exponent >= grid_best - 1e-8);
}

TEST_CASE("optimizer edge cases", "[chernoff]") {
    ChernoffResult flat = optimize_exponent([](double) { return 0.3; });
    REQUIRE(flat.exponent == Catch::Approx(-std::log(0.3)).epsilon(1e-12));
    REQUIRE_THROWS_AS(optimize_exponent([](double) { return std::nan(""); }),
                      std::runtime_error);
    REQUIRE_THROWS_AS(optimize_exponent([](double) { return -0.1; }), std::runtime_error);
    ChernoffResult zero = optimize_exponent([](double s) { return s < 0.5 ? 1e-300 : 0.0; });
    REQUIRE(std::isinf(zero.exponent));
}

TEST_CASE("multi-hypothesis exponent reduces correctly", "[chernoff]") {
    GaussianState a = make_thermal(0.1), b = make_thermal(1.0);
    MaryResult two = mary_exponent({a, b});
    REQUIRE(two.pairs.table.size() == 1);
    REQUIRE(two.overall.exponent == Catch::Approx(0.16271750170141441).margin(1e-9));

    // a duplicated hypothesis forces a vanishing overall exponent
    MaryResult dup = mary_exponent({a, b, b});
    REQUIRE(dup.pairs.table.size() == 3);
    REQUIRE(dup.overall.exponent == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("equally spaced position hypotheses share one pairwise exponent", "[chernoff]") {
    ChannelParams p{0.9, 1.5, 2.0};
    std::vector<GaussianState> states = nqi_position_states(p, 3);
    REQUIRE(states.size() == 3);
    MaryResult r = mary_exponent(states);
    double lo = r.pairs.table.front().result.exponent, hi = lo;
    for (const auto& e : r.pairs.table) {
        lo = std::min(lo, e.result.exponent);
        hi = std::max(hi, e.result.exponent);
    }
    REQUIRE(hi - lo <= 1e-12);
    REQUIRE(r.overall.exponent == Catch::Approx(e_nqi(p)).epsilon(1e-9));
}

TEST_CASE("control-averaged pair exponent", "[chernoff]") {
    auto lq1 = [](double s) { return std::log(qs_thermal_closed(0.1, 1.0, s)); };
    auto lq2 = [](double s) { return std::log(qs_thermal_closed(0.5, 2.0, s)); };
    const double e1 = optimize_exponent([&](double s) { return std::exp(lq1(s)); }).exponent;
    const double e2 = optimize_exponent([&](double s) { return std::exp(lq2(s)); }).exponent;

    ChernoffResult one = controlled_pair_exponent({lq1}, {1.0});
    REQUIRE(one.exponent == Catch::Approx(e1).margin(1e-12));

    const double lam = 0.35;
    ChernoffResult mix = controlled_pair_exponent({lq1, lq2}, {lam, 1.0 - lam});
    // the shared s is suboptimal per term but beats any single fixed s
    REQUIRE(mix.exponent <= lam * e1 + (1.0 - lam) * e2 + 1e-12);
    REQUIRE(mix.exponent >= -(lam * lq1(0.5) + (1.0 - lam) * lq2(0.5)) - 1e-9);

    REQUIRE_THROWS_AS(controlled_pair_exponent({lq1, lq2}, {0.7, 0.7}), std::domain_error);
    REQUIRE_THROWS_AS(controlled_pair_exponent({lq1, lq2}, {1.3, -0.3}), std::domain_error);
    REQUIRE_THROWS_AS(controlled_pair_exponent({lq1}, {0.5, 0.5}), std::domain_error);
}

TEST_CASE("zero-weight control symbols are never evaluated", "[chernoff]") {
    GaussianState a = make_thermal(0.1), b = make_thermal(1.0);
    GaussianState bad = make_thermal(0.0);
    bad.cov *= 0.5;  // would throw if an evaluator were built for it
    ChernoffResult r = controlled_exponent({{a, b}, {bad, bad}}, {1.0, 0.0});
    REQUIRE(r.exponent == Catch::Approx(0.16271750170141441).margin(1e-9));
}
