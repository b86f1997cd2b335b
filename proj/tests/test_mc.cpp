#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jcas/chernoff.hpp"
#include "jcas/mc.hpp"
#include "jcas/scenario.hpp"

using namespace jcas;

TEST_CASE("per-trial streams are deterministic", "[mc]") {
    auto a = detail::trial_stream(42, 1, 1000);
    auto b = detail::trial_stream(42, 1, 1000);
    for (int k = 0; k < 16; ++k) REQUIRE(a.next() == b.next());

    auto c = detail::trial_stream(42, 1, 1001);
    auto d = detail::trial_stream(43, 1, 1000);
    REQUIRE(a.next() != c.next());
    REQUIRE(a.next() != d.next());

    // uniforms live in (0, 1]
    auto e = detail::trial_stream(7, 0, 0);
    for (int k = 0; k < 1000; ++k) {
        const double u = e.uniform_pos();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
    }
}

TEST_CASE("thermal count sampling matches the geometric law", "[mc]") {
    auto rng = detail::trial_stream(11, 0, 0);
    const double mean = 1.7;
    const long long trials = 200000;
    double sum = 0.0;
    long long zeros = 0;
    for (long long t = 0; t < trials; ++t) {
        const long long k = detail::sample_thermal_count(rng, mean);
        REQUIRE(k >= 0);
        sum += static_cast<double>(k);
        zeros += k == 0;
    }
    REQUIRE(sum / trials == Catch::Approx(mean).margin(0.03));
    REQUIRE(static_cast<double>(zeros) / trials ==
            Catch::Approx(1.0 / (mean + 1.0)).margin(0.005));

    auto z = detail::trial_stream(11, 0, 1);
    REQUIRE(detail::sample_thermal_count(z, 0.0) == 0);
}

TEST_CASE("discrimination runs are reproducible", "[mc]") {
    const std::vector<std::vector<double>> hyp = {{2.0, 0.5}, {0.5, 2.0}};
    McEstimate one = mc_discrimination(hyp, 6, 20000, 123, 1);
    McEstimate many = mc_discrimination(hyp, 6, 20000, 123, 4);
    REQUIRE(one.error_rate == many.error_rate);
    REQUIRE(one.half_width == many.half_width);

    McEstimate other = mc_discrimination(hyp, 6, 20000, 124, 4);
    REQUIRE(one.error_rate != other.error_rate);

    REQUIRE(one.copies == 6);
    REQUIRE(one.trials == 20000);
    REQUIRE(one.half_width > 0.0);
}

TEST_CASE("identical hypotheses give coin-flip errors", "[mc]") {
    const std::vector<std::vector<double>> hyp = {{1.0}, {1.0}};
    McEstimate est = mc_discrimination(hyp, 3, 100000, 5);
    REQUIRE(est.error_rate == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("well separated hypotheses match the exact error", "[mc]") {
    // thermal(0) against thermal(5) with 4 copies: under h0 every count is 0
    // and h0 wins with certainty; under h1 an error needs all 4 counts to be 0,
    // probability (1/6)^4
    const std::vector<std::vector<double>> hyp = {{0.0}, {5.0}};
    McEstimate est = mc_discrimination(hyp, 4, 400000, 9);
    const double exact = std::pow(1.0 / 6.0, 4);
    REQUIRE(est.error_rate < 1e-2);
    REQUIRE(std::abs(est.error_rate - exact) <= 3.0 * est.half_width);
}

TEST_CASE("argument validation", "[mc]") {
    REQUIRE_THROWS_AS(mc_discrimination({}, 4, 100, 1), std::domain_error);
    REQUIRE_THROWS_AS(mc_discrimination({{1.0}, {1.0, 2.0}}, 4, 100, 1), std::domain_error);
    REQUIRE_THROWS_AS(mc_discrimination({{1.0}, {-1.0}}, 4, 100, 1), std::domain_error);
    REQUIRE_THROWS_AS(mc_discrimination({{1.0}, {2.0}}, 0, 100, 1), std::domain_error);
    REQUIRE_THROWS_AS(mc_discrimination({{1.0}, {2.0}}, 4, 0, 1), std::domain_error);
}

TEST_CASE("slope fit recovers a synthetic exponent", "[mc]") {
    auto fabricate = [](double e0, double offset) {
        std::vector<McEstimate> table;
        for (int n : {10, 20, 30, 40, 50}) {
            McEstimate est;
            est.copies = n;
            est.trials = 1000000;
            est.error_rate = std::exp(offset - e0 * n);
            est.half_width = 1.959963984540054 * 0.01 * est.error_rate;
            table.push_back(est);
        }
        return table;
    };
    SlopeFit fit = slope_fit(fabricate(0.3, 0.0));
    REQUIRE(fit.exponent == Catch::Approx(0.3).margin(1e-12));
    REQUIRE(fit.points_used == 5);

    // the prefactor moves the intercept, never the slope
    SlopeFit shifted = slope_fit(fabricate(0.3, 2.0));
    REQUIRE(shifted.exponent == Catch::Approx(fit.exponent).margin(1e-12));

    // degenerate rows are dropped, and too few points refuse to fit
    std::vector<McEstimate> littered = fabricate(0.3, 0.0);
    McEstimate zero;
    zero.copies = 60;
    zero.trials = 100;
    zero.error_rate = 0.0;
    littered.push_back(zero);
    REQUIRE(slope_fit(littered).points_used == 5);
    REQUIRE_THROWS_AS(slope_fit({littered[0], littered[1]}), std::runtime_error);
}

TEST_CASE("fitted decay tracks the analytic exponent", "[mc]") {
    // light version of the acceptance run: binary position test at small scale
    ChannelParams p{0.9, 0.5, 8.0};
    const double analytic = e_nqi(p);
    std::vector<std::vector<double>> hyp = position_hypotheses_means(p, 2);
    std::vector<McEstimate> table;
    const int copies[] = {30, 45, 60, 75};
    const long long trials[] = {40000, 100000, 300000, 1000000};
    for (int k = 0; k < 4; ++k)
        table.push_back(mc_discrimination(hyp, copies[k], trials[k], 20240817));
    SlopeFit fit = slope_fit(table);
    REQUIRE(fit.exponent == Catch::Approx(analytic).epsilon(0.25));
    REQUIRE(fit.exponent <= analytic + std::max(3.0 * fit.stderr_value, 0.1 * analytic));
}

TEST_CASE("truncated exponent tables converge", "[mc]") {
    auto make_a = [](int dim) { return thermal_fock(0.1, dim); };
    auto make_b = [](int dim) { return thermal_fock(1.0, dim); };
    const double limit =
        optimize_exponent([](double s) { return qs_thermal_closed(0.1, 1.0, s); }).exponent;
    ConvergenceTable table = truncation_convergence(make_a, make_b, {4, 8, 16, 32, 64}, limit);
    REQUIRE(table.exponents.size() == 5);
    REQUIRE(table.limit == limit);
    REQUIRE(std::abs(table.exponents.back() - limit) < 1e-8);

    // successive increments shrink once the tail is under control
    for (std::size_t k = 2; k < table.exponents.size(); ++k) {
        const double prev = std::abs(table.exponents[k - 1] - table.exponents[k - 2]);
        const double cur = std::abs(table.exponents[k] - table.exponents[k - 1]);
        REQUIRE(cur <= 2.0 * prev + 1e-12);
    }

    // identical factories leave only the truncated tail, which dies off fast
    auto make_c = [](int dim) { return thermal_fock(0.7, dim); };
    ConvergenceTable self = truncation_convergence(make_c, make_c, {8, 16, 32}, 0.0);
    for (std::size_t k = 1; k < self.exponents.size(); ++k)
        REQUIRE(std::abs(self.exponents[k]) < std::abs(self.exponents[k - 1]));
    REQUIRE(std::abs(self.exponents.back()) < 1e-9);

    REQUIRE_THROWS_AS(truncation_convergence(make_a, make_b, {8, 8}, limit), std::domain_error);
    REQUIRE_THROWS_AS(truncation_convergence(make_a, make_b, {}, limit), std::domain_error);
}
