#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "jcas/io.hpp"
#include "jcas/region.hpp"

using namespace jcas;

namespace {

const ChannelParams kHighBudget{0.99, 1e4, 10.0};
const ChannelParams kLowBudget{0.99, 1e4, 0.1};

RegionPoint pt(double rate, double exponent) {
    RegionPoint p;
    p.rate = rate;
    p.exponent = exponent;
    return p;
}

// frontier rate at the query exponent, linearly interpolated
double frontier_rate_at(const Frontier& f, double exponent) {
    const auto& fp = f.points;
    std::size_t k = 0;
    while (k + 2 < fp.size() && fp[k + 1].exponent < exponent) ++k;
    const RegionPoint &p0 = fp[k], &p1 = fp[k + 1 < fp.size() ? k + 1 : k];
    if (p1.exponent == p0.exponent) return std::max(p0.rate, p1.rate);
    const double t = (exponent - p0.exponent) / (p1.exponent - p0.exponent);
    return p0.rate + t * (p1.rate - p0.rate);
}

}  // namespace

TEST_CASE("pareto filter on a handcrafted cloud", "[region]") {
    std::vector<RegionPoint> cloud = {
        pt(1.0, 0.1), pt(0.8, 0.5),  pt(0.5, 0.5), pt(0.9, 0.05),
        pt(0.2, 0.9), pt(0.79, 0.4), pt(0.2, 0.2),
    };
    std::vector<char> flags;
    Frontier f = pareto_frontier(cloud, &flags);

    REQUIRE(f.points.size() == 3);
    REQUIRE(f.points[0].exponent == 0.1);
    REQUIRE(f.points[0].rate == 1.0);
    REQUIRE(f.points[1].exponent == 0.5);
    REQUIRE(f.points[1].rate == 0.8);
    REQUIRE(f.points[2].exponent == 0.9);
    REQUIRE(f.points[2].rate == 0.2);

    // sorted by exponent ascending, rates strictly decreasing
    for (std::size_t i = 1; i < f.points.size(); ++i) {
        REQUIRE(f.points[i].exponent > f.points[i - 1].exponent);
        REQUIRE(f.points[i].rate < f.points[i - 1].rate);
    }

    REQUIRE(flags.size() == cloud.size());
    REQUIRE(flags[0] == 1);
    REQUIRE(flags[1] == 1);
    REQUIRE(flags[2] == 0);
    REQUIRE(flags[3] == 0);  // dominated by (1.0, 0.1)
    REQUIRE(flags[4] == 1);
    REQUIRE(flags[5] == 0);

    REQUIRE_THROWS_AS(pareto_frontier({}), std::domain_error);
}

TEST_CASE("region construction and frontier maximality", "[region]") {
    RegionResult region = build_region(kHighBudget, 21, 11);
    REQUIRE(region.points.size() == 21 * (11 * 12) / 2);
    REQUIRE(region.on_frontier.size() == region.points.size());

    // no sampled point strictly dominates a frontier point
    for (const RegionPoint& fpt : region.frontier.points)
        for (const RegionPoint& p : region.points) {
            const bool dominates =
                p.rate > fpt.rate + 1e-12 && p.exponent > fpt.exponent + 1e-12;
            REQUIRE_FALSE(dominates);
        }

    // endpoints: full-rate point and the flagged points re-filter to themselves
    double best_rate = 0.0;
    for (const RegionPoint& p : region.frontier.points)
        best_rate = std::max(best_rate, p.rate);
    REQUIRE(best_rate == Catch::Approx(c_ea(kHighBudget)).epsilon(1e-12));

    std::size_t flagged = 0;
    for (char c : region.on_frontier) flagged += c;
    REQUIRE(flagged == region.frontier.points.size());
}

TEST_CASE("grid refinement only tightens the frontier", "[region]") {
    RegionResult coarse = build_region(kHighBudget, 11, 6);
    RegionResult fine = build_region(kHighBudget, 21, 11);
    // every coarse split/lambda also lies on the fine grid, so the fine
    // frontier must weakly dominate the coarse one everywhere
    for (const RegionPoint& c : coarse.frontier.points) {
        const double fine_rate = frontier_rate_at(fine.frontier, c.exponent);
        REQUIRE(fine_rate >= c.rate - 1e-12);
    }
}

TEST_CASE("region grows with the photon budget", "[region]") {
    ChannelParams lo = kHighBudget, hi = kHighBudget;
    lo.n_total = 8.0;
    hi.n_total = 10.0;
    RegionResult small = build_region(lo, 15, 8);
    RegionResult large = build_region(hi, 15, 8);
    const double lo_end = small.frontier.points.back().exponent;
    for (const RegionPoint& p : small.frontier.points) {
        if (p.exponent > large.frontier.points.back().exponent) continue;
        REQUIRE(frontier_rate_at(large.frontier, p.exponent) >= p.rate - 1e-9);
    }
    REQUIRE(large.frontier.points.back().exponent >= lo_end - 1e-15);
}

TEST_CASE("time sharing baseline endpoints", "[region]") {
    std::vector<RegionPoint> base = time_sharing_baseline(kHighBudget, 41);
    REQUIRE(base.size() == 41);
    REQUIRE(base.front().lambda == 0.0);
    REQUIRE(base.back().lambda == 1.0);
    REQUIRE(base.back().rate == Catch::Approx(c_ea(kHighBudget)).epsilon(1e-12));
    REQUIRE(base.back().exponent == Catch::Approx(e_nqi(kHighBudget)).epsilon(1e-12));
    REQUIRE(base.front().rate == 0.0);
    REQUIRE(base.front().exponent ==
            Catch::Approx(e_qi_d(kHighBudget, {0.0, kHighBudget.n_total, 0.0})).epsilon(1e-12));

    // interior points interpolate linearly
    const RegionPoint& mid = base[20];
    REQUIRE(mid.rate == Catch::Approx(0.5 * base.back().rate).margin(1e-15));
    REQUIRE(mid.exponent ==
            Catch::Approx(0.5 * (base.front().exponent + base.back().exponent)).margin(1e-15));
}

TEST_CASE("dominance report against the baseline", "[region]") {
    // feeding the baseline against itself yields a zero margin
    std::vector<RegionPoint> base = time_sharing_baseline(kHighBudget, 21);
    std::vector<RegionPoint> reversed(base.rbegin(), base.rend());
    Frontier as_frontier{reversed};
    DominanceReport self = dominance_report(as_frontier, base);
    REQUIRE(std::abs(self.max_margin) < 1e-12);

    // the full region strictly beats time sharing at the high budget
    RegionResult region = build_region(kHighBudget, 21, 11);
    DominanceReport rep = dominance_report(region.frontier, time_sharing_baseline(kHighBudget, 21));
    REQUIRE(rep.max_margin > 0.0);
    REQUIRE(rep.witness.rate > 0.0);

    // and collapses to it at the low budget
    RegionResult small = build_region(kLowBudget, 21, 11);
    DominanceReport rep5 = dominance_report(small.frontier, time_sharing_baseline(kLowBudget, 21));
    REQUIRE(rep5.max_margin <= 0.01 * c_ea(kLowBudget));

    // disjoint exponent ranges are flagged rather than extrapolated
    Frontier narrow{{pt(1.0, 10.0), pt(0.5, 11.0)}};
    DominanceReport clipped = dominance_report(narrow, base);
    REQUIRE(clipped.clipped);
    REQUIRE(clipped.max_margin == 0.0);
}

TEST_CASE("region output is identical across thread counts", "[region]") {
    RegionResult one = build_region(kLowBudget, 11, 6, {}, 1);
    RegionResult four = build_region(kLowBudget, 11, 6, {}, 4);
    const std::string csv_one = region_csv(one);
    const std::string csv_four = region_csv(four);
    REQUIRE(csv_one == csv_four);

    RegionResult again = build_region(kLowBudget, 11, 6, {}, 4);
    REQUIRE(region_csv(again) == csv_four);
}

TEST_CASE("csv round trip preserves every digit", "[region]") {
    RegionResult region = build_region(kLowBudget, 5, 4, {}, 2);
    const std::string csv = region_csv(region);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "lambda,n_s,n_m,rate_nats,exponent_nats,frontier");
    std::size_t row = 0;
    std::string line;
    while (std::getline(in, line)) {
        REQUIRE(row < region.points.size());
        std::istringstream fields(line);
        std::string cell;
        double vals[5];
        for (int k = 0; k < 5; ++k) {
            REQUIRE(std::getline(fields, cell, ','));
            vals[k] = std::strtod(cell.c_str(), nullptr);
        }
        REQUIRE(std::getline(fields, cell, ','));
        const RegionPoint& p = region.points[row];
        REQUIRE(vals[0] == p.lambda);
        REQUIRE(vals[1] == p.n_s);
        REQUIRE(vals[2] == p.n_m);
        REQUIRE(vals[3] == p.rate);
        REQUIRE(vals[4] == p.exponent);
        REQUIRE(cell == (region.on_frontier[row] ? "1" : "0"));
        ++row;
    }
    REQUIRE(row == region.points.size());
}
