#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "jcas/chernoff.hpp"
#include "jcas/common.hpp"
#include "jcas/scenario.hpp"

namespace jcas {

// Pareto-maximal subset, sorted by exponent ascending with strictly
// decreasing rates.
struct Frontier {
    std::vector<RegionPoint> points;
};

struct RegionResult {
    std::vector<RegionPoint> points;
    std::vector<char> on_frontier;  // flag per point, same order
    Frontier frontier;
};

inline Frontier pareto_frontier(const std::vector<RegionPoint>& points,
                                std::vector<char>* flags = nullptr) {
    require_domain(!points.empty(), "pareto_frontier: empty point set");
    std::vector<std::size_t> idx(points.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const RegionPoint &pa = points[a], &pb = points[b];
        if (pa.exponent != pb.exponent) return pa.exponent > pb.exponent;
        if (pa.rate != pb.rate) return pa.rate > pb.rate;
        if (pa.lambda != pb.lambda) return pa.lambda < pb.lambda;
        if (pa.n_s != pb.n_s) return pa.n_s < pb.n_s;
        return pa.n_m < pb.n_m;
    });
    if (flags) flags->assign(points.size(), 0);
    std::vector<RegionPoint> kept;
    double best_rate = -std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) {
        if (points[i].rate > best_rate + 1e-12) {
            best_rate = points[i].rate;
            kept.push_back(points[i]);
            if (flags) (*flags)[i] = 1;
        }
    }
    std::reverse(kept.begin(), kept.end());
    return Frontier{std::move(kept)};
}

// Evaluates combine_operating_point over an explicit lambda grid and
// (n_s, n_m) split list. Work is sharded over splits; each worker writes into
// preassigned slots, so the output ordering (and every byte derived from it)
// is independent of the thread count. Point order: split-major, lambda-minor.
inline RegionResult build_region_points(const ChannelParams& params,
                                        const std::vector<double>& lambdas,
                                        const std::vector<std::pair<double, double>>& splits,
                                        const CombineOptions& opt = {}, int threads = 0) {
    check_params(params, "build_region_points");
    require_domain(lambdas.size() >= 2 && splits.size() >= 1,
                   "build_region_points: need at least a 2-point lambda grid and one split");
    const double rate_ea = ea_rate(params, opt);
    const auto log_q1 = thermal_position_log_q(params);

    RegionResult out;
    out.points.resize(lambdas.size() * splits.size());
    const int workers = std::min<int>(thread_count(threads), static_cast<int>(splits.size()));
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run = [&]() {
        try {
            for (;;) {
                const std::size_t si = cursor.fetch_add(1);
                if (si >= splits.size()) return;
                ResourceSplit split;
                split.n_s = splits[si].first;
                split.n_m = splits[si].second;
                check_split(params, split, "build_region_points");
                const double rate_ua = ua_rate(params, split, opt);
                auto [h1, h2] = ranging_pair(params, split);
                GaussianQsEvaluator ev(h1, h2);
                std::vector<std::function<double(double)>> log_q = {
                    log_q1, [&ev](double s) { return ev.log_q(s); }};
                for (std::size_t li = 0; li < lambdas.size(); ++li) {
                    RegionPoint& pt = out.points[si * lambdas.size() + li];
                    pt.lambda = lambdas[li];
                    pt.n_s = split.n_s;
                    pt.n_m = split.n_m;
                    pt.rate = pt.lambda * rate_ea + (1.0 - pt.lambda) * rate_ua;
                    pt.exponent =
                        controlled_pair_exponent(log_q, {pt.lambda, 1.0 - pt.lambda}).exponent;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    out.frontier = pareto_frontier(out.points, &out.on_frontier);
    return out;
}

// Default grids: uniform lambda, triangular (n_s, n_m) with n_s + n_m <= N.
inline RegionResult build_region(const ChannelParams& params, int lambda_grid_size = 101,
                                 int split_grid_size = 51, const CombineOptions& opt = {},
                                 int threads = 0) {
    require_domain(lambda_grid_size >= 2 && split_grid_size >= 2,
                   "build_region: grid sizes must be >= 2");
    std::vector<double> lambdas(lambda_grid_size);
    for (int k = 0; k < lambda_grid_size; ++k)
        lambdas[k] = static_cast<double>(k) / (lambda_grid_size - 1);
    std::vector<std::pair<double, double>> splits;
    const double step = params.n_total / (split_grid_size - 1);
    for (int i = 0; i < split_grid_size; ++i)
        for (int j = 0; i + j < split_grid_size; ++j) splits.emplace_back(i * step, j * step);
    return build_region_points(params, lambdas, splits, opt, threads);
}

// Straight segment between the two pure strategies: all modes assisted
// communication (lambda = 1, budget in the source) versus all modes sensing
// with the full budget in the source and no modulation.
inline std::vector<RegionPoint> time_sharing_baseline(const ChannelParams& params, int grid = 101) {
    check_params(params, "time_sharing_baseline");
    require_domain(grid >= 2, "time_sharing_baseline: grid must be >= 2");
    const double rate1 = c_ea(params);
    const double exp1 = e_nqi(params);
    ResourceSplit sensing;
    sensing.lambda = 0.0;
    sensing.n_s = params.n_total;
    sensing.n_m = 0.0;
    const double exp0 = e_qi_d(params, sensing);
    std::vector<RegionPoint> out(grid);
    for (int k = 0; k < grid; ++k) {
        const double t = static_cast<double>(k) / (grid - 1);
        RegionPoint& pt = out[k];
        pt.lambda = t;
        pt.n_s = params.n_total;
        pt.n_m = 0.0;
        pt.rate = t * rate1;
        pt.exponent = t * exp1 + (1.0 - t) * exp0;
    }
    return out;
}

struct DominanceReport {
    double max_margin = 0.0;  // best frontier-rate advantage over the baseline
    RegionPoint witness;      // frontier point anchoring the best advantage
    bool clipped = false;     // true when baseline exponents fell outside the frontier range
};

// Scans the baseline samples, reading the frontier rate at each baseline
// exponent by linear interpolation in (exponent, rate).
inline DominanceReport dominance_report(const Frontier& frontier,
                                        const std::vector<RegionPoint>& baseline) {
    require_domain(!frontier.points.empty() && !baseline.empty(),
                   "dominance_report: frontier and baseline must be non-empty");
    const auto& fp = frontier.points;
    const double lo = fp.front().exponent, hi = fp.back().exponent;
    DominanceReport rep;
    rep.max_margin = -std::numeric_limits<double>::infinity();
    for (const RegionPoint& b : baseline) {
        if (b.exponent < lo || b.exponent > hi) {
            rep.clipped = true;
            continue;
        }
        std::size_t k = 0;
        while (k + 2 < fp.size() && fp[k + 1].exponent < b.exponent) ++k;
        const RegionPoint &p0 = fp[k], &p1 = fp[k + 1 < fp.size() ? k + 1 : k];
        double rate;
        if (p1.exponent == p0.exponent) {
            rate = std::max(p0.rate, p1.rate);
        } else {
            const double t = (b.exponent - p0.exponent) / (p1.exponent - p0.exponent);
            rate = p0.rate + t * (p1.rate - p0.rate);
        }
        const double margin = rate - b.rate;
        if (margin > rep.max_margin) {
            rep.max_margin = margin;
            rep.witness = p0.rate >= p1.rate ? p0 : p1;
        }
    }
    if (rep.max_margin == -std::numeric_limits<double>::infinity()) {
        rep.max_margin = 0.0;
        rep.witness = fp.front();
        rep.clipped = true;
    }
    return rep;
}

}  // namespace jcas
