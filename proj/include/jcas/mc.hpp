#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "jcas/chernoff.hpp"
#include "jcas/common.hpp"
#include "jcas/fock.hpp"

namespace jcas {

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

// SplitMix64 stream; each (seed, hypothesis, trial) triple gets its own
// state, so trials are reproducible no matter how they are scheduled.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in (0, 1]; never 0, so log(u) is always finite
    double uniform_pos() { return ((next() >> 11) + 1) * 0x1.0p-53; }
    std::uint64_t uniform_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

inline SplitMix64 trial_stream(std::uint64_t seed, int hypothesis, std::uint64_t trial) {
    std::uint64_t s = seed;
    s = mix64(s + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(hypothesis + 1));
    s = mix64(s + 0x9e3779b97f4a7c15ull * (trial + 1));
    return SplitMix64(s);
}

// Photon count of a thermal mode with the given mean: geometric law
// P(k) = (1/(N+1)) (N/(N+1))^k by CDF inversion.
inline long long sample_thermal_count(SplitMix64& rng, double mean) {
    if (mean <= 0.0) return 0;
    const double log_ratio = std::log(mean) - std::log1p(mean);
    return static_cast<long long>(std::log(rng.uniform_pos()) / log_ratio);
}

}  // namespace detail

struct McEstimate {
    int copies = 0;
    long long trials = 0;
    double error_rate = 0.0;  // max over hypotheses of the per-hypothesis error
    double half_width = 0.0;  // 95% Wilson interval half width at that hypothesis
};

// Classical simulation of multi-copy discrimination between product-thermal
// hypotheses given as per-slot mean photon numbers. Counts are summed per slot
// over the copies (a sufficient statistic), the MAP rule under equal priors
// picks the hypothesis, and exact likelihood ties are broken uniformly from
// the trial's own stream. Reported error is the worst hypothesis's.
inline McEstimate mc_discrimination(const std::vector<std::vector<double>>& hypotheses,
                                    int copies, long long trials, std::uint64_t seed,
                                    int threads = 0) {
    require_domain(!hypotheses.empty(), "mc_discrimination: empty hypothesis list");
    require_domain(copies >= 1, "mc_discrimination: copies must be >= 1");
    require_domain(trials >= 1, "mc_discrimination: trials must be >= 1");
    const int m = static_cast<int>(hypotheses.size());
    const std::size_t slots = hypotheses.front().size();
    require_domain(slots >= 1, "mc_discrimination: hypotheses need at least one slot");
    for (const auto& h : hypotheses) {
        require_domain(h.size() == slots, "mc_discrimination: ragged hypothesis list");
        for (double mean : h)
            require_domain(mean >= 0.0 && std::isfinite(mean),
                           "mc_discrimination: slot means must be finite and >= 0");
    }

    // Per-slot log-likelihood pieces: count * log(N/(N+1)) - copies * log(N+1),
    // with the zero-mean slot handled as an exact point mass at zero.
    std::vector<std::vector<double>> log_ratio(m, std::vector<double>(slots));
    for (int h = 0; h < m; ++h)
        for (std::size_t s = 0; s < slots; ++s) {
            const double mean = hypotheses[h][s];
            log_ratio[h][s] = mean > 0.0 ? std::log(mean) - std::log1p(mean)
                                         : -std::numeric_limits<double>::infinity();
        }

    std::vector<std::atomic<long long>> wrong(m);
    for (auto& w : wrong) w.store(0);
    const int workers = thread_count(threads);
    std::atomic<long long> cursor{0};
    constexpr long long kChunk = 4096;

    auto run = [&]() {
        std::vector<long long> counts(slots);
        std::vector<double> loglik(m);
        std::vector<int> ties;
        for (;;) {
            const long long begin = cursor.fetch_add(kChunk);
            if (begin >= trials * m) return;
            const long long end = std::min(begin + kChunk, trials * m);
            for (long long task = begin; task < end; ++task) {
                const int truth = static_cast<int>(task / trials);
                const std::uint64_t trial = static_cast<std::uint64_t>(task % trials);
                auto rng = detail::trial_stream(seed, truth, trial);
                for (std::size_t s = 0; s < slots; ++s) {
                    long long total = 0;
                    for (int c = 0; c < copies; ++c)
                        total += detail::sample_thermal_count(rng, hypotheses[truth][s]);
                    counts[s] = total;
                }
                for (int h = 0; h < m; ++h) {
                    double ll = 0.0;
                    for (std::size_t s = 0; s < slots; ++s) {
                        const double mean = hypotheses[h][s];
                        if (mean > 0.0)
                            ll += counts[s] * log_ratio[h][s] - copies * std::log1p(mean);
                        else if (counts[s] > 0)
                            ll = -std::numeric_limits<double>::infinity();
                    }
                    loglik[h] = ll;
                }
                double best = loglik[0];
                for (int h = 1; h < m; ++h) best = std::max(best, loglik[h]);
                ties.clear();
                for (int h = 0; h < m; ++h)
                    if (loglik[h] == best) ties.push_back(h);
                const int decision =
                    ties.size() == 1
                        ? ties.front()
                        : ties[static_cast<std::size_t>(rng.uniform_below(ties.size()))];
                if (decision != truth) wrong[truth].fetch_add(1);
            }
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }

    McEstimate est;
    est.copies = copies;
    est.trials = trials;
    int worst = 0;
    for (int h = 1; h < m; ++h)
        if (wrong[h].load() > wrong[worst].load()) worst = h;
    const double p_hat = static_cast<double>(wrong[worst].load()) / trials;
    const double z = 1.959963984540054;  // 95% normal quantile
    const double n = static_cast<double>(trials);
    const double denom = 1.0 + z * z / n;
    est.error_rate = p_hat;
    est.half_width = z * std::sqrt(p_hat * (1.0 - p_hat) / n + z * z / (4.0 * n * n)) / denom;
    return est;
}

struct SlopeFit {
    double exponent = 0.0;
    double stderr_value = 0.0;
    int points_used = 0;
};

// Weighted least-squares slope of -log(error) against the copy count. Weights
// come from the delta-method standard deviation of log(error); the quoted
// standard error is inflated by sqrt(chi^2/dof) when the fit scatter exceeds
// what the counting intervals explain.
inline SlopeFit slope_fit(const std::vector<McEstimate>& estimates) {
    std::vector<double> xs, ys, ws;
    for (const McEstimate& e : estimates) {
        if (e.error_rate <= 0.0 || e.error_rate >= 1.0) continue;
        const double sigma = e.half_width / (1.959963984540054 * e.error_rate);
        if (sigma <= 0.0) continue;
        xs.push_back(static_cast<double>(e.copies));
        ys.push_back(-std::log(e.error_rate));
        ws.push_back(1.0 / (sigma * sigma));
    }
    if (xs.size() < 3) throw std::runtime_error("slope_fit: need at least 3 usable points");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += ws[i];
        swx += ws[i] * xs[i];
        swy += ws[i] * ys[i];
        swxx += ws[i] * xs[i] * xs[i];
        swxy += ws[i] * xs[i] * ys[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det <= 0.0) throw std::runtime_error("slope_fit: degenerate abscissa");
    const double slope = (sw * swxy - swx * swy) / det;
    const double intercept = (swy - slope * swx) / sw;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        chi2 += ws[i] * r * r;
    }
    const double dof = static_cast<double>(xs.size()) - 2.0;
    const double scale = dof > 0.0 ? std::max(1.0, chi2 / dof) : 1.0;
    SlopeFit fit;
    fit.exponent = slope;
    fit.stderr_value = std::sqrt(scale * sw / det);
    fit.points_used = static_cast<int>(xs.size());
    return fit;
}

struct ConvergenceTable {
    std::vector<int> dims;
    std::vector<double> exponents;
    double limit = 0.0;
};

// Chernoff exponent of projected (unrenormalized) truncations at each cutoff,
// against the analytic full-space limit. The two eigendecompositions are done
// once per cutoff; Q_s then reduces to a weighted overlap sum.
inline ConvergenceTable truncation_convergence(const std::function<FockMatrix(int)>& make_a,
                                               const std::function<FockMatrix(int)>& make_b,
                                               const std::vector<int>& dims, double limit) {
    require_domain(!dims.empty(), "truncation_convergence: empty dim list");
    for (std::size_t i = 1; i < dims.size(); ++i)
        require_domain(dims[i] > dims[i - 1], "truncation_convergence: dims must be ascending");
    ConvergenceTable table;
    table.dims = dims;
    table.limit = limit;
    for (int dim : dims) {
        const FockMatrix a = make_a(dim), b = make_b(dim);
        require_domain(a.dim == dim && b.dim == dim,
                       "truncation_convergence: factory returned wrong dimension");
        detail::check_hermitian(a, "truncation_convergence");
        detail::check_hermitian(b, "truncation_convergence");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(a.entries), eb(b.entries);
        auto clamp = [](const Eigen::VectorXd& v) {
            Eigen::VectorXd out = v;
            const double cut = 1e-15 * std::max(0.0, v.maxCoeff());
            for (int i = 0; i < out.size(); ++i)
                if (out(i) <= cut) out(i) = 0.0;
            return out;
        };
        const Eigen::VectorXd la = clamp(ea.eigenvalues()), lb = clamp(eb.eigenvalues());
        const Eigen::MatrixXd overlap =
            (ea.eigenvectors().adjoint() * eb.eigenvectors()).cwiseAbs2();
        auto q_of_s = [&](double s) {
            double q = 0.0;
            for (int i = 0; i < dim; ++i) {
                if (la(i) == 0.0) continue;
                const double lai = std::exp(s * std::log(la(i)));
                for (int j = 0; j < dim; ++j) {
                    if (lb(j) == 0.0) continue;
                    q += lai * std::exp((1.0 - s) * std::log(lb(j))) * overlap(i, j);
                }
            }
            return q;
        };
        table.exponents.push_back(optimize_exponent(q_of_s).exponent);
    }
    return table;
}

}  // namespace jcas
