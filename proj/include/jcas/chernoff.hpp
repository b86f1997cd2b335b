#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "jcas/common.hpp"
#include "jcas/gaussian.hpp"
#include "jcas/williamson.hpp"

namespace jcas {

struct ChernoffResult {
    double s_star = 0.0;
    double q_value = 1.0;
    double exponent = 0.0;  // -log q_value, nats per copy
};

// Q_s for a pair of single-mode thermal states,
// Q_s = 1 / ((n1+1)^s (n2+1)^{1-s} - n1^s n2^{1-s}).
// The difference is evaluated as -A expm1(log B - log A) so nearly equal
// photon numbers do not cancel catastrophically.
inline double qs_thermal_closed(double n1, double n2, double s) {
    require_domain(n1 >= 0.0 && n2 >= 0.0, "qs_thermal_closed: photon numbers must be >= 0");
    require_domain(s >= 0.0 && s <= 1.0, "qs_thermal_closed: s must lie in [0,1]");
    const double log_a = s * std::log1p(n1) + (1.0 - s) * std::log1p(n2);
    if (n1 == 0.0 && s > 0.0) return std::exp(-log_a);
    if (n2 == 0.0 && s < 1.0) return std::exp(-log_a);
    // log B - log A written per term as -log1p(1/n), which avoids subtracting
    // two large logs when n1 ~ n2 >> 1 (the exponent there is ~A * noise). At
    // the s endpoints the other state's power is the identity, so its photon
    // number must not enter (0 * log 0 would poison the sum).
    const double log_b_minus_a = (s == 0.0 ? 0.0 : -s * std::log1p(1.0 / n1)) +
                                 (s == 1.0 ? 0.0 : -(1.0 - s) * std::log1p(1.0 / n2));
    return 1.0 / (-std::exp(log_a) * std::expm1(log_b_minus_a));
}

namespace detail {

// Lambda_p(x) = ((x+1)^p + (x-1)^p) / ((x+1)^p - (x-1)^p) and
// log G_p(x) = log[ 2^p / ((x+1)^p - (x-1)^p) ], both via
// 1 - t = -expm1(p log((x-1)/(x+1))) which stays accurate for x near 1
// and for small p; the x = 1 limits are Lambda = 1, G = 1.
inline void lambda_and_log_g(double x, double p, double& lambda, double& log_g) {
    const double xm = std::max(x - 1.0, 0.0);
    if (xm < 1e-12) {
        lambda = 1.0;
        log_g = 0.0;
        return;
    }
    const double one_minus_t = -std::expm1(p * (std::log(xm) - std::log(x + 1.0)));
    lambda = (2.0 - one_minus_t) / one_minus_t;
    log_g = -p * std::log(0.5 * (x + 1.0)) - std::log(one_minus_t);
}

inline void check_physical(const GaussianState& st, const WilliamsonDecomposition& wd,
                           const char* who) {
    const double scale = std::max(1.0, st.cov.cwiseAbs().maxCoeff());
    if ((st.cov - st.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::domain_error(std::string(who) + ": covariance is not symmetric");
    if (wd.nu.minCoeff() < 1.0 - 1e-9)
        throw std::domain_error(std::string(who) + ": unphysical state, symplectic eigenvalue below 1");
}

}  // namespace detail

// Quantum Chernoff overlap Q_s between two Gaussian states,
//   Q_s = Qbar_s exp(-1/2 d^T (V1(s) + V2(1-s))^{-1} d),
//   Qbar_s = 2^M prod_k G_s(nu1_k) G_{1-s}(nu2_k) / sqrt(det(V1(s)+V2(1-s))),
// with V_i(t) = S_i (diag Lambda_t(nu_k) I2) S_i^T. The Williamson
// decompositions are cached so repeated s-evaluations (optimization, control
// averaging) cost one small solve each.
class GaussianQsEvaluator {
public:
    GaussianQsEvaluator(const GaussianState& a, const GaussianState& b)
        : modes_(a.num_modes), w1_(williamson(a.cov)), w2_(williamson(b.cov)), d_(a.mean - b.mean) {
        if (a.num_modes != b.num_modes)
            throw std::domain_error("qs_gaussian: states must have the same mode count");
        detail::check_physical(a, w1_, "qs_gaussian");
        detail::check_physical(b, w2_, "qs_gaussian");
    }

    double log_q(double s) const {
        const int n2 = 2 * modes_;
        Eigen::VectorXd lam1(n2), lam2(n2);
        double log_qbar = modes_ * std::log(2.0);
        for (int k = 0; k < modes_; ++k) {
            double lam, lg;
            detail::lambda_and_log_g(w1_.nu(k), s, lam, lg);
            lam1(2 * k) = lam1(2 * k + 1) = lam;
            log_qbar += lg;
            detail::lambda_and_log_g(w2_.nu(k), 1.0 - s, lam, lg);
            lam2(2 * k) = lam2(2 * k + 1) = lam;
            log_qbar += lg;
        }
        Eigen::MatrixXd sigma =
            w1_.symplectic * lam1.asDiagonal() * w1_.symplectic.transpose() +
            w2_.symplectic * lam2.asDiagonal() * w2_.symplectic.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("qs_gaussian: singular V1(s) + V2(1-s)");
        double log_det = 0.0;
        for (int i = 0; i < n2; ++i) log_det += std::log(llt.matrixL()(i, i));
        log_det *= 2.0;
        const double quad = d_.dot(llt.solve(d_));
        return log_qbar - 0.5 * log_det - 0.5 * quad;
    }

    double q(double s) const { return std::exp(log_q(s)); }

private:
    int modes_;
    WilliamsonDecomposition w1_, w2_;
    Eigen::VectorXd d_;
};

inline double qs_gaussian(const GaussianState& a, const GaussianState& b, double s) {
    require_domain(s >= 0.0 && s <= 1.0, "qs_gaussian: s must lie in [0,1]");
    return GaussianQsEvaluator(a, b).q(s);
}

// Minimizes log q over s by golden-section search on [1e-6, 1-1e-6] to an
// interval of 1e-6; the endpoints are also sampled and kept if smaller.
inline ChernoffResult optimize_exponent(const std::function<double(double)>& q_of_s) {
    auto f = [&](double s) {
        const double q = q_of_s(s);
        if (std::isnan(q) || q < 0.0)
            throw std::runtime_error("optimize_exponent: invalid Q_s at s=" + std::to_string(s));
        return q == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(q);
    };
    const double lo = 1e-6, hi = 1.0 - 1e-6;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-6) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    double s_best = 0.5 * (a + b);
    double f_best = f(s_best);
    for (double s : {lo, hi}) {
        const double fs = f(s);
        if (fs < f_best) {
            f_best = fs;
            s_best = s;
        }
    }
    ChernoffResult r;
    r.s_star = s_best;
    r.q_value = std::exp(f_best);
    r.exponent = -f_best;
    return r;
}

struct PairwiseExponents {
    struct Entry {
        int i = 0, j = 0;
        ChernoffResult result;
    };
    int m = 0;
    std::vector<Entry> table;  // unordered pairs, i < j
};

struct MaryResult {
    PairwiseExponents pairs;
    ChernoffResult overall;  // the minimizing pair's optimum
};

template <class QOfPairS>  // q(i, j, s) -> double
inline MaryResult mary_exponent_from(int m, QOfPairS&& q) {
    require_domain(m >= 2, "mary_exponent: need at least two hypotheses");
    MaryResult out;
    out.pairs.m = m;
    bool first = true;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            ChernoffResult r = optimize_exponent([&](double s) { return q(i, j, s); });
            out.pairs.table.push_back({i, j, r});
            if (first || r.exponent < out.overall.exponent) {
                out.overall = r;
                first = false;
            }
        }
    return out;
}

inline MaryResult mary_exponent(const std::vector<GaussianState>& states) {
    require_domain(states.size() >= 2, "mary_exponent: need at least two hypotheses");
    const int m = static_cast<int>(states.size());
    std::vector<std::vector<GaussianQsEvaluator>> ev(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) ev[i].emplace_back(states[i], states[j]);
    return mary_exponent_from(m, [&](int i, int j, double s) { return ev[i][j - i - 1].q(s); });
}

// Control-weighted exponent for one hypothesis pair: a single s is shared
// across the control average, max_s -sum_x p_x log Q_s^{(x)}.
inline ChernoffResult controlled_pair_exponent(
    const std::vector<std::function<double(double)>>& log_q_x, const std::vector<double>& p_x) {
    if (log_q_x.size() != p_x.size() || p_x.empty())
        throw std::domain_error("controlled_pair_exponent: alphabet/family size mismatch");
    double total = 0.0;
    for (double p : p_x) {
        require_domain(p >= 0.0, "controlled_pair_exponent: negative weight");
        total += p;
    }
    require_domain(std::abs(total - 1.0) <= 1e-9, "controlled_pair_exponent: weights must sum to 1");
    return optimize_exponent([&](double s) {
        double lq = 0.0;
        for (size_t x = 0; x < p_x.size(); ++x)
            if (p_x[x] > 0.0) lq += p_x[x] * log_q_x[x](s);
        return std::exp(lq);
    });
}

// families[x] holds one state per hypothesis for control symbol x.
inline ChernoffResult controlled_exponent(const std::vector<std::vector<GaussianState>>& families,
                                          const std::vector<double>& p_x) {
    if (families.size() != p_x.size() || families.empty())
        throw std::domain_error("controlled_exponent: alphabet/family size mismatch");
    const size_t m = families.front().size();
    require_domain(m >= 2, "controlled_exponent: need at least two hypotheses");
    for (const auto& f : families)
        if (f.size() != m) throw std::domain_error("controlled_exponent: family size mismatch");

    ChernoffResult best;
    bool first = true;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j) {
            std::vector<std::shared_ptr<GaussianQsEvaluator>> ev;
            std::vector<std::function<double(double)>> lq;
            for (size_t x = 0; x < families.size(); ++x) {
                if (p_x[x] > 0.0)
                    ev.push_back(std::make_shared<GaussianQsEvaluator>(families[x][i], families[x][j]));
                else
                    ev.push_back(nullptr);
                auto e = ev.back();
                lq.push_back([e](double s) { return e ? e->log_q(s) : 0.0; });
            }
            ChernoffResult r = controlled_pair_exponent(lq, p_x);
            if (first || r.exponent < best.exponent) {
                best = r;
                first = false;
            }
        }
    return best;
}

}  // namespace jcas
