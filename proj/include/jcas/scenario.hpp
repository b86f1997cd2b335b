#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "jcas/chernoff.hpp"
#include "jcas/common.hpp"
#include "jcas/fock.hpp"
#include "jcas/gaussian.hpp"

namespace jcas {

// eta: transmissivity toward the receiver; n_th: thermal photons seen in the
// returned mode; n_total: photon budget N shared by source and modulation.
struct ChannelParams {
    double eta = 0.99;
    double n_th = 1e4;
    double n_total = 10.0;
};

struct ResourceSplit {
    double lambda = 1.0;
    double n_s = 0.0;
    double n_m = 0.0;
};

struct DerivedParams {
    double n_eta = 0.0;        // receiver-side background, eta n_s + (1-eta) n_th / eta
    double n_comp = 0.0;       // returned-mode background, (1-eta) n_s + n_th
    double capacity_d = 0.0;   // discriminant of the assisted-capacity formula, at n_s = N
};

enum class EvalMode { exact, approx };
enum class EaRateMode { closed, fock };
enum class UaRateMode { bound, fock };

inline void check_params(const ChannelParams& p, const char* who) {
    require_domain(p.eta > 0.0 && p.eta <= 1.0, std::string(who) + ": eta must lie in (0,1]");
    require_domain(p.n_th > 0.0 && std::isfinite(p.n_th), std::string(who) + ": n_th must be > 0");
    require_domain(p.n_total >= 0.0 && std::isfinite(p.n_total),
                   std::string(who) + ": n must be >= 0");
}

inline void check_split(const ChannelParams& p, const ResourceSplit& s, const char* who) {
    require_domain(s.lambda >= 0.0 && s.lambda <= 1.0,
                   std::string(who) + ": lambda must lie in [0,1]");
    require_domain(s.n_s >= 0.0 && s.n_m >= 0.0,
                   std::string(who) + ": n_s and n_m must be >= 0");
    require_domain(s.n_s + s.n_m <= p.n_total + 1e-12,
                   std::string(who) + ": n_s + n_m exceeds the photon budget");
}

inline DerivedParams derived_params(const ChannelParams& p, const ResourceSplit& s) {
    check_params(p, "derived_params");
    DerivedParams d;
    d.n_eta = p.eta * s.n_s + (1.0 - p.eta) * p.n_th / p.eta;
    d.n_comp = (1.0 - p.eta) * s.n_s + p.n_th;
    const double n = p.n_total;
    const double n_eta_full = p.eta * n + (1.0 - p.eta) * p.n_th / p.eta;
    d.capacity_d = std::sqrt(std::max(
        0.0, (n + n_eta_full + 1.0) * (n + n_eta_full + 1.0) - 4.0 * p.eta * n * (n + 1.0)));
    return d;
}

// Exponent for locating an incoherent thermal probe of the full budget N:
// binary test between thermal((1-eta)N + n_th) and thermal(n_th) per slot,
// exact value 2 log(A - B) with A = sqrt((1+n1)(1+n2)), B = sqrt(n1 n2),
// rewritten as 2 log((1+n1+n2)/(A+B)) so nearby means do not cancel.
inline double e_nqi(const ChannelParams& p, EvalMode mode = EvalMode::exact) {
    check_params(p, "e_nqi");
    if (mode == EvalMode::approx) {
        const double x = (1.0 - p.eta) * p.n_total / (2.0 * p.n_th);
        return x * x;
    }
    const double n1 = (1.0 - p.eta) * p.n_total + p.n_th;
    const double n2 = p.n_th;
    const double a = std::sqrt((1.0 + n1) * (1.0 + n2));
    const double b = std::sqrt(n1 * n2);
    return 2.0 * std::log((1.0 + n1 + n2) / (a + b));
}

// The two three-mode hypotheses of the assisted ranging test on slots
// (D1, D2, idler): the probe return couples to D1 or to D2 while the other
// slot holds bare thermal noise; the idler stays in place.
inline std::pair<GaussianState, GaussianState> ranging_pair(const ChannelParams& p,
                                                            const ResourceSplit& s) {
    check_params(p, "ranging_pair");
    GaussianState ri = return_idler_state(p.eta, s.n_s, s.n_m, p.n_th);
    GaussianState joint = tensor(ri, make_thermal(p.n_th));  // slots (return, idler, noise)
    GaussianState h1 = partial_trace(joint, {0, 2, 1});
    GaussianState h2 = partial_trace(joint, {2, 0, 1});
    return {h1, h2};
}

inline double e_qi_d(const ChannelParams& p, const ResourceSplit& s,
                     EvalMode mode = EvalMode::exact) {
    check_params(p, "e_qi_d");
    require_domain(s.n_s >= 0.0 && s.n_m >= 0.0, "e_qi_d: n_s and n_m must be >= 0");
    if (mode == EvalMode::approx)
        return (1.0 - p.eta) * (2.0 * s.n_s + 0.5 * s.n_m) / p.n_th;
    auto [h1, h2] = ranging_pair(p, s);
    return -GaussianQsEvaluator(h1, h2).log_q(0.5);
}

// Entanglement-assisted capacity of the channel at full budget N.
inline double c_ea(const ChannelParams& p) {
    check_params(p, "c_ea");
    const double n = p.n_total;
    if (n == 0.0) return 0.0;
    const double n_eta = p.eta * n + (1.0 - p.eta) * p.n_th / p.eta;
    const double d = std::sqrt(
        std::max(0.0, (n + n_eta + 1.0) * (n + n_eta + 1.0) - 4.0 * p.eta * n * (n + 1.0)));
    return g_func(n) + g_func(n_eta) - g_func(0.5 * (d + n_eta - n - 1.0)) -
           g_func(0.5 * (d - n_eta + n - 1.0));
}

// Closed-form lower bound on the displaced-PSK Holevo information.
inline double r_ua(const ChannelParams& p, const ResourceSplit& s) {
    check_params(p, "r_ua");
    require_domain(s.n_s >= 0.0 && s.n_m >= 0.0, "r_ua: n_s and n_m must be >= 0");
    const double z = p.eta * s.n_m;
    if (z == 0.0) return 0.0;
    const double n_eta = p.eta * s.n_s + (1.0 - p.eta) * p.n_th / p.eta;
    if (n_eta == 0.0) return z * (1.0 - std::log(z));  // lossless background-free limit
    return z / (n_eta + 1.0) + z * std::log1p(1.0 / n_eta) -
           (n_eta + z) * std::log1p(z / (n_eta * (n_eta + 1.0)));
}

// log of the control-averaged overlap family for the incoherent full-budget
// probe: two-slot swap of thermal(n1) against thermal(n_th).
inline std::function<double(double)> thermal_position_log_q(const ChannelParams& p) {
    check_params(p, "thermal_position_log_q");
    const double n1 = (1.0 - p.eta) * p.n_total + p.n_th;
    const double n2 = p.n_th;
    return [n1, n2](double s) {
        return std::log(qs_thermal_closed(n1, n2, s)) + std::log(qs_thermal_closed(n2, n1, s));
    };
}

// M-ary position hypotheses for the incoherent probe: hypothesis h puts the
// brightened mean on slot h. Gaussian form for exponent computations.
inline std::vector<GaussianState> nqi_position_states(const ChannelParams& p, int m) {
    check_params(p, "nqi_position_states");
    require_domain(m >= 2, "nqi_position_states: need at least two positions");
    const double n1 = (1.0 - p.eta) * p.n_total + p.n_th;
    std::vector<GaussianState> out;
    for (int h = 0; h < m; ++h) {
        GaussianState st = make_thermal(h == 0 ? n1 : p.n_th);
        for (int slot = 1; slot < m; ++slot) st = tensor(st, make_thermal(slot == h ? n1 : p.n_th));
        out.push_back(std::move(st));
    }
    return out;
}

// Same hypotheses as per-slot mean photon numbers, for the classical
// count-statistics simulator.
inline std::vector<std::vector<double>> position_hypotheses_means(const ChannelParams& p, int m) {
    check_params(p, "position_hypotheses_means");
    require_domain(m >= 2, "position_hypotheses_means: need at least two positions");
    const double n1 = (1.0 - p.eta) * p.n_total + p.n_th;
    std::vector<std::vector<double>> out(m, std::vector<double>(m, p.n_th));
    for (int h = 0; h < m; ++h) out[h][h] = n1;
    return out;
}

struct RegionPoint {
    double rate = 0.0;      // nats per mode
    double exponent = 0.0;  // nats per copy
    double lambda = 0.0;
    double n_s = 0.0;
    double n_m = 0.0;
};

struct CombineOptions {
    EaRateMode ea_mode = EaRateMode::closed;
    UaRateMode ua_mode = UaRateMode::bound;
    int ea_dims = 24;
    double ua_tail_eps = 1e-9;
};

inline double ea_rate(const ChannelParams& p, const CombineOptions& opt) {
    if (opt.ea_mode == EaRateMode::closed) return c_ea(p);
    return ea_psk_holevo(p.eta, p.n_total, p.n_th, opt.ea_dims);
}

inline double ua_rate(const ChannelParams& p, const ResourceSplit& s, const CombineOptions& opt) {
    if (opt.ua_mode == UaRateMode::bound) return r_ua(p, s);
    return ua_psk_holevo(p.eta, s.n_s, s.n_m, p.n_th, opt.ua_tail_eps);
}

// One operating point of the joint protocol: a lambda fraction of modes runs
// assisted communication (sensed incoherently at full budget), the rest runs
// displaced-PSK communication with the split (n_s, n_m) sensed through the
// idler-assisted ranging pair. The exponent shares one s across the control
// average.
inline RegionPoint combine_operating_point(const ChannelParams& p, const ResourceSplit& s,
                                           const CombineOptions& opt = {}) {
    check_params(p, "combine_operating_point");
    check_split(p, s, "combine_operating_point");
    RegionPoint pt;
    pt.lambda = s.lambda;
    pt.n_s = s.n_s;
    pt.n_m = s.n_m;
    pt.rate = s.lambda * ea_rate(p, opt) + (1.0 - s.lambda) * ua_rate(p, s, opt);

    auto [h1, h2] = ranging_pair(p, s);
    GaussianQsEvaluator ev(h1, h2);
    std::vector<std::function<double(double)>> log_q = {
        thermal_position_log_q(p), [&ev](double x) { return ev.log_q(x); }};
    pt.exponent = controlled_pair_exponent(log_q, {s.lambda, 1.0 - s.lambda}).exponent;
    return pt;
}

}  // namespace jcas
