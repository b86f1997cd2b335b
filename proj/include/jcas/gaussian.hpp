#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "jcas/common.hpp"

namespace jcas {

// M-mode Gaussian state in quadrature ordering (x1,p1,...,xM,pM) with the
// vacuum-covariance = identity convention: coherent |alpha> has mean
// (2 Re alpha, 2 Im alpha) and a thermal state has cov (2N+1) I.
struct GaussianState {
    int num_modes = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

inline void check_mode(const GaussianState& st, int mode, const char* who) {
    if (mode < 0 || mode >= st.num_modes)
        throw std::out_of_range(std::string(who) + ": mode index " + std::to_string(mode) +
                                " out of range for " + std::to_string(st.num_modes) + " modes");
}

inline GaussianState make_thermal(double n_mean) {
    require_domain(n_mean >= 0.0 && std::isfinite(n_mean), "make_thermal: n_mean must be >= 0");
    GaussianState st;
    st.num_modes = 1;
    st.mean = Eigen::VectorXd::Zero(2);
    st.cov = (2.0 * n_mean + 1.0) * Eigen::MatrixXd::Identity(2, 2);
    return st;
}

inline GaussianState make_tmsv(double n_s) {
    require_domain(n_s >= 0.0 && std::isfinite(n_s), "make_tmsv: n_s must be >= 0");
    GaussianState st;
    st.num_modes = 2;
    st.mean = Eigen::VectorXd::Zero(4);
    st.cov = Eigen::MatrixXd::Identity(4, 4) * (2.0 * n_s + 1.0);
    const double c = 2.0 * std::sqrt(n_s * (n_s + 1.0));
    st.cov(0, 2) = st.cov(2, 0) = c;
    st.cov(1, 3) = st.cov(3, 1) = -c;
    return st;
}

inline GaussianState displace(GaussianState st, int mode, std::complex<double> alpha) {
    check_mode(st, mode, "displace");
    st.mean(2 * mode) += 2.0 * alpha.real();
    st.mean(2 * mode + 1) += 2.0 * alpha.imag();
    return st;
}

inline GaussianState phase_rotate(GaussianState st, int mode, double theta) {
    check_mode(st, mode, "phase_rotate");
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * st.num_modes, 2 * st.num_modes);
    s.block<2, 2>(2 * mode, 2 * mode) = r;
    st.mean = s * st.mean;
    st.cov = s * st.cov * s.transpose();
    return st;
}

// Two-mode mixing with the sign convention b = sqrt(eta) a + sqrt(1-eta) e,
// d = -sqrt(1-eta) a + sqrt(eta) e; output mode_a carries b, mode_b carries d.
inline GaussianState beamsplitter(GaussianState st, int mode_a, int mode_b, double eta) {
    check_mode(st, mode_a, "beamsplitter");
    check_mode(st, mode_b, "beamsplitter");
    if (mode_a == mode_b) throw std::out_of_range("beamsplitter: modes must be distinct");
    require_domain(eta >= 0.0 && eta <= 1.0, "beamsplitter: eta must lie in [0,1]");
    const double t = std::sqrt(eta), r = std::sqrt(1.0 - eta);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * st.num_modes, 2 * st.num_modes);
    for (int q = 0; q < 2; ++q) {
        const int ia = 2 * mode_a + q, ib = 2 * mode_b + q;
        s(ia, ia) = t;
        s(ia, ib) = r;
        s(ib, ia) = -r;
        s(ib, ib) = t;
    }
    st.mean = s * st.mean;
    st.cov = s * st.cov * s.transpose();
    return st;
}

inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    GaussianState st;
    st.num_modes = a.num_modes + b.num_modes;
    st.mean = Eigen::VectorXd::Zero(2 * st.num_modes);
    st.mean.head(2 * a.num_modes) = a.mean;
    st.mean.tail(2 * b.num_modes) = b.mean;
    st.cov = Eigen::MatrixXd::Zero(2 * st.num_modes, 2 * st.num_modes);
    st.cov.topLeftCorner(2 * a.num_modes, 2 * a.num_modes) = a.cov;
    st.cov.bottomRightCorner(2 * b.num_modes, 2 * b.num_modes) = b.cov;
    return st;
}

// Restricts to the listed modes; output mode i is input mode keep[i], so the
// list also permutes.
inline GaussianState partial_trace(const GaussianState& st, const std::vector<int>& keep) {
    if (keep.empty()) throw std::out_of_range("partial_trace: keep list is empty");
    for (int m : keep) check_mode(st, m, "partial_trace");
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = i + 1; j < keep.size(); ++j)
            if (keep[i] == keep[j]) throw std::out_of_range("partial_trace: duplicate keep entry");
    GaussianState out;
    out.num_modes = static_cast<int>(keep.size());
    out.mean = Eigen::VectorXd::Zero(2 * out.num_modes);
    out.cov = Eigen::MatrixXd::Zero(2 * out.num_modes, 2 * out.num_modes);
    for (int i = 0; i < out.num_modes; ++i) {
        out.mean.segment<2>(2 * i) = st.mean.segment<2>(2 * keep[i]);
        for (int j = 0; j < out.num_modes; ++j)
            out.cov.block<2, 2>(2 * i, 2 * j) = st.cov.block<2, 2>(2 * keep[i], 2 * keep[j]);
    }
    return out;
}

inline double mean_photon(const GaussianState& st, int mode) {
    check_mode(st, mode, "mean_photon");
    const double vx = st.cov(2 * mode, 2 * mode), vp = st.cov(2 * mode + 1, 2 * mode + 1);
    const double mx = st.mean(2 * mode), mp = st.mean(2 * mode + 1);
    return (vx + vp - 2.0) / 4.0 + (mx * mx + mp * mp) / 4.0;
}

// Return-idler state of the target slot: TMSV(n_s) signal displaced by
// sqrt(n_m) e^{i theta}, mixed with a thermal(n_th/eta) environment on a
// transmissivity-eta beamsplitter; kept modes are (return, idler). The
// linear_coupling variant scales the return-idler coupling as (1-eta)
// instead of the sqrt(1-eta) the beamsplitter derivation gives; both
// conventions circulate, and they only agree in the eta -> 1 limit.
inline GaussianState return_idler_state(double eta, double n_s, double n_m, double n_th,
                                        double theta = 0.0, bool linear_coupling = false) {
    require_domain(eta > 0.0 && eta <= 1.0, "return_idler_state: eta must lie in (0,1]");
    require_domain(n_s >= 0.0, "return_idler_state: n_s must be >= 0");
    require_domain(n_m >= 0.0, "return_idler_state: n_m must be >= 0");
    require_domain(n_th >= 0.0, "return_idler_state: n_th must be >= 0");
    if (linear_coupling) {
        const double e_diag = 2.0 * ((1.0 - eta) * n_s + n_th) + 1.0;
        const double s_diag = 2.0 * n_s + 1.0;
        const double c = 2.0 * (1.0 - eta) * std::sqrt(n_s * (n_s + 1.0));
        GaussianState st;
        st.num_modes = 2;
        st.mean = Eigen::VectorXd::Zero(4);
        const double w = -2.0 * std::sqrt((1.0 - eta) * n_m);
        st.mean(0) = w * std::cos(theta);
        st.mean(1) = w * std::sin(theta);
        st.cov = Eigen::MatrixXd::Identity(4, 4);
        st.cov(0, 0) = st.cov(1, 1) = e_diag;
        st.cov(2, 2) = st.cov(3, 3) = s_diag;
        Eigen::Matrix2d rt;
        rt << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
        st.cov.block<2, 2>(0, 2) = c * rt;
        st.cov.block<2, 2>(2, 0) = c * rt;
        return st;
    }
    GaussianState sig = make_tmsv(n_s);  // modes: 0 signal, 1 idler
    sig = displace(sig, 0, std::polar(std::sqrt(n_m), theta));
    GaussianState all = tensor(sig, make_thermal(n_th / eta));  // mode 2 environment
    all = beamsplitter(all, 0, 2, eta);  // mode 0 -> Bob, mode 2 -> return
    return partial_trace(all, {2, 1});
}

// Bob-idler state of the communication arm: the transmitted TMSV signal after
// the channel (mode b = sqrt(eta) a + sqrt(1-eta) e) together with the idler.
inline GaussianState bob_idler_state(double eta, double n_s, double n_th) {
    require_domain(eta > 0.0 && eta <= 1.0, "bob_idler_state: eta must lie in (0,1]");
    require_domain(n_s >= 0.0, "bob_idler_state: n_s must be >= 0");
    require_domain(n_th >= 0.0, "bob_idler_state: n_th must be >= 0");
    GaussianState all = tensor(make_tmsv(n_s), make_thermal(n_th / eta));
    all = beamsplitter(all, 0, 2, eta);
    return partial_trace(all, {0, 1});
}

}  // namespace jcas
