#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "jcas/common.hpp"
#include "jcas/gaussian.hpp"
#include "jcas/hyp1f1.hpp"
#include "jcas/williamson.hpp"

namespace jcas {

// Operators and states on a truncated number basis 0..dim-1. Density matrices
// produced here are never renormalized after truncation, so traces may fall
// below 1 but never exceed it.
struct FockMatrix {
    int dim = 0;
    Eigen::MatrixXcd entries;
    bool hermitian = false;
};

struct PhotonDistribution {
    Eigen::VectorXd probabilities;
    double tail_mass = 0.0;
};

namespace detail {

// Smallest cutoff holding the thermal(n_mean) tail at or below eps.
inline int thermal_cutoff(double n_mean, double eps) {
    if (n_mean <= 0.0) return 1;
    const double log_r = std::log(n_mean) - std::log1p(n_mean);
    return static_cast<int>(std::ceil(std::log(eps) / log_r)) + 1;
}

inline void check_hermitian(const FockMatrix& m, const char* who) {
    const double scale = std::max(1.0, m.entries.cwiseAbs().maxCoeff());
    if ((m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::domain_error(std::string(who) + ": input is not Hermitian");
}

}  // namespace detail

inline FockMatrix thermal_fock(double n_mean, int dim) {
    require_domain(n_mean >= 0.0, "thermal_fock: n_mean must be >= 0");
    require_domain(dim >= 1, "thermal_fock: dim must be >= 1");
    FockMatrix out;
    out.dim = dim;
    out.entries = Eigen::MatrixXcd::Zero(dim, dim);
    out.hermitian = true;
    if (n_mean == 0.0) {
        out.entries(0, 0) = 1.0;
        return out;
    }
    const double log_n = std::log(n_mean), log_n1 = std::log1p(n_mean);
    for (int n = 0; n < dim; ++n) out.entries(n, n) = std::exp(n * log_n - (n + 1) * log_n1);
    return out;
}

inline FockMatrix annihilation_matrix(int dim) {
    require_domain(dim >= 1, "annihilation_matrix: dim must be >= 1");
    FockMatrix out;
    out.dim = dim;
    out.entries = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) out.entries(n - 1, n) = std::sqrt(static_cast<double>(n));
    return out;
}

// Truncated displacement operator from the associated-Laguerre closed form,
//   <m|D(alpha)|n> = sqrt(n!/m!) alpha^{m-n} e^{-|a|^2/2} L_n^{(m-n)}(|a|^2),  m >= n,
// with the m < n block fixed by D(alpha)^dag = D(-alpha). Laguerre values come
// from the three-term recurrence in the lower index; factorial ratios and
// powers are assembled in the log domain.
inline FockMatrix displacement_matrix(std::complex<double> alpha, int dim) {
    require_domain(dim >= 1, "displacement_matrix: dim must be >= 1");
    FockMatrix out;
    out.dim = dim;
    out.entries = Eigen::MatrixXcd::Zero(dim, dim);
    const double x = std::norm(alpha);
    if (x == 0.0) {
        out.entries.setIdentity();
        return out;
    }
    const double log_abs_alpha = 0.5 * std::log(x);
    const double arg_alpha = std::arg(alpha);
    for (int d = 0; d < dim; ++d) {  // d = m - n >= 0
        // L_k^{(d)}(x) for k = 0..dim-1-d
        double lkm1 = 0.0, lk = 1.0;
        for (int k = 0; k + d < dim; ++k) {
            if (k > 0) {
                const double lkp1 = ((2.0 * k - 1.0 + d - x) * lk - (k - 1.0 + d) * lkm1) / k;
                lkm1 = lk;
                lk = lkp1;
            }
            const int n = k, m = k + d;
            const double log_mag = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) +
                                   d * log_abs_alpha - 0.5 * x;
            const std::complex<double> upper =
                lk * std::polar(std::exp(log_mag), d * arg_alpha);
            out.entries(m, n) = upper;
            if (d > 0) {
                // <n|D|m> = conj(<m|D(-alpha)|n>) picks up (-1)^d
                out.entries(n, m) = ((d % 2) ? -1.0 : 1.0) * std::conj(upper);
            }
        }
    }
    return out;
}

inline FockMatrix fock_tensor(const FockMatrix& a, const FockMatrix& b) {
    FockMatrix out;
    out.dim = a.dim * b.dim;
    out.hermitian = a.hermitian && b.hermitian;
    out.entries.resize(out.dim, out.dim);
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < a.dim; ++j)
            out.entries.block(i * b.dim, j * b.dim, b.dim, b.dim) = a.entries(i, j) * b.entries;
    return out;
}

// Reorders the tensor slots of a multi-mode matrix; dims lists the per-slot
// cutoffs in the current order (slot 0 slowest) and order[k] names the current
// slot that lands at position k.
inline FockMatrix fock_permute(const FockMatrix& m, const std::vector<int>& dims,
                               const std::vector<int>& order) {
    const int n = static_cast<int>(dims.size());
    require_domain(static_cast<int>(order.size()) == n, "fock_permute: order/dims size mismatch");
    int total = 1;
    for (int d : dims) total *= d;
    require_domain(total == m.dim, "fock_permute: dims do not match matrix size");
    std::vector<int> stride(n, 1), new_stride(n, 1);
    for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
    for (int k = n - 2; k >= 0; --k) new_stride[k] = new_stride[k + 1] * dims[order[k + 1]];
    std::vector<int> map(total);
    std::vector<int> digit(n);
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        for (int k = 0; k < n; ++k) {
            digit[k] = rem / stride[k];
            rem %= stride[k];
        }
        int out = 0;
        for (int k = 0; k < n; ++k) out += digit[order[k]] * new_stride[k];
        map[idx] = out;
    }
    FockMatrix out;
    out.dim = m.dim;
    out.hermitian = m.hermitian;
    out.entries.resize(total, total);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j) out.entries(map[i], map[j]) = m.entries(i, j);
    return out;
}

// Partial trace of a two-slot matrix; keep_slot 0 keeps the first (slow)
// factor, 1 the second.
inline FockMatrix fock_partial_trace(const FockMatrix& joint, int dim_a, int dim_b,
                                     int keep_slot) {
    require_domain(dim_a * dim_b == joint.dim, "fock_partial_trace: dims do not match");
    require_domain(keep_slot == 0 || keep_slot == 1, "fock_partial_trace: keep_slot must be 0 or 1");
    FockMatrix out;
    out.dim = keep_slot == 0 ? dim_a : dim_b;
    out.hermitian = joint.hermitian;
    out.entries = Eigen::MatrixXcd::Zero(out.dim, out.dim);
    if (keep_slot == 0) {
        for (int i = 0; i < dim_a; ++i)
            for (int j = 0; j < dim_a; ++j)
                for (int k = 0; k < dim_b; ++k)
                    out.entries(i, j) += joint.entries(i * dim_b + k, j * dim_b + k);
    } else {
        for (int i = 0; i < dim_b; ++i)
            for (int j = 0; j < dim_b; ++j)
                for (int k = 0; k < dim_a; ++k)
                    out.entries(i, j) += joint.entries(k * dim_b + i, k * dim_b + j);
    }
    return out;
}

// Two-mode beamsplitter unitary exp(phi (a^dag e - a e^dag)) with
// cos phi = sqrt(eta), matching the Gaussian mixing convention: after
// conjugation the first slot carries sqrt(eta) a + sqrt(1-eta) e.
inline FockMatrix bs_unitary(int dim_a, int dim_b, double eta) {
    require_domain(eta >= 0.0 && eta <= 1.0, "bs_unitary: eta must lie in [0,1]");
    const FockMatrix a = annihilation_matrix(dim_a), e = annihilation_matrix(dim_b);
    Eigen::MatrixXcd k =
        fock_tensor(FockMatrix{dim_a, a.entries.adjoint(), false}, e).entries;
    const std::complex<double> im(0.0, 1.0);
    Eigen::MatrixXcd h = im * (k - k.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const double phi = std::acos(std::min(1.0, std::sqrt(eta)));
    Eigen::VectorXcd phase(h.rows());
    for (int i = 0; i < h.rows(); ++i) phase(i) = std::exp(-im * phi * es.eigenvalues()(i));
    FockMatrix out;
    out.dim = dim_a * dim_b;
    out.entries = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

// Lossy thermal channel on a truncated state: tensor a thermal environment,
// conjugate by the beamsplitter unitary, trace the environment out.
inline FockMatrix attenuator_apply(const FockMatrix& rho, double eta, double n_env,
                                   int env_dim) {
    require_domain(eta >= 0.0 && eta <= 1.0, "attenuator_apply: eta must lie in [0,1]");
    require_domain(n_env >= 0.0, "attenuator_apply: n_env must be >= 0");
    require_domain(env_dim >= 1, "attenuator_apply: env_dim must be >= 1");
    if (n_env > 0.0) {
        const double tail = std::exp(env_dim * (std::log(n_env) - std::log1p(n_env)));
        if (tail > 1e-9)
            throw capability_error("attenuator_apply: environment truncation tail above 1e-9");
    }
    const FockMatrix u = bs_unitary(rho.dim, env_dim, eta);
    const FockMatrix joint = fock_tensor(rho, thermal_fock(n_env, env_dim));
    FockMatrix conj;
    conj.dim = joint.dim;
    conj.hermitian = joint.hermitian;
    conj.entries = u.entries * joint.entries * u.entries.adjoint();
    return fock_partial_trace(conj, rho.dim, env_dim, 0);
}

// tr(rho^s sigma^{1-s}) by Hermitian eigendecomposition; eigenvalues below
// 1e-15 of the largest are zeroed and 0^s = 0 for every s, so truncated or
// rank-deficient inputs stay meaningful.
inline double fock_qs(const FockMatrix& rho, const FockMatrix& sigma, double s) {
    require_domain(rho.dim == sigma.dim, "fock_qs: dimension mismatch");
    require_domain(s >= 0.0 && s <= 1.0, "fock_qs: s must lie in [0,1]");
    detail::check_hermitian(rho, "fock_qs");
    detail::check_hermitian(sigma, "fock_qs");
    auto matrix_power = [](const FockMatrix& m, double p) {
        // Exactly diagonal input (number-diagonal states are built that way):
        // the diagonal *is* the spectrum, so deep tail levels are real data,
        // not eigensolver noise, and must survive the power.
        bool diagonal = true;
        for (int j = 0; diagonal && j < m.dim; ++j)
            for (int i = 0; i < m.dim; ++i)
                if (i != j && m.entries(i, j) != std::complex<double>(0.0, 0.0)) {
                    diagonal = false;
                    break;
                }
        if (diagonal) {
            Eigen::VectorXd powered(m.dim);
            for (int i = 0; i < m.dim; ++i) {
                const double lam = m.entries(i, i).real();
                powered(i) = lam <= 0.0 ? 0.0 : std::exp(p * std::log(lam));
            }
            return Eigen::MatrixXcd(powered.asDiagonal());
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.entries);
        const double clamp = 1e-15 * std::max(0.0, es.eigenvalues().maxCoeff());
        Eigen::VectorXd powered(m.dim);
        for (int i = 0; i < m.dim; ++i) {
            const double lam = es.eigenvalues()(i);
            powered(i) = lam <= clamp ? 0.0 : std::exp(p * std::log(lam));
        }
        return Eigen::MatrixXcd(es.eigenvectors() * powered.asDiagonal() *
                                es.eigenvectors().adjoint());
    };
    const Eigen::MatrixXcd rs = matrix_power(rho, s);
    const Eigen::MatrixXcd ss = matrix_power(sigma, 1.0 - s);
    return (rs * ss).trace().real();
}

// Photon-number distribution of Bob's phase-averaged state under displaced
// phase-shift-keying with mean displacement energy n_m,
//   p_n = e^{-eta n_m / N} N^n / (N+1)^{n+1} 1F1(n+1; 1; eta n_m / (N(N+1))),
// where N = eta n_s + (1-eta) n_th / eta is his thermal background. The
// N = 0 limit is Poisson(eta n_m).
inline PhotonDistribution displaced_psk_pmf(double eta, double n_s, double n_m, double n_th,
                                            int dim) {
    require_domain(eta > 0.0 && eta <= 1.0, "displaced_psk_pmf: eta must lie in (0,1]");
    require_domain(n_s >= 0.0 && n_m >= 0.0 && n_th >= 0.0,
                   "displaced_psk_pmf: photon numbers must be >= 0");
    require_domain(dim >= 1, "displaced_psk_pmf: dim must be >= 1");
    const double n_bg = eta * n_s + (1.0 - eta) * n_th / eta;
    PhotonDistribution out;
    out.probabilities.resize(dim);
    double sum = 0.0;
    if (n_bg == 0.0) {
        const double mu = eta * n_m;
        for (int n = 0; n < dim; ++n) {
            const double lp = n * std::log(mu) - mu - std::lgamma(n + 1.0);
            out.probabilities(n) = (mu == 0.0 && n == 0) ? 1.0 : std::exp(lp);
            sum += out.probabilities(n);
        }
    } else {
        const double z = eta * n_m / (n_bg * (n_bg + 1.0));
        const double log_n = std::log(n_bg), log_n1 = std::log1p(n_bg);
        for (int n = 0; n < dim; ++n) {
            const double lp = -eta * n_m / n_bg + n * log_n - (n + 1) * log_n1 +
                              log_hyp1f1_np1_1(n, z);
            out.probabilities(n) = std::exp(lp);
            sum += out.probabilities(n);
        }
    }
    out.tail_mass = std::max(0.0, 1.0 - sum);
    return out;
}

// Unassisted Holevo information of the displaced-PSK ensemble,
// chi = S(rho_B) - g(N), with the cutoff doubled until the pmf tail is at or
// below tail_eps.
inline double ua_psk_holevo(double eta, double n_s, double n_m, double n_th,
                            double tail_eps = 1e-9) {
    require_domain(tail_eps > 0.0 && tail_eps <= 1e-6,
                   "ua_psk_holevo: tail_eps must lie in (0, 1e-6]");
    if (n_m == 0.0) {
        require_domain(eta > 0.0 && eta <= 1.0 && n_s >= 0.0 && n_th >= 0.0,
                       "ua_psk_holevo: invalid parameters");
        return 0.0;
    }
    const double n_bg = eta * n_s + (1.0 - eta) * n_th / eta;
    int dim = std::max(16, detail::thermal_cutoff(n_bg + eta * n_m, 0.5));
    constexpr int kMaxDiagonalDim = 4096;
    for (;;) {
        const PhotonDistribution pd = displaced_psk_pmf(eta, n_s, n_m, n_th, dim);
        if (pd.tail_mass <= tail_eps) {
            double entropy = 0.0;
            for (int n = 0; n < dim; ++n) {
                const double p = pd.probabilities(n);
                if (p > 0.0) entropy -= p * std::log(p);
            }
            return entropy - g_func(n_bg);
        }
        if (dim >= kMaxDiagonalDim)
            throw capability_error("ua_psk_holevo: tail_eps unreachable within dim 4096");
        dim = std::min(kMaxDiagonalDim, 2 * dim);
    }
}

// Entanglement-assisted PSK Holevo information chi = S(rhobar_BI) - S(rho_BI).
// The joint Bob-idler state is built exactly as a pure four-party vector
// (two-mode squeezed source, purified thermal environment), pushed through the
// beamsplitter unitary, and reduced; phase averaging over the modulation
// dephases the Bob index, so S(rhobar_BI) decomposes into one idler-sized
// eigenproblem per Bob photon number. S(rho_BI) itself is taken from the exact
// Gaussian spectrum since the modulation unitary cannot change it.
inline double ea_psk_holevo(double eta, double n_s, double n_th, int dims) {
    require_domain(eta > 0.0 && eta <= 1.0, "ea_psk_holevo: eta must lie in (0,1]");
    require_domain(n_s >= 0.0 && n_th >= 0.0, "ea_psk_holevo: photon numbers must be >= 0");
    require_domain(dims >= 2, "ea_psk_holevo: dims must be >= 2");
    if (n_s == 0.0) return 0.0;
    const double n_env = n_th / eta;
    const int env_dim = detail::thermal_cutoff(n_env, 1e-9);
    constexpr int kMaxDenseDim = 4096;
    if (dims * env_dim > kMaxDenseDim)
        throw capability_error("ea_psk_holevo: beamsplitter dimension exceeds dense cap 4096");

    // Schmidt amplitudes of source and environment purification.
    Eigen::VectorXd c(dims), q(env_dim);
    for (int n = 0; n < dims; ++n)
        c(n) = std::exp(0.5 * (n * std::log(n_s) - (n + 1) * std::log1p(n_s)));
    if (n_env == 0.0)
        q.setZero(), q(0) = 1.0;
    else
        for (int m = 0; m < env_dim; ++m)
            q(m) = std::exp(0.5 * (m * std::log(n_env) - (m + 1) * std::log1p(n_env)));

    // |Psi> as a matrix over (signal, env) x (idler, purifier); the source and
    // its purifying partners are diagonal, then the beamsplitter acts on the
    // left factor only and the first slot becomes Bob's mode.
    const int left = dims * env_dim;
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(left, left);
    for (int n = 0; n < dims; ++n)
        for (int m = 0; m < env_dim; ++m) x(n * env_dim + m, n * env_dim + m) = c(n) * q(m);
    const FockMatrix u = bs_unitary(dims, env_dim, eta);
    Eigen::MatrixXcd y = u.entries * x;

    // Regroup to (bob, idler) x (env, purifier) and form rho_BI = Z Z^dag.
    Eigen::MatrixXcd z(dims * dims, env_dim * env_dim);
    for (int b = 0; b < dims; ++b)
        for (int i = 0; i < dims; ++i)
            for (int e = 0; e < env_dim; ++e)
                for (int p = 0; p < env_dim; ++p)
                    z(b * dims + i, e * env_dim + p) = y(b * env_dim + e, i * env_dim + p);
    Eigen::MatrixXcd rho_bi = z * z.adjoint();

    double s_dephased = 0.0;
    for (int b = 0; b < dims; ++b) {
        Eigen::MatrixXcd block = rho_bi.block(b * dims, b * dims, dims, dims);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
        for (int i = 0; i < dims; ++i) {
            const double lam = es.eigenvalues()(i);
            if (lam > 0.0) s_dephased -= lam * std::log(lam);
        }
    }
    return s_dephased - gaussian_entropy(bob_idler_state(eta, n_s, n_th));
}

}  // namespace jcas
