#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

#include "jcas/common.hpp"
#include "jcas/gaussian.hpp"

namespace jcas {

struct WilliamsonDecomposition {
    Eigen::MatrixXd symplectic;  // S with V = S (diag nu_k I2) S^T and S Omega S^T = Omega
    Eigen::VectorXd nu;          // symplectic eigenvalues, ascending
};

// Standard symplectic form in (x1,p1,...,xM,pM) ordering.
inline Eigen::MatrixXd omega_matrix(int num_modes) {
    Eigen::MatrixXd om = Eigen::MatrixXd::Zero(2 * num_modes, 2 * num_modes);
    for (int k = 0; k < num_modes; ++k) {
        om(2 * k, 2 * k + 1) = 1.0;
        om(2 * k + 1, 2 * k) = -1.0;
    }
    return om;
}

inline WilliamsonDecomposition williamson(const Eigen::MatrixXd& cov) {
    const int n2 = static_cast<int>(cov.rows());
    if (n2 == 0 || n2 % 2 != 0 || cov.cols() != n2)
        throw std::domain_error("williamson: covariance must be a nonempty 2M x 2M matrix");
    const int m = n2 / 2;
    Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("williamson: symmetric eigendecomposition failed");
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error("williamson: covariance is not positive definite");
    const Eigen::VectorXd rt = es.eigenvalues().cwiseSqrt();
    const Eigen::MatrixXd vhalf = es.eigenvectors() * rt.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd vinvh =
        es.eigenvectors() * rt.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

    // A = V^{-1/2} Omega V^{-1/2} is antisymmetric; its real Schur form has
    // 2x2 blocks [[0,b],[-b,0]] with b = 1/nu. A column swap inside a pair
    // fixes any block that comes out with b < 0.
    Eigen::MatrixXd a = vinvh * omega_matrix(m) * vinvh;
    a = 0.5 * (a - a.transpose().eval());
    Eigen::RealSchur<Eigen::MatrixXd> schur(a);
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("williamson: Schur decomposition failed");
    Eigen::MatrixXd q = schur.matrixU();
    Eigen::MatrixXd t = schur.matrixT();

    Eigen::VectorXd nu(m);
    for (int k = 0; k < m; ++k) {
        double b = t(2 * k, 2 * k + 1);
        if (b < 0.0) {
            q.col(2 * k).swap(q.col(2 * k + 1));
            b = -b;
        }
        if (b <= 0.0)
            throw std::runtime_error("williamson: zero symplectic eigenvalue block");
        nu(k) = 1.0 / b;
        if (nu(k) < 1.0 && nu(k) > 1.0 - 1e-9) nu(k) = 1.0;  // pure-mode round-off
    }

    // Sort mode pairs ascending in nu; pair permutations stay symplectic.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return nu(i) < nu(j); });
    Eigen::MatrixXd qs(n2, n2);
    Eigen::VectorXd nus(m);
    for (int k = 0; k < m; ++k) {
        qs.col(2 * k) = q.col(2 * order[k]);
        qs.col(2 * k + 1) = q.col(2 * order[k] + 1);
        nus(k) = nu(order[k]);
    }

    Eigen::VectorXd dinv(n2);
    for (int k = 0; k < m; ++k) dinv(2 * k) = dinv(2 * k + 1) = 1.0 / std::sqrt(nus(k));
    WilliamsonDecomposition wd;
    wd.symplectic = vhalf * qs * dinv.asDiagonal();
    wd.nu = nus;
    return wd;
}

inline WilliamsonDecomposition williamson(const GaussianState& st) { return williamson(st.cov); }

inline double gaussian_entropy(const GaussianState& st) {
    const WilliamsonDecomposition wd = williamson(st.cov);
    double s = 0.0;
    for (int k = 0; k < wd.nu.size(); ++k) s += g_func(std::max(0.0, (wd.nu(k) - 1.0) / 2.0));
    return s;
}

}  // namespace jcas
