#pragma once

#include <cmath>
#include <stdexcept>

#include "jcas/common.hpp"

namespace jcas {

// log 1F1(n+1; 1; z) for integer n >= 0 and z >= 0 by direct summation of
//   T_k = [Gamma(n+1+k) / Gamma(n+1)] z^k / (k!)^2.
// Terms are handled in the log domain with a running scale so n ~ 10^3 and
// z ~ 10^2 stay inside double range, and the mantissa sum is Kahan
// compensated. Stops once term/sum < 1e-18 holds three times in a row, which
// is safely past the single peak of the term sequence.
inline double log_hyp1f1_np1_1(long long n, double z) {
    require_domain(n >= 0, "log_hyp1f1_np1_1: n must be >= 0");
    require_domain(z >= 0.0 && std::isfinite(z), "log_hyp1f1_np1_1: z must be finite and >= 0");
    if (z == 0.0) return 0.0;
    if (n == 0) return z;  // 1F1(1;1;z) = e^z

    const double lg_n1 = std::lgamma(static_cast<double>(n + 1));
    const double log_z = std::log(z);
    double log_scale = 0.0;  // k = 0 term is exactly 1
    double acc = 1.0, comp = 0.0;
    int small_streak = 0;
    for (long long k = 1; k < 200000; ++k) {
        const double log_t = std::lgamma(static_cast<double>(n + 1 + k)) - lg_n1 -
                             2.0 * std::lgamma(static_cast<double>(k + 1)) + k * log_z;
        if (log_t > log_scale) {
            const double shrink = std::exp(log_scale - log_t);
            acc = acc * shrink + 1.0;
            comp *= shrink;
            log_scale = log_t;
        } else {
            const double term = std::exp(log_t - log_scale);
            const double y = term - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            if (term < 1e-18 * acc) {
                if (++small_streak >= 3) return log_scale + std::log(acc);
            } else {
                small_streak = 0;
            }
        }
    }
    throw std::runtime_error("log_hyp1f1_np1_1: series did not converge");
}

}  // namespace jcas
