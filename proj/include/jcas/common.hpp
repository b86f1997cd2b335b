#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace jcas {

// Thrown when a computation is infeasible at the requested truncation or
// scale, as opposed to a caller error (std::domain_error/std::out_of_range).
class capability_error : public std::runtime_error {
public:
    explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require_domain(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error(msg);
}

// Worker count for grid sweeps: an explicit request wins, then the
// JCAS_THREADS environment hint, then hardware concurrency. Results never
// depend on this value, only wall time does.
inline int thread_count(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("JCAS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// g(N) = (N+1)log(N+1) - N log N, the entropy of a thermal state with mean
// photon number N, in nats; g(0) = 0 by the 0 log 0 = 0 limit.
inline double g_func(double n) {
    require_domain(n >= 0.0 && std::isfinite(n), "g_func: mean photon number must be finite and >= 0");
    if (n == 0.0) return 0.0;
    return n * std::log1p(1.0 / n) + std::log1p(n);
}

}  // namespace jcas
