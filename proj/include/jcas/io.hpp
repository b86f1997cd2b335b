#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "jcas/mc.hpp"
#include "jcas/region.hpp"

namespace jcas {

// Shortest exact decimal form (17 significant digits round-trip).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string region_csv(const RegionResult& region) {
    std::string out = "lambda,n_s,n_m,rate_nats,exponent_nats,frontier\n";
    for (std::size_t i = 0; i < region.points.size(); ++i) {
        const RegionPoint& p = region.points[i];
        out += fmt17(p.lambda) + ',' + fmt17(p.n_s) + ',' + fmt17(p.n_m) + ',' +
               fmt17(p.rate) + ',' + fmt17(p.exponent) + ',' +
               (region.on_frontier[i] ? '1' : '0');
        out += '\n';
    }
    return out;
}

inline std::string baseline_csv(const std::vector<RegionPoint>& baseline) {
    std::string out = "lambda,n_s,n_m,rate_nats,exponent_nats,frontier\n";
    for (const RegionPoint& p : baseline) {
        out += fmt17(p.lambda) + ',' + fmt17(p.n_s) + ',' + fmt17(p.n_m) + ',' +
               fmt17(p.rate) + ',' + fmt17(p.exponent) + ",0\n";
    }
    return out;
}

inline std::string mc_csv(const std::vector<McEstimate>& estimates) {
    std::string out = "copies,trials,error_rate,half_width\n";
    for (const McEstimate& e : estimates) {
        out += std::to_string(e.copies) + ',' + std::to_string(e.trials) + ',' +
               fmt17(e.error_rate) + ',' + fmt17(e.half_width) + '\n';
    }
    return out;
}

// One scalar report as a single JSON object line:
// {"name":...,"value":...,"units":...,"params":{...}}. Param values arrive
// pre-formatted so callers control integer vs decimal rendering.
inline std::string json_scalar(const std::string& name, double value, const std::string& units,
                               const std::vector<std::pair<std::string, std::string>>& params) {
    std::string out = "{\"name\":\"" + name + "\",\"value\":" + fmt17(value) + ",\"units\":\"" +
                      units + "\",\"params\":{";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ',';
        out += '"' + params[i].first + "\":" + params[i].second;
    }
    out += "}}";
    return out;
}

}  // namespace jcas
