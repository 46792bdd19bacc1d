// report.hpp
// CSV output for distance sweeps.

#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasekey/optimizer.hpp"
#include "phasekey/run_config.hpp"

namespace phasekey::cli {

inline constexpr const char* kSweepHeader = "l_km,mu_opt,g_rate,lambda_fil,lambda_bit,lambda_ph_bar,p1_star,saturated";

/// 10 significant digits in scientific notation.
inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", x);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<optimizer::KeyRatePoint>& points) {
    if (points.empty()) throw std::invalid_argument("write_sweep_csv: no points");
    os << kSweepHeader << '\n';
    for (const auto& p : points) {
        os << sci(p.l_km) << ',' << sci(p.mu_opt) << ',' << sci(p.g_rate) << ',' << sci(p.obs.lambda_fil) << ','
           << sci(p.obs.lambda_bit) << ',' << sci(p.bound.lambda_ph_bar) << ',' << sci(p.bound.p1_star) << ','
           << (p.bound.saturated ? 1 : 0) << '\n';
    }
}

inline std::string sweep_csv(const std::vector<optimizer::KeyRatePoint>& points) {
    std::ostringstream os;
    write_sweep_csv(os, points);
    return os.str();
}

inline void emit_sweep_csv(const std::vector<optimizer::KeyRatePoint>& points, const std::string& path) {
    const std::string text = sweep_csv(points);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace phasekey::cli
