#pragma once

// Topological pressure of -sigma log J^u from weighted periodic-orbit sums,
// with the closed form for linear maps and the derived mixing-rate thresholds.

#include <limits>

#include "skewlab/periodic_orbits.hpp"

namespace skewlab {

/// (1/n) log sum_x exp(-sigma sum_k log J^u(A^k x)), evaluated by log-sum-exp
/// since orbit counts grow like lambda^n.
inline double pressure_estimate(const AnosovMap& A, double sigma, PeriodicOrbitSet& set) {
    if (set.size() == 0) throw ConfigError("pressure_estimate: empty orbit set");
    if (set.jac_u.size() != set.size()) unstable_frame(A, set);
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> s(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        s[i] = -sigma * std::log(set.jac_u[i]);
        m = std::max(m, s[i]);
    }
    double acc = 0;
    for (const double v : s) acc += std::exp(v - m);
    return (m + std::log(acc)) / set.n;
}

inline double pressure_estimate(const AnosovMap& A, double sigma, int n) {
    PeriodicOrbitSet set = periodic_points(A, n);
    return pressure_estimate(A, sigma, set);
}

/// P(-sigma log J^u) = (1 - sigma) log |lambda| for a linear hyperbolic map.
inline double linear_pressure_closed_form(const IMat2& M, double sigma) {
    const Hyperbolic2x2 h = hyperbolic_eigen(M);
    return (1.0 - sigma) * std::log(std::abs(h.lambda));
}

/// The pair (e^{(5/2) P(-2 log J^u)}, e^{(1/2) P(-2 log J^u)}) from the
/// closed form: lower thresholds for the unconditional and the probabilistic
/// mixing-rate bounds.
inline std::pair<double, double> rate_thresholds(const IMat2& M) {
    const double P2 = linear_pressure_closed_form(M, 2.0);
    return {std::exp(2.5 * P2), std::exp(0.5 * P2)};
}

}  // namespace skewlab
