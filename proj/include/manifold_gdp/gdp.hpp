#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "manifold_gdp/normal.hpp"

namespace mgdp {

enum class BudgetMethod { closed_form, analytic_s1, monte_carlo };

inline const char* to_string(BudgetMethod m) {
    switch (m) {
        case BudgetMethod::closed_form: return "closed_form";
        case BudgetMethod::analytic_s1: return "analytic_s1";
        case BudgetMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

/// Replicate spread of a Monte-Carlo budget estimate.
struct BudgetSpread {
    double min;
    double max;
    double mean;
    double stddev;
};

/// Privacy budget mu with the provenance of the estimate. Monte-Carlo budgets
/// carry the spread over replicate-level estimates.
struct PrivacyBudget {
    double mu;
    BudgetMethod method;
    std::optional<BudgetSpread> spread;
};

struct DpPoint {
    double eps;    // >= 0
    double delta;  // in [0, 1)

    void validate() const {
        if (eps < 0.0) throw std::invalid_argument("DpPoint: eps must be nonnegative");
        if (delta < 0.0 || delta >= 1.0)
            throw std::invalid_argument("DpPoint: delta must lie in [0, 1)");
    }
};

/// delta_mu(eps) = Phi(-eps/mu + mu/2) - e^eps * Phi(-eps/mu - mu/2),
/// the (eps, delta) profile equivalent to mu-GDP.
inline double delta_mu(double mu, double eps) {
    if (!(mu > 0.0)) throw std::domain_error("delta_mu: mu must be positive");
    if (eps < 0.0) throw std::domain_error("delta_mu: eps must be nonnegative");
    double a = -eps / mu + mu / 2.0;
    double b = -eps / mu - mu / 2.0;
    return norm_cdf(a) - std::exp(eps) * norm_cdf(b);
}

/// Smallest mu with delta_mu(eps) >= delta_target, by bisection to absolute
/// tolerance 1e-9. Targets <= 0 impose no constraint and map to mu = 0.
inline double solve_mu(double eps, double delta_target) {
    if (delta_target >= 1.0) throw std::domain_error("solve_mu: delta_target must be below 1");
    if (delta_target <= 0.0) return 0.0;
    double lo = 0.0;            // delta_mu -> 0 as mu -> 0+
    double hi = 100.0;
    while (delta_mu(hi, eps) < delta_target) {
        hi *= 2.0;
        if (hi > 1e9) throw std::runtime_error("solve_mu: failed to bracket");
    }
    while (hi - lo > 1e-9) {
        double mid = 0.5 * (lo + hi);
        if (delta_mu(mid, eps) >= delta_target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

/// Budget mu such that any eps-DP mechanism is mu-GDP:
/// mu = -2 Phi^{-1}(1 / (1 + e^eps)). Satisfies mu <= sqrt(pi/2) * eps.
inline double epsdp_to_gdp(double eps) {
    if (eps < 0.0) throw std::domain_error("epsdp_to_gdp: eps must be nonnegative");
    if (eps == 0.0) return 0.0;
    return -2.0 * norm_quantile(1.0 / (1.0 + std::exp(eps)));
}

/// Inverse of epsdp_to_gdp: eps = log[(1 - Phi(-mu/2)) / Phi(-mu/2)].
inline double gdp_to_epsdp(double mu) {
    if (!(mu > 0.0)) throw std::domain_error("gdp_to_epsdp: mu must be positive");
    double p = norm_cdf(-mu / 2.0);
    return std::log((1.0 - p) / p);
}

}  // namespace mgdp
