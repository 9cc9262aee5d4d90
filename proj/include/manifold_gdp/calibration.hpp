#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "manifold_gdp/gdp.hpp"
#include "manifold_gdp/geometry.hpp"
#include "manifold_gdp/samplers.hpp"

namespace mgdp {

/// Full input of the Monte-Carlo budget computation.
struct CalibrationConfig {
    double delta_sens = 0.0;    // global sensitivity Delta
    double sigma = 0.0;         // rate of the Gaussian noise
    std::size_t n = 1000;       // Monte-Carlo sample size per replicate
    std::size_t n_eps = 1000;   // eps-grid size
    double eps_max = 0.0;       // 0 selects the per-manifold default
    std::size_t m = 100;        // replicates
    std::uint64_t seed = 0;

    void validate() const {
        if (!(delta_sens > 0.0)) throw std::invalid_argument("CalibrationConfig: delta_sens > 0");
        if (!(sigma > 0.0)) throw std::invalid_argument("CalibrationConfig: sigma > 0");
        if (n < 1 || n_eps < 1 || m < 1)
            throw std::invalid_argument("CalibrationConfig: counts must be >= 1");
    }
};

/// Values over the eps grid {k, 2k, ..., n_eps * k}; the grid excludes 0 and
/// its last point is eps_max.
struct EpsCurve {
    std::vector<double> eps;
    std::vector<double> value;
};

/// Default eps_max: pi*Delta/(2 sigma^2) on the circle (the closed form is
/// only defined there), max{10, 5/sigma + Delta^2/(2 sigma^2)} elsewhere.
inline double default_eps_max(const ManifoldSpec& m, double delta_sens, double sigma) {
    if (m.kind == ManifoldKind::circle) return pi * delta_sens / (2.0 * sigma * sigma);
    return std::max(10.0, 5.0 / sigma + delta_sens * delta_sens / (2.0 * sigma * sigma));
}

/// Worst-pair privacy profile of the Riemannian Gaussian on the circle, in
/// closed form. Defined for Delta in (0, pi] and eps in [0, pi*Delta/(2 sigma^2)].
inline double h_s1(double sigma, double eps, double delta_sens) {
    if (!(sigma > 0.0)) throw std::domain_error("h_s1: sigma must be positive");
    if (!(delta_sens > 0.0 && delta_sens <= pi))
        throw std::domain_error("h_s1: delta_sens must lie in (0, pi]");
    const double eps_max = pi * delta_sens / (2.0 * sigma * sigma);
    if (eps < 0.0 || eps > eps_max * (1.0 + 1e-12) + 1e-300)
        throw std::domain_error("h_s1: eps outside [0, pi*Delta/(2 sigma^2)]");

    const double C = norm_cdf(pi / sigma) - norm_cdf(-pi / sigma);
    const double se_d = sigma * eps / delta_sens;
    const double d_2s = delta_sens / (2.0 * sigma);
    const double p_s = pi / sigma;
    const double e_eps = std::exp(eps);
    const bool near = eps <= delta_sens * delta_sens / (2.0 * sigma * sigma);

    double first = norm_cdf(-se_d + d_2s) - e_eps * norm_cdf(-se_d - d_2s);
    double second = norm_cdf(se_d + d_2s - p_s) -
                    e_eps * norm_cdf(se_d - d_2s + (near ? p_s : -p_s));
    return (first - second) / C - (near ? e_eps : 0.0);
}

/// On Euclidean space the budget is exactly Delta / sigma.
inline PrivacyBudget calibrate_euclidean(double delta_sens, double sigma) {
    if (!(delta_sens > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("calibrate_euclidean: inputs must be positive");
    return {delta_sens / sigma, BudgetMethod::closed_form, std::nullopt};
}

/// Analytic budget on the circle: the largest mu forced by the closed-form
/// profile over the eps grid. Grid points with a nonpositive profile value
/// impose no constraint.
inline PrivacyBudget calibrate_s1(double delta_sens, double sigma, std::size_t n_eps) {
    if (!(delta_sens > 0.0 && delta_sens <= pi))
        throw std::invalid_argument("calibrate_s1: delta_sens must lie in (0, pi]");
    if (!(sigma > 0.0) || n_eps < 1) throw std::invalid_argument("calibrate_s1: bad parameters");
    const double eps_max = pi * delta_sens / (2.0 * sigma * sigma);
    double mu = 0.0;
    for (std::size_t i = 1; i <= n_eps; ++i) {
        double eps = eps_max * static_cast<double>(i) / static_cast<double>(n_eps);
        double l = h_s1(sigma, eps, delta_sens);
        if (l <= 0.0) continue;
        mu = std::max(mu, solve_mu(eps, l));
    }
    return {mu, BudgetMethod::analytic_s1, std::nullopt};
}

namespace detail {

// delta_mu must be nondecreasing in mu for solve_mu to be meaningful;
// verified once on a coarse grid before any Monte-Carlo calibration runs.
inline void check_delta_mu_monotone() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        for (int ei = 0; ei <= 10; ++ei) {
            double eps = static_cast<double>(ei);
            double prev = 0.0;
            for (int mi = 1; mi <= 100; ++mi) {
                double mu = 0.1 * static_cast<double>(mi);
                double d = delta_mu(mu, eps);
                if (d < prev - 1e-12 || d < -1e-12 || d >= 1.0)
                    throw std::logic_error(
                        "delta_mu monotonicity check failed: profile is not "
                        "nondecreasing in mu on the verification grid");
                prev = std::max(prev, d);
            }
        }
    });
}

// Largest mu over the grid forced by one profile curve, with pruning: a grid
// point can only improve on `best` if its value exceeds delta_best(eps).
// A saturated estimate (every indicator set, none on the other side) is
// capped just below 1, the resolution limit of the inversion.
inline double max_budget_over_grid(const std::vector<double>& eps_grid,
                                   const std::vector<double>& curve) {
    double best = 0.0;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        double l = std::min(curve[i], 1.0 - 1e-12);
        if (l <= 0.0) continue;
        if (best > 0.0 && l <= delta_mu(best, eps_grid[i])) continue;
        best = std::max(best, solve_mu(eps_grid[i], l));
    }
    return best;
}

}  // namespace detail

/// Result of the Monte-Carlo calibration. `budget` follows the verbatim
/// procedure (profile averaged over replicates, then inverted); the curves
/// and per-replicate budgets are exposed for reporting and validation.
struct McmcCalibration {
    PrivacyBudget budget;
    EpsCurve profile;                     // averaged l_eps
    std::vector<double> profile_se;       // standard error over replicates
    std::vector<double> replicate_budgets;
    double eps_max;
    Point eta1, eta2;
};

/// Monte-Carlo budget computation on a constant-curvature space: draw a pair
/// of footprints at distance Delta, estimate the privacy profile by indicator
/// averages over m replicates of n Gaussian samples per footprint, and invert
/// the averaged profile over the eps grid. Replicates run concurrently on
/// derived seeds; results are keyed by replicate index, so the output does not
/// depend on thread scheduling.
inline McmcCalibration calibrate_mcmc(const ManifoldSpec& manifold, const CalibrationConfig& cfg,
                                      unsigned threads = 0) {
    cfg.validate();
    detail::check_delta_mu_monotone();
    if (manifold.compact() && !(cfg.delta_sens < manifold.injectivity_radius))
        throw std::invalid_argument("calibrate_mcmc: delta_sens must be below the injectivity radius");
    if (manifold.kind == ManifoldKind::circle && cfg.delta_sens > pi)
        throw std::invalid_argument("calibrate_mcmc: circle requires delta_sens in (0, pi]");

    const double eps_max = cfg.eps_max > 0.0 ? cfg.eps_max
                                             : default_eps_max(manifold, cfg.delta_sens, cfg.sigma);
    const std::size_t n_eps = cfg.n_eps;
    std::vector<double> eps_grid(n_eps);
    for (std::size_t i = 0; i < n_eps; ++i)
        eps_grid[i] = eps_max * static_cast<double>(i + 1) / static_cast<double>(n_eps);
    eps_grid.back() = eps_max;  // grid excludes 0 and ends exactly at eps_max

    RngStream pair_rng(derive_seed(cfg.seed, "calibrate-pair"));
    Point eta1 = random_point(manifold, pair_rng);
    Point eta2 = random_point_at_distance(manifold, eta1, cfg.delta_sens, pair_rng);

    const double two_sigma_sq = 2.0 * cfg.sigma * cfg.sigma;
    const std::size_t m = cfg.m;
    std::vector<std::vector<double>> curves(m);

    auto run_replicate = [&](std::size_t j) {
        RngStream rng(derive_seed(cfg.seed, "calibrate-rep", j));
        std::vector<double> d1(cfg.n), d2(cfg.n);
        auto score = [&](const Point& y) {
            double a = distance(manifold, eta2, y);
            double b = distance(manifold, eta1, y);
            return a * a - b * b;
        };
        if (manifold.kind == ManifoldKind::circle) {
            auto y1 = s1_exact_sample(eta1.coords[0], cfg.sigma, cfg.n, rng);
            auto y2 = s1_exact_sample(eta2.coords[0], cfg.sigma, cfg.n, rng);
            for (std::size_t i = 0; i < cfg.n; ++i) {
                d1[i] = score(circle_point(y1[i]));
                d2[i] = score(circle_point(y2[i]));
            }
        } else {
            RiemannianGaussian g1{manifold, eta1, cfg.sigma};
            RiemannianGaussian g2{manifold, eta2, cfg.sigma};
            auto s1 = mh_sample(g1, eta1, cfg.n, ChainConfig{}, rng).samples;
            auto s2 = mh_sample(g2, eta2, cfg.n, ChainConfig{}, rng).samples;
            for (std::size_t i = 0; i < cfg.n; ++i) {
                d1[i] = score(s1[i]);
                d2[i] = score(s2[i]);
            }
        }
        std::sort(d1.begin(), d1.end());
        std::sort(d2.begin(), d2.end());
        std::vector<double> curve(n_eps);
        const double inv_n = 1.0 / static_cast<double>(cfg.n);
        for (std::size_t i = 0; i < n_eps; ++i) {
            double thr = two_sigma_sq * eps_grid[i];
            // ties at the threshold fall inside the event (>=)
            auto c1 = d1.end() - std::lower_bound(d1.begin(), d1.end(), thr);
            auto c2 = d2.end() - std::lower_bound(d2.begin(), d2.end(), thr);
            curve[i] = inv_n * static_cast<double>(c1) -
                       std::exp(eps_grid[i]) * inv_n * static_cast<double>(c2);
        }
        curves[j] = std::move(curve);
    };

    unsigned nthreads = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(m));
    if (nthreads <= 1) {
        for (std::size_t j = 0; j < m; ++j) run_replicate(j);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t j = t; j < m; j += nthreads) run_replicate(j);
            });
        for (auto& th : pool) th.join();
    }

    EpsCurve profile{eps_grid, std::vector<double>(n_eps, 0.0)};
    std::vector<double> se(n_eps, 0.0);
    for (std::size_t i = 0; i < n_eps; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < m; ++j) mean += curves[j][i];
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double dlt = curves[j][i] - mean;
            var += dlt * dlt;
        }
        profile.value[i] = mean;
        se[i] = m > 1 ? std::sqrt(var / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
    }

    double mu = detail::max_budget_over_grid(eps_grid, profile.value);

    std::vector<double> rep_budgets(m);
    for (std::size_t j = 0; j < m; ++j)
        rep_budgets[j] = detail::max_budget_over_grid(eps_grid, curves[j]);
    double rmin = rep_budgets[0], rmax = rep_budgets[0], rmean = 0.0;
    for (double b : rep_budgets) {
        rmin = std::min(rmin, b);
        rmax = std::max(rmax, b);
        rmean += b;
    }
    rmean /= static_cast<double>(m);
    double rvar = 0.0;
    for (double b : rep_budgets) rvar += (b - rmean) * (b - rmean);
    double rsd = m > 1 ? std::sqrt(rvar / static_cast<double>(m - 1)) : 0.0;

    PrivacyBudget budget{mu, BudgetMethod::monte_carlo, BudgetSpread{rmin, rmax, rmean, rsd}};
    return {std::move(budget), std::move(profile), std::move(se), std::move(rep_budgets),
            eps_max, std::move(eta1), std::move(eta2)};
}

}  // namespace mgdp
