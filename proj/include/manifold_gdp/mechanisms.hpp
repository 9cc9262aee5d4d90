#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "manifold_gdp/calibration.hpp"
#include "manifold_gdp/gdp.hpp"
#include "manifold_gdp/geometry.hpp"
#include "manifold_gdp/samplers.hpp"

namespace mgdp {

/// Largest admissible data-ball radius for existence, uniqueness and the
/// sensitivity bound of the Frechet mean.
inline double frechet_radius_limit(double kappa) {
    if (kappa > 0.0) return pi / (2.0 * std::sqrt(kappa)) / 2.0;
    return std::numeric_limits<double>::infinity();
}

/// Dataset together with the ball certificate required by the mean release.
struct DatasetSpec {
    ManifoldSpec manifold;
    std::vector<Point> points;
    Point center;   // m0
    double radius;  // r

    void validate() const {
        double rstar = frechet_radius_limit(manifold.curvature);
        rstar = std::min(rstar, manifold.injectivity_radius / 2.0);
        if (!(radius > 0.0) || !(radius < rstar))
            throw std::invalid_argument("DatasetSpec: radius outside (0, r*)");
        for (const auto& p : points)
            if (distance(manifold, center, p) > radius + 1e-9)
                throw std::invalid_argument("DatasetSpec: point outside the data ball");
    }
};

enum class MechanismKind { gaussian, laplace };

inline const char* to_string(MechanismKind k) {
    return k == MechanismKind::gaussian ? "gaussian" : "laplace";
}

struct MechanismOutput {
    Point released;
    MechanismKind mechanism;
    double noise_param;  // sigma or b
    PrivacyBudget budget;
};

struct FrechetNonConvergence : std::runtime_error {
    double gradient_norm;
    explicit FrechetNonConvergence(double g)
        : std::runtime_error("frechet_mean: no convergence after max_iter, gradient norm " +
                             std::to_string(g)),
          gradient_norm(g) {}
};

/// Minimizer of the sum of squared distances to the data, by intrinsic
/// gradient descent: x <- exp_x(step * mean_i log_x(x_i)) until the mean
/// gradient norm drops below tol.
inline Point frechet_mean(const DatasetSpec& data, double step = 1.0, double tol = 1e-9,
                          std::size_t max_iter = 1000) {
    data.validate();
    if (data.points.empty()) throw std::invalid_argument("frechet_mean: empty dataset");
    const ManifoldSpec& m = data.manifold;
    Point x = data.points.front();
    double grad_norm = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.coords.size());
        for (const auto& p : data.points) g += log_map(m, x, p).vec;
        g /= static_cast<double>(data.points.size());
        grad_norm = tangent_norm(m, {x, g});
        if (grad_norm < tol) return x;
        x = exp_map(m, {x, step * g});
    }
    throw FrechetNonConvergence(grad_norm);
}

/// Sensitivity of the Frechet mean of n points in a ball of radius r:
/// 2r(2 - h)/(n h) with h = 2r sqrt(kappa) cot(2r sqrt(kappa)) for kappa > 0
/// and h = 1 otherwise.
inline double frechet_sensitivity(double r, double kappa, std::size_t n) {
    if (n < 1) throw std::invalid_argument("frechet_sensitivity: n must be >= 1");
    if (!(r > 0.0) || !(r < frechet_radius_limit(kappa)))
        throw std::invalid_argument("frechet_sensitivity: r outside the admissible range");
    double h = 1.0;
    if (kappa > 0.0) {
        double a = 2.0 * r * std::sqrt(kappa);
        h = a / std::tan(a);
    }
    return 2.0 * r * (2.0 - h) / (static_cast<double>(n) * h);
}

namespace detail {

inline Point draw_riemannian_gaussian(const ManifoldSpec& m, const Point& footprint, double sigma,
                                      RngStream& rng) {
    if (m.kind == ManifoldKind::circle)
        return circle_point(s1_exact_sample(footprint.coords[0], sigma, 1, rng).front());
    RiemannianGaussian g{m, footprint, sigma};
    return mh_sample(g, footprint, 1, ChainConfig{}, rng).samples.front();
}

inline Point draw_riemannian_laplace(const ManifoldSpec& m, const Point& footprint, double b,
                                     RngStream& rng) {
    RiemannianLaplace l{m, footprint, b};
    return mh_sample(l, footprint, 1, ChainConfig{}, rng).samples.front();
}

}  // namespace detail

/// One draw from the Riemannian Gaussian centered at xbar, with the budget
/// supplied by the caller (e.g. calibrated once and reused across draws).
inline MechanismOutput gaussian_mechanism(const Point& xbar, double sigma, const ManifoldSpec& m,
                                          RngStream& rng, PrivacyBudget budget) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_mechanism: sigma must be positive");
    validate_point(m, xbar);
    return {detail::draw_riemannian_gaussian(m, xbar, sigma, rng), MechanismKind::gaussian, sigma,
            std::move(budget)};
}

/// One draw from the Riemannian Gaussian with the budget computed on the
/// spot: closed form on Euclidean space, the analytic circle routine, or the
/// Monte-Carlo calibration elsewhere (seeded from the supplied stream).
inline MechanismOutput gaussian_mechanism(const Point& xbar, double sigma, double delta_sens,
                                          const ManifoldSpec& m, RngStream& rng,
                                          std::size_t n_eps = 1000) {
    PrivacyBudget budget;
    switch (m.kind) {
        case ManifoldKind::euclidean: budget = calibrate_euclidean(delta_sens, sigma); break;
        case ManifoldKind::circle: budget = calibrate_s1(delta_sens, sigma, n_eps); break;
        default: {
            CalibrationConfig cfg;
            cfg.delta_sens = delta_sens;
            cfg.sigma = sigma;
            cfg.seed = rng.next_u64();
            budget = calibrate_mcmc(m, cfg).budget;
        }
    }
    return gaussian_mechanism(xbar, sigma, m, rng, std::move(budget));
}

/// One draw from the Riemannian Laplace law with rate Delta/eps; the attached
/// budget is the GDP guarantee implied by eps-DP.
inline MechanismOutput laplace_mechanism(const Point& xbar, double delta_sens, double eps,
                                         const ManifoldSpec& m, RngStream& rng) {
    if (!(eps > 0.0)) throw std::invalid_argument("laplace_mechanism: eps must be positive");
    if (!(delta_sens > 0.0))
        throw std::invalid_argument("laplace_mechanism: delta_sens must be positive");
    validate_point(m, xbar);
    double b = delta_sens / eps;
    PrivacyBudget budget{epsdp_to_gdp(eps), BudgetMethod::closed_form, std::nullopt};
    return {detail::draw_riemannian_laplace(m, xbar, b, rng), MechanismKind::laplace, b,
            std::move(budget)};
}

}  // namespace mgdp
