#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "manifold_gdp/geometry.hpp"
#include "manifold_gdp/rng.hpp"

namespace mgdp {

/// Density proportional to exp(-d(y, footprint)^2 / (2 rate^2)) w.r.t. the
/// Riemannian measure; the normalizing constant is never materialized.
struct RiemannianGaussian {
    ManifoldSpec manifold;
    Point footprint;
    double rate;  // sigma > 0

    void validate() const {
        if (!(rate > 0.0)) throw std::invalid_argument("RiemannianGaussian: rate must be positive");
        validate_point(manifold, footprint);
    }
};

/// Density proportional to exp(-d(y, footprint) / rate). On hyperbolic space
/// the volume element grows like e^{(d-1) t}, so the density is only
/// normalizable for rate < 1/(d-1).
struct RiemannianLaplace {
    ManifoldSpec manifold;
    Point footprint;
    double rate;  // b > 0

    void validate() const {
        if (!(rate > 0.0)) throw std::invalid_argument("RiemannianLaplace: rate must be positive");
        validate_point(manifold, footprint);
        if (manifold.kind == ManifoldKind::hyperbolic && manifold.dim >= 2 &&
            rate >= 1.0 / static_cast<double>(manifold.dim - 1))
            throw std::invalid_argument(
                "RiemannianLaplace: not normalizable on hyperbolic space at this rate");
    }
};

inline double log_unnormalized_density(const RiemannianGaussian& g, const Point& y) {
    double d = distance(g.manifold, g.footprint, y);
    return -d * d / (2.0 * g.rate * g.rate);
}

inline double log_unnormalized_density(const RiemannianLaplace& l, const Point& y) {
    return -distance(l.manifold, l.footprint, y) / l.rate;
}

/// Metropolis-Hastings chain parameters. proposal_scale = 0 selects the
/// automatic scale: start at the target rate, then halve/double up to five
/// times during burn-in until the acceptance rate lands in [0.2, 0.6].
struct ChainConfig {
    std::size_t burn_in = 1000;
    std::size_t thin = 5;
    double proposal_scale = 0.0;
    std::uint64_t seed = 0;
};

struct McmcResult {
    std::vector<Point> samples;
    double acceptance_rate;   // over post-burn-in proposals
    double proposal_scale;    // scale actually used after tuning
};

namespace detail {

// One MH step with the exponential-wrapped proposal. The proposal density
// depends only on d(x, y) - equal tangent norms, equal exp-map Jacobians and
// a base-independent truncation mass - so q(y|x) = q(x|y) and the Hastings
// ratio reduces to p(y)/p(x). Proposals beyond the injectivity radius count
// as rejections.
template <class Dist>
bool mh_step(const Dist& dist, Point& x, double& logp_x, double scale, RngStream& rng) {
    TangentVector v = draw_tangent_gaussian(dist.manifold, x, scale, rng);
    double u = rng.uniform();  // drawn unconditionally to keep the stream aligned
    if (tangent_norm(dist.manifold, v) >= dist.manifold.injectivity_radius) return false;
    Point y = exp_map(dist.manifold, v);
    double logp_y = log_unnormalized_density(dist, y);
    if (std::log(u) <= logp_y - logp_x) {
        x = std::move(y);
        logp_x = logp_y;
        return true;
    }
    return false;
}

}  // namespace detail

/// Collects n states from a Metropolis-Hastings chain targeting `dist`,
/// after burn_in steps and keeping every thin-th state. Identical seeds give
/// bit-identical chains.
template <class Dist>
McmcResult mh_sample(const Dist& dist, const Point& init, std::size_t n, const ChainConfig& cfg,
                     RngStream& rng) {
    if (cfg.thin < 1) throw std::invalid_argument("mh_sample: thin must be >= 1");
    dist.validate();
    double scale = cfg.proposal_scale > 0.0 ? cfg.proposal_scale : dist.rate;
    const bool autotune = cfg.proposal_scale <= 0.0;

    Point x = init;
    validate_point(dist.manifold, x);
    double logp = log_unnormalized_density(dist, x);

    // Burn-in, with acceptance-driven scale adaptation in six segments.
    if (cfg.burn_in > 0) {
        const std::size_t segments = autotune ? 6 : 1;
        const std::size_t seg_len = std::max<std::size_t>(1, cfg.burn_in / segments);
        std::size_t done = 0;
        int adjustments = 0;
        for (std::size_t s = 0; s < segments && done < cfg.burn_in; ++s) {
            std::size_t len = std::min(seg_len, cfg.burn_in - done);
            if (s + 1 == segments) len = cfg.burn_in - done;
            std::size_t accepted = 0;
            for (std::size_t i = 0; i < len; ++i)
                accepted += detail::mh_step(dist, x, logp, scale, rng) ? 1 : 0;
            done += len;
            if (autotune && adjustments < 5) {
                double rate = static_cast<double>(accepted) / static_cast<double>(len);
                if (rate < 0.2) {
                    scale *= 0.5;
                    ++adjustments;
                } else if (rate > 0.6) {
                    scale *= 2.0;
                    ++adjustments;
                }
            }
        }
    }

    McmcResult out;
    out.samples.reserve(n);
    std::size_t proposals = 0, accepted = 0;
    while (out.samples.size() < n) {
        for (std::size_t t = 0; t < cfg.thin; ++t) {
            accepted += detail::mh_step(dist, x, logp, scale, rng) ? 1 : 0;
            ++proposals;
        }
        out.samples.push_back(x);
    }
    out.acceptance_rate = proposals ? static_cast<double>(accepted) / proposals : 0.0;
    out.proposal_scale = scale;
    return out;
}

template <class Dist>
McmcResult mh_sample(const Dist& dist, const Point& init, std::size_t n, const ChainConfig& cfg) {
    RngStream rng(cfg.seed);
    return mh_sample(dist, init, n, cfg, rng);
}

/// Exact i.i.d. draws from the Riemannian Gaussian on the circle: a normal
/// truncated to (-pi, pi] by inverse CDF, rotated by eta and wrapped.
inline std::vector<double> s1_exact_sample(double eta, double sigma, std::size_t n,
                                           RngStream& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("s1_exact_sample: sigma must be positive");
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = rng.truncated_normal(sigma, -pi, pi);
        out.push_back(detail::wrap_angle(eta + x));
    }
    return out;
}

}  // namespace mgdp
