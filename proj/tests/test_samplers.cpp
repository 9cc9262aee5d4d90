#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "manifold_gdp/samplers.hpp"
#include "support/oracles.hpp"

using namespace mgdp;

namespace {

const ManifoldSpec s2 = ManifoldSpec::sphere(2);
const ManifoldSpec s1 = ManifoldSpec::circle();

Point north() { return make_point(s2, {1, 0, 0}); }

}  // namespace

TEST_CASE("unnormalized log densities", "[samplers]") {
    RiemannianGaussian g{s2, north(), 1.0};
    CHECK(log_unnormalized_density(g, north()) == 0.0);
    Point q = make_point(s2, {0, 1, 0});  // a quarter circle away
    CHECK(log_unnormalized_density(g, q) == Catch::Approx(-pi * pi / 8.0).margin(1e-12));

    RiemannianLaplace l{s2, north(), 2.0};
    Point y = make_point(s2, {std::cos(1.0), std::sin(1.0), 0});
    CHECK(log_unnormalized_density(l, y) == Catch::Approx(-0.5).margin(1e-12));
}

TEST_CASE("exact circle sampler: range and moments", "[samplers]") {
    RngStream rng(101);
    const double sigma = 0.5;
    const std::size_t n = 10000;
    auto draws = s1_exact_sample(0.0, sigma, n, rng);
    REQUIRE(draws.size() == n);
    for (double t : draws) {
        CHECK(t > -pi);
        CHECK(t <= pi);
    }

    // symmetry: E[sin theta] = 0
    std::vector<double> sins, coss;
    for (double t : draws) {
        sins.push_back(std::sin(t));
        coss.push_back(std::cos(t));
    }
    double se_sin = oracles::sample_sd(sins) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(oracles::mean(sins)) < 3.0 * se_sin);

    // E[cos theta] against direct quadrature of the truncated normal law
    auto dens = [&](double x) { return std::exp(-x * x / (2.0 * sigma * sigma)); };
    double z = oracles::integrate(dens, -pi, pi);
    double expect_cos = oracles::integrate([&](double x) { return std::cos(x) * dens(x); }, -pi, pi) / z;
    double se_cos = oracles::sample_sd(coss) / std::sqrt(static_cast<double>(n));
    CHECK(oracles::mean(coss) == Catch::Approx(expect_cos).margin(3.0 * se_cos));

    // rotation by eta keeps the shape
    RngStream rng2(101);
    auto rotated = s1_exact_sample(1.2, sigma, 100, rng2);
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(detail::wrap_angle(rotated[i] - 1.2) == Catch::Approx(draws[i]).margin(1e-12));
}

TEST_CASE("MH concentrates for tiny rates", "[samplers]") {
    RiemannianGaussian g{s2, north(), 0.01};
    RngStream rng(7);
    auto res = mh_sample(g, north(), 500, ChainConfig{}, rng);
    REQUIRE(res.samples.size() == 500);
    for (const auto& y : res.samples) CHECK(distance(s2, north(), y) < 0.1);
}

TEST_CASE("MH is deterministic under a fixed seed", "[samplers]") {
    RiemannianGaussian g{s2, north(), 0.8};
    ChainConfig cfg;
    cfg.seed = 42;
    auto a = mh_sample(g, north(), 200, cfg);
    auto b = mh_sample(g, north(), 200, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        CHECK(a.samples[i].coords == b.samples[i].coords);
    CHECK(a.acceptance_rate == b.acceptance_rate);
}

TEST_CASE("MH matches the exact circle sampler (KS at 1%)", "[samplers][slow]") {
    const std::size_t n = 10000;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        RiemannianGaussian g{s1, circle_point(0.4), 0.5};
        ChainConfig cfg;
        cfg.burn_in = 2000;
        cfg.thin = 10;
        RngStream rng_mh(derive_seed(seed, "ks-mh"));
        auto chain = mh_sample(g, circle_point(0.4), n, cfg, rng_mh);
        std::vector<double> mh_angles;
        for (const auto& p : chain.samples) mh_angles.push_back(p.coords[0]);

        RngStream rng_ex(derive_seed(seed, "ks-exact"));
        auto exact = s1_exact_sample(0.4, 0.5, n, rng_ex);

        double d = oracles::ks_statistic(mh_angles, exact);
        CAPTURE(seed, d);
        CHECK(d < oracles::ks_critical_1pct(n, n));
    }
}

TEST_CASE("auto-tuned acceptance rate lands in [0.2, 0.6] on the sphere", "[samplers]") {
    for (double sigma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        RiemannianGaussian g{s2, north(), sigma};
        RngStream rng(derive_seed(11, "acc", static_cast<std::uint64_t>(sigma * 4)));
        auto res = mh_sample(g, north(), 2000, ChainConfig{}, rng);
        CAPTURE(sigma, res.acceptance_rate, res.proposal_scale);
        CHECK(res.acceptance_rate >= 0.2);
        CHECK(res.acceptance_rate <= 0.6);
    }
}

TEST_CASE("Laplace target: empirical median against quadrature", "[samplers][slow]") {
    const double b = 0.7;
    RiemannianLaplace l{s1, circle_point(0.0), b};
    ChainConfig cfg;
    cfg.burn_in = 2000;
    cfg.thin = 10;
    RngStream rng(909);
    auto chain = mh_sample(l, circle_point(0.0), 10000, cfg, rng);
    std::vector<double> dist_draws;
    for (const auto& p : chain.samples) dist_draws.push_back(std::abs(p.coords[0]));

    // median of the distance-from-footprint law, density ~ exp(-t/b) on [0, pi]
    auto dens = [&](double t) { return std::exp(-t / b); };
    double z = oracles::integrate(dens, 0.0, pi);
    double lo = 0.0, hi = pi;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (oracles::integrate(dens, 0.0, mid) < 0.5 * z ? lo : hi) = mid;
    }
    double med_oracle = 0.5 * (lo + hi);

    // sample-median SE ~ 1 / (2 f(med) sqrt(n_eff)); thinned draws still
    // carry some autocorrelation, so discount the sample size.
    double f_med = dens(med_oracle) / z;
    double n_eff = static_cast<double>(dist_draws.size()) / 3.0;
    double se = 1.0 / (2.0 * f_med * std::sqrt(n_eff));
    CHECK(oracles::median(dist_draws) == Catch::Approx(med_oracle).margin(3.0 * se));
}

TEST_CASE("MH on the hyperboloid", "[samplers]") {
    auto h2 = ManifoldSpec::hyperbolic(2);
    Point apex = make_point(h2, {1, 0, 0});

    RiemannianGaussian g{h2, apex, 0.01};
    RngStream rng(21);
    auto res = mh_sample(g, apex, 300, ChainConfig{}, rng);
    for (const auto& y : res.samples) {
        CHECK(distance(h2, apex, y) < 0.1);
        CHECK(std::abs(detail::minkowski_dot(y.coords, y.coords) + 1.0) < 1e-9);
    }

    // the Laplace density only normalizes below the volume growth rate
    RiemannianLaplace ok{h2, apex, 0.5};
    CHECK_NOTHROW(ok.validate());
    RiemannianLaplace improper{h2, apex, 1.5};
    CHECK_THROWS_AS(mh_sample(improper, apex, 10, ChainConfig{}, rng), std::invalid_argument);
}

TEST_CASE("exponential-wrapped proposal is symmetric on the sphere", "[samplers]") {
    // q(y|x) computed through log_x and q(x|y) through log_y must coincide:
    // the tangent norm, the exp-map Jacobian and the truncation mass all
    // depend on d(x, y) only.
    RngStream rng(313);
    const double scale = 0.9;
    for (int i = 0; i < 50; ++i) {
        Point x = random_point(s2, rng);
        Point y = random_point(s2, rng);
        double txy = tangent_norm(s2, log_map(s2, x, y));
        double tyx = tangent_norm(s2, log_map(s2, y, x));
        CHECK(std::abs(txy - tyx) < 1e-12);
        auto qdens = [&](double t) {
            double gauss = std::exp(-t * t / (2.0 * scale * scale)) / (2.0 * pi * scale * scale);
            return gauss * (t / std::sin(t));  // inverse exp-map Jacobian on S^2
        };
        CHECK(qdens(txy) == Catch::Approx(qdens(tyx)).epsilon(1e-12));
    }
}
