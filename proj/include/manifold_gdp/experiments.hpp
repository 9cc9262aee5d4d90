#pragma once

#include <bit>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "manifold_gdp/calibration.hpp"
#include "manifold_gdp/mechanisms.hpp"
#include "manifold_gdp/version.hpp"

namespace mgdp {

/// Everything needed to reproduce one CLI invocation. Written as a '#'
/// comment block at the top of every CSV; identical invocations produce
/// byte-identical files (the timestamp defaults to a fixed placeholder and is
/// only set when given explicitly).
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> params;
    std::uint64_t seed = 0;
    std::string timestamp = "unspecified";
    std::string out_path;

    void add(std::string key, std::string value) {
        params.emplace_back(std::move(key), std::move(value));
    }
};

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Rows are seeded by the sigma value itself, so a run restricted to a subset
// of sigmas reproduces exactly the rows of the full sweep.
inline std::uint64_t sigma_key(double sigma) { return std::bit_cast<std::uint64_t>(sigma); }

inline void write_manifest(std::ostream& os, const RunManifest& mf) {
    os << "# manifold-gdp " << library_version << "\n";
    os << "# subcommand: " << mf.subcommand << "\n";
    for (const auto& [k, v] : mf.params) os << "# " << k << ": " << v << "\n";
    os << "# seed: " << mf.seed << "\n";
    os << "# timestamp: " << mf.timestamp << "\n";
    os << "# out: " << mf.out_path << "\n";
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> footer;  // extra '#' lines after the data
};

inline void write_csv(std::ostream& os, const RunManifest& mf, const CsvTable& table) {
    write_manifest(os, mf);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
    for (const auto& row : table.rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
    for (const auto& line : table.footer) os << "# " << line << "\n";
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateRequest {
    ManifoldSpec manifold;
    double delta_sens;
    double sigma;
    std::string method = "auto";  // auto|analytic|mcmc|closed-form
    CalibrationConfig mcmc;       // n, n_eps, eps_max, m taken from here
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

inline std::string resolve_method(const std::string& method, const ManifoldSpec& m) {
    if (method != "auto") return method;
    switch (m.kind) {
        case ManifoldKind::euclidean: return "closed-form";
        case ManifoldKind::circle: return "analytic";
        default: return "mcmc";
    }
}

inline CsvTable run_calibrate(const CalibrateRequest& req) {
    std::string method = resolve_method(req.method, req.manifold);
    PrivacyBudget budget;
    if (method == "closed-form") {
        if (req.manifold.kind != ManifoldKind::euclidean)
            throw std::invalid_argument("closed-form calibration requires a euclidean manifold");
        budget = calibrate_euclidean(req.delta_sens, req.sigma);
    } else if (method == "analytic") {
        if (req.manifold.kind != ManifoldKind::circle)
            throw std::invalid_argument("analytic calibration requires the circle");
        budget = calibrate_s1(req.delta_sens, req.sigma, req.mcmc.n_eps);
    } else if (method == "mcmc") {
        CalibrationConfig cfg = req.mcmc;
        cfg.delta_sens = req.delta_sens;
        cfg.sigma = req.sigma;
        cfg.seed = req.seed;
        budget = calibrate_mcmc(req.manifold, cfg, req.threads).budget;
    } else {
        throw std::invalid_argument("unknown calibration method: " + method);
    }
    double mu_min = budget.spread ? budget.spread->min : budget.mu;
    double mu_max = budget.spread ? budget.spread->max : budget.mu;
    CsvTable t;
    t.columns = {"manifold", "dim", "delta", "sigma", "method", "mu", "mu_min", "mu_max", "seed"};
    t.rows.push_back({to_string(req.manifold.kind), std::to_string(req.manifold.dim),
                      format_double(req.delta_sens), format_double(req.sigma), method,
                      format_double(budget.mu), format_double(mu_min), format_double(mu_max),
                      std::to_string(req.seed)});
    return t;
}

// ---------------------------------------------------------------------------
// fig1-budget: exact and Monte-Carlo budgets over sigma = k/4, k = 1..16

struct Fig1Request {
    ManifoldKind target = ManifoldKind::circle;  // circle or euclidean
    double delta_sens = 1.0;
    std::size_t runs = 20;       // independent Monte-Carlo runs per sigma
    CalibrationConfig mcmc;      // n, n_eps, m per run
    std::vector<double> sigmas;  // empty selects k/4, k = 1..16
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

inline CsvTable run_fig1_budget(const Fig1Request& req) {
    if (req.target != ManifoldKind::circle && req.target != ManifoldKind::euclidean)
        throw std::invalid_argument("fig1-budget target must be circle or euclidean");
    ManifoldSpec m = req.target == ManifoldKind::circle ? ManifoldSpec::circle()
                                                        : ManifoldSpec::euclidean(1);
    std::vector<double> sigmas = req.sigmas;
    if (sigmas.empty())
        for (int k = 1; k <= 16; ++k) sigmas.push_back(static_cast<double>(k) / 4.0);

    CsvTable t;
    t.columns = {"sigma", "mu_exact", "mu_mc_mean", "mu_mc_min", "mu_mc_max"};
    for (double sigma : sigmas) {
        double mu_exact = req.target == ManifoldKind::circle
                              ? calibrate_s1(req.delta_sens, sigma, req.mcmc.n_eps).mu
                              : req.delta_sens / sigma;
        double sum = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t run = 0; run < req.runs; ++run) {
            CalibrationConfig cfg = req.mcmc;
            cfg.delta_sens = req.delta_sens;
            cfg.sigma = sigma;
            cfg.seed = derive_seed(derive_seed(req.seed, "fig1-run", run), "sigma",
                                   sigma_key(sigma));
            double mu = calibrate_mcmc(m, cfg, req.threads).budget.mu;
            sum += mu;
            lo = run == 0 ? mu : std::min(lo, mu);
            hi = run == 0 ? mu : std::max(hi, mu);
        }
        double mean = sum / static_cast<double>(req.runs);
        t.rows.push_back({format_double(sigma), format_double(mu_exact), format_double(mean),
                          format_double(lo), format_double(hi)});
    }
    return t;
}

// ---------------------------------------------------------------------------
// sphere-utility: private Frechet mean release on S^2

struct SphereUtilityRequest {
    std::size_t n_points = 10;    // dataset size, fixes the sensitivity
    double ball_radius = pi / 8.0;
    std::size_t repetitions = 1000;
    CalibrationConfig mcmc;       // per-sigma budget computation
    std::vector<double> sigmas;   // empty selects k/4, k = 1..12
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct SphereUtilityRow {
    double sigma;
    double mu;
    double eps;
    double dist_gauss_mean, dist_gauss_se;
    double dist_laplace_mean, dist_laplace_se;
};

inline SphereUtilityRow sphere_utility_row(const SphereUtilityRequest& req, double sigma) {
    ManifoldSpec m = ManifoldSpec::sphere(2);
    const double delta = frechet_sensitivity(req.ball_radius, m.curvature, req.n_points);

    CalibrationConfig cfg = req.mcmc;
    cfg.delta_sens = delta;
    cfg.sigma = sigma;
    cfg.seed = derive_seed(derive_seed(req.seed, "sphere-cal", sigma_key(sigma)), "cal");
    PrivacyBudget budget = calibrate_mcmc(m, cfg, req.threads).budget;
    if (!(budget.mu > 0.0))
        throw std::runtime_error("sphere-utility: calibrated budget is zero");
    const double eps = gdp_to_epsdp(budget.mu);

    Point m0 = make_point(m, {1.0, 0.0, 0.0});
    const std::size_t reps = req.repetitions;
    std::vector<double> dg(reps), dl(reps);

    auto run_rep = [&](std::size_t r) {
        RngStream rng(derive_seed(derive_seed(req.seed, "sphere-rep", sigma_key(sigma)), "rep", r));
        DatasetSpec data{m, sample_ball(m, m0, req.ball_radius, req.n_points, rng), m0,
                         req.ball_radius};
        Point xbar = frechet_mean(data);
        MechanismOutput g = gaussian_mechanism(xbar, sigma, m, rng, budget);
        MechanismOutput l = laplace_mechanism(xbar, delta, eps, m, rng);
        dg[r] = distance(m, xbar, g.released);
        dl[r] = distance(m, xbar, l.released);
    };

    unsigned nthreads =
        req.threads > 0 ? req.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(reps));
    if (nthreads <= 1) {
        for (std::size_t r = 0; r < reps; ++r) run_rep(r);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < reps; r += nthreads) run_rep(r);
            });
        for (auto& th : pool) th.join();
    }

    auto mean_se = [&](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        double se = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1) /
                                             static_cast<double>(v.size()))
                                 : 0.0;
        return std::pair<double, double>{mean, se};
    };
    auto [gm, gs] = mean_se(dg);
    auto [lm, ls] = mean_se(dl);
    return {sigma, budget.mu, eps, gm, gs, lm, ls};
}

inline CsvTable run_sphere_utility(const SphereUtilityRequest& req) {
    std::vector<double> sigmas = req.sigmas;
    if (sigmas.empty())
        for (int k = 1; k <= 12; ++k) sigmas.push_back(static_cast<double>(k) / 4.0);
    CsvTable t;
    t.columns = {"sigma", "mu", "eps", "dist_gauss_mean", "dist_gauss_se",
                 "dist_laplace_mean", "dist_laplace_se"};
    for (double sigma : sigmas) {
        SphereUtilityRow r = sphere_utility_row(req, sigma);
        t.rows.push_back({format_double(r.sigma), format_double(r.mu), format_double(r.eps),
                          format_double(r.dist_gauss_mean), format_double(r.dist_gauss_se),
                          format_double(r.dist_laplace_mean), format_double(r.dist_laplace_se)});
    }
    return t;
}

// ---------------------------------------------------------------------------
// sample: raw draws for inspection

struct SampleRequest {
    ManifoldSpec manifold;
    MechanismKind dist = MechanismKind::gaussian;
    Point footprint;
    double rate = 1.0;
    std::size_t n = 100;
    std::string sampler = "mh";  // mh|exact
    ChainConfig chain;
    std::uint64_t seed = 0;
};

inline CsvTable run_sample(const SampleRequest& req) {
    validate_point(req.manifold, req.footprint);
    if (!(req.rate > 0.0)) throw std::invalid_argument("sample: rate must be positive");
    if (req.sampler != "mh" && req.sampler != "exact")
        throw std::invalid_argument("sample: sampler must be mh or exact");
    if (req.sampler == "exact" &&
        (req.manifold.kind != ManifoldKind::circle || req.dist != MechanismKind::gaussian))
        throw std::invalid_argument("sample: the exact sampler is only available for the "
                                    "gaussian distribution on the circle");

    CsvTable t;
    const int ad = req.manifold.ambient_dim();
    for (int i = 0; i < ad; ++i) t.columns.push_back("x" + std::to_string(i));

    RngStream rng(req.seed);
    auto push_point = [&](const Point& p) {
        std::vector<std::string> row;
        row.reserve(ad);
        for (int i = 0; i < ad; ++i) row.push_back(format_double(p.coords[i]));
        t.rows.push_back(std::move(row));
    };

    if (req.sampler == "exact") {
        for (double theta : s1_exact_sample(req.footprint.coords[0], req.rate, req.n, rng))
            push_point(circle_point(theta));
        return t;
    }
    McmcResult res;
    if (req.dist == MechanismKind::gaussian) {
        RiemannianGaussian d{req.manifold, req.footprint, req.rate};
        res = mh_sample(d, req.footprint, req.n, req.chain, rng);
    } else {
        RiemannianLaplace d{req.manifold, req.footprint, req.rate};
        res = mh_sample(d, req.footprint, req.n, req.chain, rng);
    }
    for (const auto& p : res.samples) push_point(p);
    t.footer.push_back("acceptance_rate: " + format_double(res.acceptance_rate));
    t.footer.push_back("proposal_scale: " + format_double(res.proposal_scale));
    return t;
}

}  // namespace mgdp
