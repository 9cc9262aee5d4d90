// Command-line harness for Riemannian GDP calibration, sampling and the
// private Frechet mean experiments. Every subcommand writes CSV with a
// manifest header block; identical invocations produce identical files.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "manifold_gdp/manifold_gdp.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

mgdp::ManifoldSpec parse_manifold(const std::string& name, int dim) {
    using mgdp::ManifoldSpec;
    if (name == "euclidean") return ManifoldSpec::euclidean(dim);
    if (name == "circle") {
        if (dim != 1) throw std::invalid_argument("circle requires --dim 1");
        return ManifoldSpec::circle();
    }
    if (name == "sphere") return ManifoldSpec::sphere(dim);
    if (name == "hyperbolic") return ManifoldSpec::hyperbolic(dim);
    throw std::invalid_argument("unknown manifold: " + name);
}

mgdp::Point parse_footprint(const mgdp::ManifoldSpec& m, const std::string& text) {
    if (text.empty()) {
        // canonical base point per manifold kind
        switch (m.kind) {
            case mgdp::ManifoldKind::circle: return mgdp::circle_point(0.0);
            case mgdp::ManifoldKind::euclidean: return {Eigen::VectorXd::Zero(m.dim)};
            default: {
                Eigen::VectorXd x = Eigen::VectorXd::Zero(m.dim + 1);
                x[0] = 1.0;
                return {x};
            }
        }
    }
    std::vector<double> cs;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) cs.push_back(std::stod(tok));
    if (static_cast<int>(cs.size()) != m.ambient_dim())
        throw std::invalid_argument("footprint has wrong number of coordinates");
    Eigen::VectorXd x(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) x[static_cast<Eigen::Index>(i)] = cs[i];
    mgdp::Point p{std::move(x)};
    mgdp::validate_point(m, p);
    return p;
}

void emit(const std::string& out_path, const mgdp::RunManifest& mf, const mgdp::CsvTable& table) {
    if (out_path.empty() || out_path == "-") {
        mgdp::write_csv(std::cout, mf, table);
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot open output file: " + out_path);
    mgdp::write_csv(os, mf, table);
}

std::string fmt(double v) { return mgdp::format_double(v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian differential privacy on constant-curvature manifolds"};
    app.require_subcommand(1);

    // shared options, duplicated per subcommand so each --help is complete
    struct Common {
        std::uint64_t seed = 0;
        std::string out = "-";
        std::string timestamp = "unspecified";
        unsigned threads = 0;
    };

    auto add_common = [](CLI::App* cmd, Common& c) {
        cmd->add_option("--seed", c.seed, "Master seed");
        cmd->add_option("--out", c.out, "Output CSV path ('-' for stdout)");
        cmd->add_option("--timestamp", c.timestamp,
                        "Timestamp recorded in the manifest (kept fixed by default so reruns "
                        "are byte-identical)");
        cmd->add_option("--threads", c.threads, "Cap on worker threads (0 = hardware)");
    };

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "Compute the privacy budget mu for a rate sigma");
    std::string cal_manifold = "euclidean";
    int cal_dim = 1;
    double cal_delta = 1.0, cal_sigma = 1.0;
    std::string cal_method = "auto";
    mgdp::CalibrationConfig cal_cfg;
    Common cal_common;
    cal->add_option("--manifold", cal_manifold, "euclidean|circle|sphere|hyperbolic");
    cal->add_option("--dim", cal_dim, "Intrinsic dimension");
    cal->add_option("--delta", cal_delta, "Global sensitivity");
    cal->add_option("--sigma", cal_sigma, "Gaussian rate");
    cal->add_option("--method", cal_method, "auto|analytic|mcmc|closed-form");
    cal->add_option("--n", cal_cfg.n, "Monte-Carlo sample size");
    cal->add_option("--n-eps", cal_cfg.n_eps, "Size of the eps grid");
    cal->add_option("--eps-max", cal_cfg.eps_max, "Largest eps (0 = per-manifold default)");
    cal->add_option("--m", cal_cfg.m, "Monte-Carlo replicates");
    add_common(cal, cal_common);

    // ---- fig1-budget ----
    auto* fig = app.add_subcommand(
        "fig1-budget", "Exact vs Monte-Carlo budgets over sigma = k/4, k = 1..16");
    std::string fig_target = "circle";
    std::size_t fig_runs = 20;
    std::vector<double> fig_sigmas;
    mgdp::CalibrationConfig fig_cfg;
    Common fig_common;
    fig->add_option("--target", fig_target, "circle|euclidean");
    fig->add_option("--runs", fig_runs, "Monte-Carlo runs per sigma");
    fig->add_option("--sigma", fig_sigmas, "Restrict to these sigma values");
    fig->add_option("--n", fig_cfg.n, "Monte-Carlo sample size");
    fig->add_option("--n-eps", fig_cfg.n_eps, "Size of the eps grid");
    fig->add_option("--m", fig_cfg.m, "Monte-Carlo replicates per run");
    add_common(fig, fig_common);

    // ---- sphere-utility ----
    auto* sph = app.add_subcommand(
        "sphere-utility", "Gaussian vs Laplace release of the Frechet mean on S^2");
    std::size_t sph_n = 10, sph_reps = 1000;
    double sph_radius = mgdp::pi / 8.0;
    std::vector<double> sph_sigmas;
    mgdp::CalibrationConfig sph_cfg;
    Common sph_common;
    sph->add_option("--n-points", sph_n, "Dataset size");
    sph->add_option("--radius", sph_radius, "Data ball radius");
    sph->add_option("--repetitions", sph_reps, "Experiment repetitions per sigma");
    sph->add_option("--sigma", sph_sigmas, "Restrict to these sigma values (default k/4, k=1..12)");
    sph->add_option("--n", sph_cfg.n, "Monte-Carlo sample size for calibration");
    sph->add_option("--n-eps", sph_cfg.n_eps, "Size of the eps grid");
    sph->add_option("--m", sph_cfg.m, "Monte-Carlo replicates for calibration");
    add_common(sph, sph_common);

    // ---- sample ----
    auto* smp = app.add_subcommand("sample", "Draw from a Riemannian Gaussian or Laplace");
    std::string smp_manifold = "sphere";
    int smp_dim = 2;
    std::string smp_dist = "gaussian", smp_footprint, smp_sampler = "mh";
    double smp_rate = 1.0;
    std::size_t smp_n = 100;
    mgdp::ChainConfig smp_chain;
    Common smp_common;
    smp->add_option("--manifold", smp_manifold, "euclidean|circle|sphere|hyperbolic");
    smp->add_option("--dim", smp_dim, "Intrinsic dimension");
    smp->add_option("--dist", smp_dist, "gaussian|laplace");
    smp->add_option("--footprint", smp_footprint, "Comma-separated ambient coordinates");
    smp->add_option("--rate", smp_rate, "sigma (gaussian) or b (laplace)");
    smp->add_option("--n", smp_n, "Number of draws");
    smp->add_option("--sampler", smp_sampler, "mh|exact (exact: gaussian on the circle only)");
    smp->add_option("--burn-in", smp_chain.burn_in, "MH burn-in steps");
    smp->add_option("--thin", smp_chain.thin, "MH thinning");
    smp->add_option("--proposal-scale", smp_chain.proposal_scale,
                    "MH proposal scale (0 = auto-tuned)");
    add_common(smp, smp_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (cal->parsed()) {
            mgdp::CalibrateRequest req{parse_manifold(cal_manifold, cal_dim), cal_delta,
                                       cal_sigma,   cal_method,
                                       cal_cfg,     cal_common.seed,
                                       cal_common.threads};
            mgdp::CsvTable table = run_calibrate(req);
            mgdp::RunManifest mf;
            mf.subcommand = "calibrate";
            mf.add("manifold", cal_manifold);
            mf.add("dim", std::to_string(cal_dim));
            mf.add("delta", fmt(cal_delta));
            mf.add("sigma", fmt(cal_sigma));
            mf.add("method", cal_method);
            mf.add("n", std::to_string(cal_cfg.n));
            mf.add("n_eps", std::to_string(cal_cfg.n_eps));
            mf.add("eps_max", fmt(cal_cfg.eps_max));
            mf.add("m", std::to_string(cal_cfg.m));
            mf.seed = cal_common.seed;
            mf.timestamp = cal_common.timestamp;
            mf.out_path = cal_common.out;
            emit(cal_common.out, mf, table);
        } else if (fig->parsed()) {
            mgdp::Fig1Request req;
            req.target = fig_target == "euclidean" ? mgdp::ManifoldKind::euclidean
                                                   : mgdp::ManifoldKind::circle;
            if (fig_target != "euclidean" && fig_target != "circle")
                throw std::invalid_argument("--target must be circle or euclidean");
            req.runs = fig_runs;
            req.mcmc = fig_cfg;
            req.sigmas = fig_sigmas;
            req.seed = fig_common.seed;
            req.threads = fig_common.threads;
            mgdp::CsvTable table = run_fig1_budget(req);
            mgdp::RunManifest mf;
            mf.subcommand = "fig1-budget";
            mf.add("target", fig_target);
            mf.add("delta", fmt(req.delta_sens));
            mf.add("runs", std::to_string(fig_runs));
            mf.add("n", std::to_string(fig_cfg.n));
            mf.add("n_eps", std::to_string(fig_cfg.n_eps));
            mf.add("m", std::to_string(fig_cfg.m));
            mf.seed = fig_common.seed;
            mf.timestamp = fig_common.timestamp;
            mf.out_path = fig_common.out;
            emit(fig_common.out, mf, table);
        } else if (sph->parsed()) {
            mgdp::SphereUtilityRequest req;
            req.n_points = sph_n;
            req.ball_radius = sph_radius;
            req.repetitions = sph_reps;
            req.mcmc = sph_cfg;
            req.sigmas = sph_sigmas;
            req.seed = sph_common.seed;
            req.threads = sph_common.threads;
            mgdp::CsvTable table = run_sphere_utility(req);
            mgdp::RunManifest mf;
            mf.subcommand = "sphere-utility";
            mf.add("n_points", std::to_string(sph_n));
            mf.add("radius", fmt(sph_radius));
            mf.add("repetitions", std::to_string(sph_reps));
            mf.add("n", std::to_string(sph_cfg.n));
            mf.add("n_eps", std::to_string(sph_cfg.n_eps));
            mf.add("m", std::to_string(sph_cfg.m));
            mf.seed = sph_common.seed;
            mf.timestamp = sph_common.timestamp;
            mf.out_path = sph_common.out;
            emit(sph_common.out, mf, table);
        } else if (smp->parsed()) {
            mgdp::SampleRequest req;
            req.manifold = parse_manifold(smp_manifold, smp_dim);
            if (smp_dist != "gaussian" && smp_dist != "laplace")
                throw std::invalid_argument("--dist must be gaussian or laplace");
            req.dist = smp_dist == "gaussian" ? mgdp::MechanismKind::gaussian
                                              : mgdp::MechanismKind::laplace;
            req.footprint = parse_footprint(req.manifold, smp_footprint);
            req.rate = smp_rate;
            req.n = smp_n;
            req.sampler = smp_sampler;
            req.chain = smp_chain;
            req.seed = smp_common.seed;
            mgdp::CsvTable table = run_sample(req);
            mgdp::RunManifest mf;
            mf.subcommand = "sample";
            mf.add("manifold", smp_manifold);
            mf.add("dim", std::to_string(smp_dim));
            mf.add("dist", smp_dist);
            mf.add("footprint", smp_footprint.empty() ? "(canonical)" : smp_footprint);
            mf.add("rate", fmt(smp_rate));
            mf.add("n", std::to_string(smp_n));
            mf.add("sampler", smp_sampler);
            mf.add("burn_in", std::to_string(smp_chain.burn_in));
            mf.add("thin", std::to_string(smp_chain.thin));
            mf.add("proposal_scale", fmt(smp_chain.proposal_scale));
            mf.seed = smp_common.seed;
            mf.timestamp = smp_common.timestamp;
            mf.out_path = smp_common.out;
            emit(smp_common.out, mf, table);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
