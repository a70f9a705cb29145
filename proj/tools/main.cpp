// Command-line runner for the GBM paths space library: path sampling, the
// Monte Carlo cross-check tables, closed-form evaluation, and the
// analytic/Feynman integral reports. Exit codes: 0 all checks pass, 1 error
// or failed check, 2 divergence verdict.

#include <complex>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbmpath/runner.hpp"

namespace {

using gbmpath::runner::ExperimentConfig;

struct CommonFlags {
    std::string kernel;
    std::size_t grid = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t n = 0;
    unsigned workers = 0;
    std::string out;
    std::string config_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config JSON file");
        cmd->add_option("--kernel", kernel, "kernel preset: wiener | drifted | curved");
        cmd->add_option("--grid", grid, "grid resolution (number of intervals)");
        cmd->add_option("--seed", seed, "master seed")->each([this](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--n", n, "Monte Carlo sample count");
        cmd->add_option("--workers", workers, "worker threads for Monte Carlo loops");
        cmd->add_option("--out", out, "output file (default: stdout)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
            nlohmann::json j = nlohmann::json::parse(in);
            cfg = ExperimentConfig::from_json(j);
        }
        if (!kernel.empty()) cfg.kernel = kernel;
        if (grid) cfg.grid_m = grid;
        if (seed_set) cfg.seed = seed;
        if (n) cfg.n = n;
        if (workers) cfg.workers = workers;
        if (!out.empty()) cfg.output = out;
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized Brownian motion paths space toolkit"};
    app.require_subcommand(1);

    CommonFlags sample_flags, paths_flags, all_flags, cf_flags;
    CommonFlags fey_flags, div_flags, contour_flags;

    auto* sample = app.add_subcommand("sample", "draw paths and write them as CSV (t, x(t))");
    sample_flags.attach(sample);

    auto* paths_verify = app.add_subcommand(
        "paths-verify", "Monte Carlo vs closed form cross-check table");
    paths_flags.attach(paths_verify);

    auto* verify_all = app.add_subcommand(
        "verify-all", "full verification table (paths space + function space checks)");
    all_flags.attach(verify_all);

    auto* closed_form = app.add_subcommand("closed-form", "closed-form evaluators");
    auto* cf_eval = closed_form->add_subcommand("eval", "evaluate a moment spec");
    std::string spec_path;
    cf_eval->add_option("--spec", spec_path, "MomentSpec JSON file")->required();
    cf_flags.attach(cf_eval);

    auto* feynman = app.add_subcommand("feynman", "analytic paths space Feynman integrals");
    auto* fey_eval = feynman->add_subcommand(
        "eval", "evaluate J*(lambda) or the Feynman limit for a cylinder functional");
    fey_flags.attach(fey_eval);
    double q_flag = 0.0;
    bool q_set = false;
    std::vector<double> lambda_flag;
    fey_eval->add_option("--q", q_flag, "Feynman parameter q (nonzero)")
        ->each([&](const std::string&) { q_set = true; });
    fey_eval->add_option("--lambda", lambda_flag, "lambda as re [im]")->expected(1, 2);

    auto* diverge = feynman->add_subcommand(
        "diverge-demo", "reproduce the 1/m^2 measure divergence report (exit 2)");
    div_flags.attach(diverge);

    auto* contour = feynman->add_subcommand(
        "contour", "closed contour residual of J* on [1,2] x [-0.5,0.5]i");
    contour_flags.attach(contour);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) {
            return gbmpath::runner::run_sample(sample_flags.resolve(), std::cout);
        }
        if (*paths_verify) {
            return gbmpath::runner::run_paths_verify(paths_flags.resolve(), std::cout);
        }
        if (*verify_all) {
            return gbmpath::runner::run_verify_all(all_flags.resolve(), std::cout);
        }
        if (*cf_eval) {
            std::ifstream in(spec_path);
            if (!in) throw std::runtime_error("cannot open spec file '" + spec_path + "'");
            const nlohmann::json spec = nlohmann::json::parse(in);
            return gbmpath::runner::run_closed_form_eval(cf_flags.resolve(), spec, std::cout);
        }
        if (*fey_eval) {
            ExperimentConfig cfg = fey_flags.resolve();
            if (q_set) cfg.q_value = q_flag;
            if (!lambda_flag.empty()) {
                cfg.lambda_value = std::complex<double>(
                    lambda_flag[0], lambda_flag.size() > 1 ? lambda_flag[1] : 0.0);
            }
            return gbmpath::runner::run_feynman_eval(cfg, std::cout);
        }
        if (*diverge) {
            return gbmpath::runner::run_diverge_demo(div_flags.resolve(), std::cout);
        }
        if (*contour) {
            return gbmpath::runner::run_contour(contour_flags.resolve(), std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return gbmpath::runner::exit_error;
    }
    return gbmpath::runner::exit_error;
}
