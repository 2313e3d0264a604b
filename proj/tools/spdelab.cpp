// spdelab command line interface.
//
//   spdelab run <experiment> [--config FILE] [--seed S] [--out DIR]
//                            [--set key=value]...
//   spdelab models
//   spdelab constants [--sigma S] [--nu N] [--a A] [--b B] [--c C] [--n N]

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spdelab/spdelab.hpp"

namespace {

const char* kOutputSchemas = R"(Output CSV schemas per experiment:
  scheme_comparison:  means.csv               seed,mean_right,mean_centred,mean_left,ordered
                      fields_first_seed.csv   x,u_right,u_centred,u_left
  gamma_sweep:        gamma_sweep_fd.csv      gamma,l2_diff,seed
                      gamma_sweep_galerkin.csv  same schema, Galerkin linear backend
                      argmin.csv              backend,gamma_star
  roughness_study:    norms.csv               delta_c,scheme,seed,t,l2_norm
                      summary.csv             delta_c,seed,centred_finite,right_diverged,
                                              right_exceeded_10x,t_event
  gradient_fit,
  multiplicative_fit: fit.json                fitted polynomial and evaluation log
                      correction_curve.csv    u,fitted,predicted
                      histogram.csv           bin_lo,bin_hi,count
                      fit_summary.csv         q05,q95,max_deviation,max_predicted,ratio
                      reference_field.csv     x,u_0
  vector_comparison:  distances.csv           seed,dist_corrected,dist_uncorrected,ratio,ok
                      fields_first_seed.csv   x,u_0,u_1,u_tilde_0,u_tilde_1,u_bar_0,u_bar_1
                      diffs_first_seed.csv    x,du_corrected_*,du_uncorrected_*
  viscosity_sweep:    bipolar.csv             eps,d0,d1,x,y,clamped
                      crossover.csv           eps_cross
                      reference_fields.csv    x,c0,c1
Every run writes manifest.json listing the configuration and all output files.
)";

int run_command(const std::string& experiment, const std::string& config_path,
                const std::vector<std::string>& overrides, const std::string& seed,
                const std::string& out_dir) {
    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file '" << config_path << "'\n";
            return 1;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        text = buffer.str();
    }

    // the positional experiment wins over the file unless they agree
    spdelab::ExperimentConfig probe;
    bool file_has_experiment = text.find("experiment") != std::string::npos;
    std::string effective = text;
    if (!file_has_experiment) {
        effective = "experiment = " + experiment + "\n" + effective;
    }
    for (const std::string& kv : overrides) effective += "\n" + kv;
    if (!seed.empty()) effective += "\nseed = " + seed;
    if (!out_dir.empty()) effective += "\nout = " + out_dir;

    spdelab::ExperimentConfig cfg;
    try {
        cfg = spdelab::parse_config_text(effective);
    } catch (const spdelab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (cfg.experiment_id != experiment) {
        std::cerr << "error: config file requests experiment '" << cfg.experiment_id
                  << "' but the command line says '" << experiment << "'\n";
        return 1;
    }

    try {
        spdelab::ExperimentOutput out = spdelab::run_experiment(cfg);
        std::cout << "experiment " << cfg.experiment_id << " finished in "
                  << out.manifest.wall_clock_seconds << " s\n";
        std::cout << "outputs in " << out.directory.string() << ":\n";
        for (const std::string& f : out.manifest.output_files) std::cout << "  " << f << "\n";
        std::cout << "  manifest.json\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int models_command() {
    std::printf("%-22s %-4s %-10s %-28s %s\n", "name", "dim", "viscosity", "noise", "description");
    for (const spdelab::ModelSpec& m : spdelab::builtin_models()) {
        std::string noise = m.noise.kind == spdelab::NoiseCoefficient::Kind::additive
                                ? "additive sigma=" + spdelab::csv_number(m.noise.sigma)
                                : "state-dependent f(u)";
        std::printf("%-22s %-4d %-10g %-28s %s\n", m.name.c_str(), m.components, m.viscosity,
                    noise.c_str(), m.description.c_str());
    }
    return 0;
}

int constants_command(double sigma, double nu, double a, double b, double c, int n) {
    using spdelab::CorrectionQuery;
    std::printf("kind,value\n");
    std::printf("continuum_two_point,%s\n",
                spdelab::csv_number(
                    correction_constant(CorrectionQuery::continuum(a, b, sigma, nu)))
                    .c_str());
    std::printf("general_stencil,%s\n",
                spdelab::csv_number(correction_constant(CorrectionQuery::general(c, sigma, nu)))
                    .c_str());
    std::printf("fd_discrete,%s\n",
                spdelab::csv_number(correction_constant(CorrectionQuery::fd(n, sigma, nu)))
                    .c_str());
    std::printf("galerkin_discrete,%s\n",
                spdelab::csv_number(correction_constant(CorrectionQuery::galerkin(n, sigma, nu)))
                    .c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spdelab: finite-difference and spectral simulations of stochastic "
                 "Burgers-type equations, with stencil-correction experiments"};
    app.require_subcommand(1);
    app.footer(kOutputSchemas);

    auto* run = app.add_subcommand("run", "run an experiment and write CSV results + manifest");
    std::string experiment, config_path, seed, out_dir;
    std::vector<std::string> overrides;
    run->add_option("experiment", experiment,
                    "one of: scheme_comparison, gamma_sweep, roughness_study, gradient_fit, "
                    "vector_comparison, multiplicative_fit, viscosity_sweep")
        ->required();
    run->add_option("--config", config_path, "key=value config file");
    run->add_option("--seed", seed, "master seed (overrides the config)");
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--set", overrides, "override a single config key, e.g. --set stepper.dt=1e-3");

    auto* models = app.add_subcommand("models", "list the built-in model catalog");

    auto* constants =
        app.add_subcommand("constants", "print the four correction constants as CSV");
    double sigma = 1.0, nu = 1.0, a = 1.0, b = 0.0, c = 1.0;
    int n = 4096;
    constants->add_option("--sigma", sigma, "noise amplitude");
    constants->add_option("--nu", nu, "viscosity");
    constants->add_option("--a", a, "two-point stencil forward offset");
    constants->add_option("--b", b, "two-point stencil backward offset");
    constants->add_option("--c", c, "general stencil parameter");
    constants->add_option("--n", n, "gridpoints for the discrete constants");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(experiment, config_path, overrides, seed, out_dir);
    if (models->parsed()) return models_command();
    if (constants->parsed()) return constants_command(sigma, nu, a, b, c, n);
    return 0;
}
