#pragma once

// The seven experiment drivers and their CSV/manifest emission.  Output
// schemas are fixed (documented in the CLI help and the README); every file a
// driver writes is listed in the run manifest, and reruns with an identical
// configuration produce byte-identical CSV files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdelab/analysis.hpp"
#include "spdelab/config.hpp"
#include "spdelab/io.hpp"
#include "spdelab/models.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/optimize.hpp"
#include "spdelab/stepper.hpp"
#include "spdelab/version.hpp"

namespace spdelab {

namespace detail {

struct DriverContext {
    const ExperimentConfig& cfg;
    std::filesystem::path dir;
    std::vector<std::string> files;

    CsvWriter csv(const std::string& name, const std::string& header) {
        files.push_back(name);
        return CsvWriter(dir / name, header);
    }

    void register_file(const std::string& name) { files.push_back(name); }
};

inline double spatial_mean(const Field& f, int component = 0) {
    double acc = 0.0;
    for (int j = 0; j < f.size(); ++j) acc += f(component, j);
    return acc / f.size();
}

inline NoiseStream stream_for(const ExperimentConfig& cfg, const PeriodicGrid& grid,
                              std::uint64_t run_id) {
    return NoiseStream{cfg.master_seed, run_id, 0, grid};
}

// Godunov flux for the Burgers flux u^2/2.
inline double godunov_flux(double ul, double ur) {
    auto f = [](double u) { return 0.5 * u * u; };
    if (ul <= ur) {
        if (ul <= 0.0 && 0.0 <= ur) return 0.0;
        return std::min(f(ul), f(ur));
    }
    return std::max(f(ul), f(ur));
}

// Initial datum for the vanishing-viscosity experiment.  It must form a shock
// and stay negative: the right-sided non-conservative scheme is ultraviolet
// unstable wherever u > 0, and for eps << delta no viscosity is left to damp
// that mode, so positive data would blow up across the small-eps half of the
// sweep.  For u < 0 the right side is the upwind side and the scheme is
// stable.
inline double viscosity_sweep_datum(double x) { return std::sin(x) - 2.0; }

// Deterministic high-resolution reference for the inviscid limit: solves
// u_t = -1/2 (u^2)_x + c/4 + eps_ref u_xx with a conservative Godunov flux
// (explicit) and theta-implicit viscosity.
inline Field limiting_equation_reference(int n_ref, double c, double eps_ref, double T,
                                         double dt, double theta) {
    PeriodicGrid grid(n_ref);
    Field u = Field::from_function(grid, viscosity_sweep_datum);
    const long steps = std::lround(T / dt);
    const LinearOperatorSpec lap{LinearOperatorSpec::Kind::fd_laplacian, grid};
    for (long k = 0; k < steps; ++k) {
        Field rhs = u;
        if (theta < 1.0) {
            Field lu = apply_linear_operator(lap, u);
            lu *= eps_ref * (1.0 - theta) * dt;
            rhs += lu;
        }
        for (int j = 0; j < grid.n; ++j) {
            const double flux_right = godunov_flux(u(0, j), u.cyclic(0, j + 1));
            const double flux_left = godunov_flux(u.cyclic(0, j - 1), u(0, j));
            rhs(0, j) += dt * (-(flux_right - flux_left) / grid.delta + 0.25 * c);
        }
        u = solve_shifted_linear(StepperConfig::Backend::cyclic_tridiagonal,
                                 eps_ref * theta * dt, rhs);
    }
    return u;
}

// ---------------------------------------------------------------------------
// scheme_comparison: right-sided, centred and left-sided Burgers runs driven
// by the same noise instance; emits spatial means per seed and the final
// fields of the first seed.
inline void run_scheme_comparison(DriverContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    PeriodicGrid grid(cfg.n_coarse);
    const Field u0(grid);
    const StepperConfig stepper = cfg.stepper();
    const NoiseSpec spec = cfg.colour_exponent != 0.0
                               ? NoiseSpec::coloured(cfg.colour_exponent)
                               : NoiseSpec::white();

    struct Scheme {
        const char* name;
        int a, b;
    };
    const Scheme schemes[] = {{"right", 1, 0}, {"centred", 1, 1}, {"left", 0, 1}};

    CsvWriter means = ctx.csv("means.csv", "seed,mean_right,mean_centred,mean_left,ordered");
    std::vector<Field> first_fields;
    std::vector<std::vector<TrajectoryState>> first_snapshots(3);

    for (std::uint64_t run : cfg.run_ids) {
        const bool first = run == cfg.run_ids.front();
        std::vector<double> mean(3);
        std::vector<Field> finals;
        for (int s = 0; s < 3; ++s) {
            ModelSpec model = burgers_fd(schemes[s].a, schemes[s].b, cfg.nu, cfg.sigma);
            NoiseStream stream = stream_for(cfg, grid, run);
            StepperConfig run_stepper = stepper;
            if (!first) run_stepper.snapshot_stride = 0;  // trajectories for seed 0 only
            IntegrationResult r = integrate(model, run_stepper, stream, spec, u0, cfg.T);
            mean[static_cast<size_t>(s)] = spatial_mean(r.final_state.field);
            finals.push_back(r.final_state.field);
            if (first) first_snapshots[static_cast<size_t>(s)] = std::move(r.snapshots);
        }
        const bool ordered = mean[2] < mean[1] && mean[1] < mean[0];
        means.row({std::to_string(run), csv_number(mean[0]), csv_number(mean[1]),
                   csv_number(mean[2]), ordered ? "1" : "0"});
        if (first) first_fields = finals;
    }

    ctx.register_file("fields_first_seed.csv");
    write_fields_csv(ctx.dir / "fields_first_seed.csv", {"u_right", "u_centred", "u_left"},
                     {&first_fields[0], &first_fields[1], &first_fields[2]});

    if (stepper.snapshot_stride > 0) {
        CsvWriter traj =
            ctx.csv("trajectory_first_seed.csv", "t,x,u_right,u_centred,u_left");
        for (size_t snap = 0; snap < first_snapshots[0].size(); ++snap) {
            for (int j = 0; j < grid.n; ++j) {
                traj.row({csv_number(first_snapshots[0][snap].time),
                          csv_number(grid.point(j)),
                          csv_number(first_snapshots[0][snap].field(0, j)),
                          csv_number(first_snapshots[1][snap].field(0, j)),
                          csv_number(first_snapshots[2][snap].field(0, j))});
            }
        }
    }
}

// ---------------------------------------------------------------------------
// gamma_sweep: L2 distance between the approximating run (coarse grid, fd and
// galerkin linear backends) and the corrected conservative run (fine grid,
// drift gamma sigma^2/nu), as a function of gamma, per seed.
inline void run_gamma_sweep(DriverContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    PeriodicGrid coarse(cfg.n_coarse);
    PeriodicGrid fine(cfg.n_coarse * cfg.refine);
    const Field u0_coarse(coarse);
    const Field u0_fine(fine);
    const NoiseSpec spec = NoiseSpec::white();

    StepperConfig fine_stepper = cfg.stepper();
    fine_stepper.backend = StepperConfig::Backend::cyclic_tridiagonal;
    fine_stepper.snapshot_stride = 0;

    // corrected reference finals, restricted to the coarse grid: [seed][gamma]
    std::vector<std::vector<Field>> corrected(cfg.run_ids.size());
    for (size_t si = 0; si < cfg.run_ids.size(); ++si) {
        for (double gamma : cfg.sweep) {
            ModelSpec model = burgers_conservative(cfg.nu, cfg.sigma);
            model.correction.kind = Correction::Kind::constant;
            model.correction.gamma = gamma;
            NoiseStream stream = stream_for(cfg, fine, cfg.run_ids[si]);
            IntegrationResult r = integrate(model, fine_stepper, stream, spec, u0_fine, cfg.T);
            corrected[si].push_back(restrict_to_coarse(r.final_state.field, cfg.refine));
        }
    }

    const std::pair<std::string, StepperConfig::Backend> backends[] = {
        {"fd", StepperConfig::Backend::cyclic_tridiagonal},
        {"galerkin", StepperConfig::Backend::spectral_diagonal},
    };

    CsvWriter argmin_csv = ctx.csv("argmin.csv", "backend,gamma_star");
    for (const auto& [backend_name, backend] : backends) {
        CsvWriter sweep_csv = ctx.csv("gamma_sweep_" + backend_name + ".csv",
                                      "gamma,l2_diff,seed");
        std::vector<double> avg(cfg.sweep.size(), 0.0);
        for (size_t si = 0; si < cfg.run_ids.size(); ++si) {
            StepperConfig coarse_stepper = cfg.stepper();
            coarse_stepper.backend = backend;
            coarse_stepper.snapshot_stride = 0;
            ModelSpec model = burgers_fd(cfg.stencil_a, cfg.stencil_b, cfg.nu, cfg.sigma);
            NoiseStream stream = stream_for(cfg, fine, cfg.run_ids[si]);
            IntegrationResult r =
                integrate(model, coarse_stepper, stream, spec, u0_coarse, cfg.T);
            for (size_t gi = 0; gi < cfg.sweep.size(); ++gi) {
                const double diff = l2_norm(corrected[si][gi] - r.final_state.field);
                avg[gi] += diff / static_cast<double>(cfg.run_ids.size());
                sweep_csv.row({csv_number(cfg.sweep[gi]), csv_number(diff),
                               std::to_string(cfg.run_ids[si])});
            }
        }
        if (!cfg.sweep.empty()) {
            size_t best = 0;
            for (size_t gi = 1; gi < cfg.sweep.size(); ++gi) {
                if (avg[gi] < avg[best]) best = gi;
            }
            argmin_csv.row({backend_name, csv_number(cfg.sweep[best])});
        }
    }
}

// ---------------------------------------------------------------------------
// roughness_study: centred vs right-sided Burgers under noise coloured by
// (1+n^2)^{-delta_c}; tracks the L2 norm in time and flags divergence.
inline void run_roughness_study(DriverContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    PeriodicGrid grid(cfg.n_coarse);
    const Field u0(grid);
    StepperConfig stepper = cfg.stepper();
    if (stepper.snapshot_stride <= 0) stepper.snapshot_stride = 10;

    CsvWriter norms = ctx.csv("norms.csv", "delta_c,scheme,seed,t,l2_norm");
    CsvWriter summary = ctx.csv(
        "summary.csv", "delta_c,seed,centred_finite,right_diverged,right_exceeded_10x,t_event");

    for (double delta_c : cfg.sweep) {
        const NoiseSpec spec = NoiseSpec::coloured(delta_c);
        for (std::uint64_t run : cfg.run_ids) {
            auto simulate = [&](int a, int b) {
                ModelSpec model = burgers_fd(a, b, cfg.nu, cfg.sigma);
                NoiseStream stream = stream_for(cfg, grid, run);
                return integrate(model, stepper, stream, spec, u0, cfg.T);
            };
            IntegrationResult centred = simulate(1, 1);
            IntegrationResult right = simulate(1, 0);

            auto emit_norms = [&](const char* scheme, const IntegrationResult& r) {
                for (const TrajectoryState& s : r.snapshots) {
                    norms.row({csv_number(delta_c), scheme, std::to_string(run),
                               csv_number(s.time), csv_number(l2_norm(s.field))});
                }
            };
            emit_norms("centred", centred);
            emit_norms("right", right);

            bool exceeded = false;
            double t_event = -1.0;
            const size_t common = std::min(centred.snapshots.size(), right.snapshots.size());
            for (size_t i = 0; i < common; ++i) {
                const double nr = l2_norm(right.snapshots[i].field);
                const double nc = l2_norm(centred.snapshots[i].field);
                if (nr > 10.0 * nc && nc > 0.0) {
                    exceeded = true;
                    t_event = right.snapshots[i].time;
                    break;
                }
            }
            if (!exceeded && right.diverged) t_event = right.divergence_time;
            summary.row({csv_number(delta_c), std::to_string(run),
                         centred.completed() ? "1" : "0", right.diverged ? "1" : "0",
                         exceeded ? "1" : "0", csv_number(t_event)});
        }
    }
}

// ---------------------------------------------------------------------------
// Correction-fit plumbing shared by gradient_fit and multiplicative_fit.

struct FitDriverSetup {
    ModelSpec approximating;                                  // coarse-grid run
    std::function<ModelSpec(const std::vector<double>&)> corrected;  // fine-grid run
    std::function<double(double)> predicted_correction;       // drift units
    std::function<double(double)> fitted_correction_scale;    // p(u) -> drift units
    NoiseSpec noise;
};

inline void run_correction_fit(DriverContext& ctx, const FitDriverSetup& setup) {
    const ExperimentConfig& cfg = ctx.cfg;
    PeriodicGrid coarse(cfg.n_coarse);
    PeriodicGrid fine(cfg.n_coarse * cfg.refine);
    const Field u0_coarse(coarse);
    const Field u0_fine(fine);

    StepperConfig stepper = cfg.stepper();
    stepper.snapshot_stride = 0;

    // increments are pregenerated once per seed and shared by every
    // objective evaluation
    const long steps = std::lround(cfg.T / cfg.dt);
    std::vector<std::vector<NoiseIncrement>> increments(cfg.run_ids.size());
    std::vector<Field> references;
    for (size_t si = 0; si < cfg.run_ids.size(); ++si) {
        NoiseStream stream = stream_for(cfg, fine, cfg.run_ids[si]);
        increments[si].reserve(static_cast<size_t>(steps));
        for (long k = 0; k < steps; ++k) {
            increments[si].push_back(next_increment(stream, setup.noise, cfg.dt));
        }
        auto coarse_noise = [&](long k) {
            return block_mean(increments[si][static_cast<size_t>(k)], cfg.refine);
        };
        IntegrationResult r =
            integrate_source(setup.approximating, stepper, coarse_noise, u0_coarse, cfg.T);
        if (!r.completed()) {
            throw std::runtime_error("correction fit: approximating run diverged");
        }
        references.push_back(r.final_state.field);
    }

    auto fine_solver = [&](size_t si, const std::vector<double>& coeffs) {
        ModelSpec model = setup.corrected(coeffs);
        auto fine_noise = [&](long k) { return increments[si][static_cast<size_t>(k)]; };
        IntegrationResult r = integrate_source(model, stepper, fine_noise, u0_fine, cfg.T);
        if (!r.completed()) throw std::runtime_error("corrected run diverged");
        return r.final_state.field;
    };

    SimplexConfig simplex;
    simplex.max_evals = cfg.fit_max_evals;
    simplex.f_tolerance = cfg.fit_f_tol;
    simplex.x_tolerance = cfg.fit_x_tol;
    simplex.initial_step = cfg.fit_initial_step;

    FitResult fit;
    if (cfg.run_ids.size() == 1) {
        fit = fit_correction_polynomial(
            references[0], [&](const std::vector<double>& c) { return fine_solver(0, c); },
            cfg.refine, cfg.fit_degree, simplex);
    } else {
        // seed-averaged objective (enabled by listing several run ids)
        Objective objective = [&](const std::vector<double>& coeffs) -> double {
            double acc = 0.0;
            for (size_t si = 0; si < cfg.run_ids.size(); ++si) {
                try {
                    Field f = fine_solver(si, coeffs);
                    acc += l2_norm(restrict_to_coarse(f, cfg.refine) - references[si]);
                } catch (const std::exception&) {
                    return std::numeric_limits<double>::infinity();
                }
            }
            return acc / static_cast<double>(cfg.run_ids.size());
        };
        fit = nelder_mead(objective, std::vector<double>(static_cast<size_t>(cfg.fit_degree) + 1),
                          simplex);
    }

    // histogram and quantiles of the reference state's values
    std::vector<double> values(references[0].values());
    QuantileSummary hist = histogram_quantiles(values, 40);

    nlohmann::json j;
    j["best_params"] = fit.best_params;
    j["best_value"] = fit.best_value;
    j["evals_used"] = fit.evals_used;
    j["converged"] = fit.converged;
    j["q05"] = hist.q05;
    j["q95"] = hist.q95;
    {
        nlohmann::json log = nlohmann::json::array();
        for (const auto& [params, value] : fit.evaluation_log) {
            log.push_back({{"params", params}, {"value", value}});
        }
        j["evaluation_log"] = std::move(log);
    }
    ctx.register_file("fit.json");
    {
        std::ofstream out(ctx.dir / "fit.json", std::ios::binary | std::ios::trunc);
        out << j.dump(2) << "\n";
    }

    CsvWriter curve = ctx.csv("correction_curve.csv", "u,fitted,predicted");
    const int curve_points = 201;
    double max_dev = 0.0, max_pred = 0.0;
    for (int i = 0; i < curve_points; ++i) {
        const double u =
            hist.lo + (hist.hi - hist.lo) * static_cast<double>(i) / (curve_points - 1);
        const double fitted = setup.fitted_correction_scale(eval_polynomial(fit.best_params, u));
        const double predicted = setup.predicted_correction(u);
        curve.row({csv_number(u), csv_number(fitted), csv_number(predicted)});
        if (u >= hist.q05 && u <= hist.q95) {
            max_dev = std::max(max_dev, std::abs(fitted - predicted));
            max_pred = std::max(max_pred, std::abs(predicted));
        }
    }

    CsvWriter hist_csv = ctx.csv("histogram.csv", "bin_lo,bin_hi,count");
    const double width = hist.counts.size() > 1
                             ? (hist.hi - hist.lo) / static_cast<double>(hist.counts.size())
                             : 0.0;
    for (size_t i = 0; i < hist.counts.size(); ++i) {
        hist_csv.row({csv_number(hist.lo + width * static_cast<double>(i)),
                      csv_number(hist.lo + width * static_cast<double>(i + 1)),
                      std::to_string(hist.counts[i])});
    }

    CsvWriter fit_summary =
        ctx.csv("fit_summary.csv", "q05,q95,max_deviation,max_predicted,ratio");
    const double ratio = max_pred > 0.0 ? max_dev / max_pred
                                        : std::numeric_limits<double>::infinity();
    fit_summary.row({csv_number(hist.q05), csv_number(hist.q95), csv_number(max_dev),
                     csv_number(max_pred), csv_number(ratio)});

    ctx.register_file("reference_field.csv");
    write_field_csv(ctx.dir / "reference_field.csv", references[0]);
}

// gradient_fit: approximating equation h'(u) D^{1,0} u with h' = sin^2;
// corrected equation uses the conservative form of h plus a polynomial
// correction -sigma^2 p(u)/(4 nu), fitted to the same noise instance.
inline void run_gradient_fit(DriverContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    FitDriverSetup setup;
    setup.approximating =
        gradient_sin2(cfg.nu, cfg.sigma, StencilSpec::two_point(cfg.stencil_a, cfg.stencil_b));
    setup.corrected = [&cfg](const std::vector<double>& coeffs) {
        ModelSpec m;
        m.name = "gradient_sin2_corrected";
        m.nonlinearity.kind = Nonlinearity::Kind::conservative;
        m.nonlinearity.stencil = StencilSpec::left_sided();
        m.nonlinearity.G = [](double u) { return -sin2_antiderivative(u); };
        m.correction.kind = Correction::Kind::polynomial;
        m.correction.poly = coeffs;
        m.noise = NoiseCoefficient::additive(cfg.sigma);
        m.viscosity = cfg.nu;
        return m;
    };
    const double scale = -cfg.sigma * cfg.sigma / (4.0 * cfg.nu);
    setup.predicted_correction = [scale](double u) { return scale * sin2_correction(u); };
    setup.fitted_correction_scale = [scale](double p) { return scale * p; };
    setup.noise = NoiseSpec::white();
    run_correction_fit(ctx, setup);
}

// multiplicative_fit: transport g(u) = -u with state-dependent noise
// f(u) = 1 + cos(3u)/2; the conjectured correction is -g'(u) f(u)^2 / (4 nu).
inline void run_multiplicative_fit(DriverContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    FitDriverSetup setup;
    setup.approximating =
        multiplicative_cos3(cfg.nu, StencilSpec::two_point(cfg.stencil_a, cfg.stencil_b));
    setup.corrected = [&cfg](const std::vector<double>& coeffs) {
        ModelSpec m;
        m.name = "multiplicative_cos3_corrected";
        m.nonlinearity.kind = Nonlinearity::Kind::conservative;
        m.nonlinearity.stencil = StencilSpec::left_sided();
        m.nonlinearity.G = [](double u) { return 0.5 * u * u; };  // g(u) = -u
        m.correction.kind = Correction::Kind::polynomial;
        m.correction.poly = coeffs;
        m.noise = NoiseCoefficient::state_dependent(cos3_noise_coefficient);
        m.viscosity = cfg.nu;
        return m;
    };
    const double scale = -1.0 / (4.0 * cfg.nu);
    setup.predicted_correction = [scale](double u) {
        const double f = cos3_noise_coefficient(u);
        return scale * (-1.0) * f * f;  // g'(u) = -1
    };
    setup.fitted_correction_scale = [scale](double p) { return scale * p; };
    setup.noise = NoiseSpec::white();
    run_correction_fit(ctx, setup);
}

// ---------------------------------------------------------------------------
// vector_comparison: right-sided uncorrected, centred divergence-corrected and
// centred uncorrected runs of the R^2-valued equation, driven by the same
// noise; emits pairwise distances per seed and the first seed's fields.
inline void run_vector_comparison(DriverContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    PeriodicGrid grid(cfg.n_coarse);
    const Field u0(grid, 2);
    StepperConfig stepper = cfg.stepper();
    stepper.snapshot_stride = 0;
    const NoiseSpec spec = NoiseSpec::white(2);

    CsvWriter distances =
        ctx.csv("distances.csv", "seed,dist_corrected,dist_uncorrected,ratio,ok");

    std::vector<Field> first_fields;
    for (std::uint64_t run : cfg.run_ids) {
        auto simulate = [&](const ModelSpec& model) {
            NoiseStream stream = stream_for(cfg, grid, run);
            IntegrationResult r = integrate(model, stepper, stream, spec, u0, cfg.T);
            if (!r.completed()) throw std::runtime_error("vector_comparison: run diverged");
            return r.final_state.field;
        };
        Field right = simulate(strange_spde(cfg.sigma, StencilSpec::right_sided()));
        Field corrected = simulate(strange_spde_corrected(cfg.sigma));
        Field centred = simulate(strange_spde(cfg.sigma, StencilSpec::centred()));

        const double dist_corrected = l2_norm(right - corrected);
        const double dist_uncorrected = l2_norm(right - centred);
        const double ratio = dist_uncorrected > 0.0
                                 ? dist_corrected / dist_uncorrected
                                 : std::numeric_limits<double>::infinity();
        distances.row({std::to_string(run), csv_number(dist_corrected),
                       csv_number(dist_uncorrected), csv_number(ratio),
                       dist_corrected <= 0.5 * dist_uncorrected ? "1" : "0"});
        if (run == cfg.run_ids.front()) {
            first_fields = {right, corrected, centred};
        }
    }

    ctx.register_file("fields_first_seed.csv");
    write_fields_csv(ctx.dir / "fields_first_seed.csv", {"u", "u_tilde", "u_bar"},
                     {&first_fields[0], &first_fields[1], &first_fields[2]});

    // pointwise differences of the first seed, one row per gridpoint
    CsvWriter diffs = ctx.csv("diffs_first_seed.csv",
                              "x,du_corrected_0,du_corrected_1,du_uncorrected_0,du_uncorrected_1");
    for (int j = 0; j < grid.n; ++j) {
        diffs.row({csv_number(grid.point(j)),
                   csv_number(first_fields[0](0, j) - first_fields[1](0, j)),
                   csv_number(first_fields[0](1, j) - first_fields[1](1, j)),
                   csv_number(first_fields[0](0, j) - first_fields[2](0, j)),
                   csv_number(first_fields[0](1, j) - first_fields[2](1, j))});
    }
}

// ---------------------------------------------------------------------------
// viscosity_sweep: distance of the right-sided stochastic run (viscosity eps,
// noise sqrt(eps)) to deterministic references of the limiting equation with
// c = 0 and c = 1, in two-centre bipolar coordinates, across eps.
inline void run_viscosity_sweep(DriverContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    PeriodicGrid grid(cfg.n_coarse);
    const int n_ref = cfg.n_coarse * cfg.refine;
    const double eps_ref = kDomainLength / n_ref;

    Field ref0 = restrict_to_coarse(
        limiting_equation_reference(n_ref, 0.0, eps_ref, cfg.T, cfg.dt, cfg.theta), cfg.refine);
    Field ref1 = restrict_to_coarse(
        limiting_equation_reference(n_ref, 1.0, eps_ref, cfg.T, cfg.dt, cfg.theta), cfg.refine);
    const double D = l2_norm(ref1 - ref0);

    ctx.register_file("reference_fields.csv");
    write_fields_csv(ctx.dir / "reference_fields.csv", {"c0", "c1"}, {&ref0, &ref1});

    StepperConfig stepper = cfg.stepper();
    stepper.snapshot_stride = 0;
    const Field u0 = Field::from_function(grid, viscosity_sweep_datum);
    const NoiseSpec spec = NoiseSpec::white();

    CsvWriter bipolar = ctx.csv("bipolar.csv", "eps,d0,d1,x,y,clamped");
    std::vector<double> gap;  // d0 - d1 per sweep entry
    for (double eps : cfg.sweep) {
        ModelSpec model = inviscid_regime(eps, cfg.stencil_a, cfg.stencil_b);
        NoiseStream stream = stream_for(cfg, grid, cfg.run_ids.front());
        IntegrationResult r = integrate(model, stepper, stream, spec, u0, cfg.T);
        if (!r.completed()) {
            throw std::runtime_error("viscosity_sweep: run diverged at eps = " +
                                     std::to_string(eps));
        }
        const double d0 = l2_norm(r.final_state.field - ref0);
        const double d1 = l2_norm(r.final_state.field - ref1);
        BipolarPoint p = bipolar_coordinates(d0, d1, D);
        bipolar.row({csv_number(eps), csv_number(d0), csv_number(d1), csv_number(p.x),
                     csv_number(p.y), p.clamped ? "1" : "0"});
        gap.push_back(d0 - d1);
    }

    // crossover: scanning from the largest eps down, the first sign change of
    // d0 - d1, log-interpolated in eps
    CsvWriter crossover = ctx.csv("crossover.csv", "eps_cross");
    for (size_t i = gap.size(); i-- > 1;) {
        if ((gap[i] > 0.0) != (gap[i - 1] > 0.0)) {
            const double t = gap[i - 1] / (gap[i - 1] - gap[i]);
            const double log_cross =
                std::log(cfg.sweep[i - 1]) + t * (std::log(cfg.sweep[i]) - std::log(cfg.sweep[i - 1]));
            crossover.row({csv_number(std::exp(log_cross))});
            break;
        }
    }
}

}  // namespace detail

struct ExperimentOutput {
    RunManifest manifest;
    std::filesystem::path directory;
};

// Runs the configured experiment, writes its CSV outputs plus manifest.json
// into cfg.out_dir and returns the manifest.  Deterministic given the
// configuration: rerunning overwrites the CSV files byte-identically.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();

    detail::DriverContext ctx{cfg, std::filesystem::path(cfg.out_dir), {}};
    std::filesystem::create_directories(ctx.dir);

    const std::string& id = cfg.experiment_id;
    if (id == "scheme_comparison") {
        detail::run_scheme_comparison(ctx);
    } else if (id == "gamma_sweep") {
        detail::run_gamma_sweep(ctx);
    } else if (id == "roughness_study") {
        detail::run_roughness_study(ctx);
    } else if (id == "gradient_fit") {
        detail::run_gradient_fit(ctx);
    } else if (id == "vector_comparison") {
        detail::run_vector_comparison(ctx);
    } else if (id == "multiplicative_fit") {
        detail::run_multiplicative_fit(ctx);
    } else if (id == "viscosity_sweep") {
        detail::run_viscosity_sweep(ctx);
    } else {
        throw ConfigError("unknown experiment '" + id + "'");
    }

    ExperimentOutput out;
    out.directory = ctx.dir;
    out.manifest.config = cfg;
    out.manifest.code_version = kVersion;
    out.manifest.output_files = ctx.files;
    out.manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(ctx.dir, out.manifest);
    return out;
}

}  // namespace spdelab
