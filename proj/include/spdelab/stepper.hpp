#pragma once

// Semi-implicit theta-method time integrator.  Each step solves
//
//   (I - nu theta dt L) u^{n+1} = (I + nu (1-theta) dt L) u^n
//                                 + F(u^n) dt + sigma(u^n) * xi^n,
//
// where L is the linear backend's Laplacian, F is the model's explicit drift
// and xi^n already carries the sqrt(dt/delta) noise scaling.  The transport
// term is explicit, so the Courant number max|u| dt / delta is checked each
// step against the configured limit.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/models.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

struct StepperConfig {
    enum class Backend { cyclic_tridiagonal, spectral_diagonal };
    enum class CflPolicy { reject, warn };

    double theta = 0.5;
    double dt = 1e-3;
    Backend backend = Backend::cyclic_tridiagonal;
    double courant_limit = 0.5;
    CflPolicy cfl_policy = CflPolicy::warn;
    int snapshot_stride = 0;  // 0 = keep no intermediate states

    LinearOperatorSpec laplacian(const PeriodicGrid& grid) const {
        return {backend == Backend::cyclic_tridiagonal
                    ? LinearOperatorSpec::Kind::fd_laplacian
                    : LinearOperatorSpec::Kind::galerkin_laplacian,
                grid};
    }
};

struct TrajectoryState {
    double time = 0.0;
    Field field;
    long step_index = 0;
};

struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Largest transport Courant number of the state: max_j |f_j| * dt / delta,
// maximised over components.
inline double cfl_courant(const Field& f, double dt, double delta) {
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    return peak * dt / delta;
}

namespace detail {

// Thomas algorithm for the constant-coefficient system
// (-beta, diag, -beta) x = rhs with the two extra rhs-corner entries already
// folded in by the Sherman-Morrison caller.  b1 and bn are the modified first
// and last diagonal entries.
inline void thomas_constant(double diag, double beta, double b1, double bn,
                            std::vector<double>& rhs, std::vector<double>& scratch) {
    const size_t n = rhs.size();
    scratch.resize(n);
    // forward elimination
    double pivot = b1;
    scratch[0] = -beta / pivot;
    rhs[0] /= pivot;
    for (size_t i = 1; i < n; ++i) {
        double d = (i == n - 1) ? bn : diag;
        pivot = d + beta * scratch[i - 1];
        scratch[i] = -beta / pivot;
        rhs[i] = (rhs[i] + beta * rhs[i - 1]) / pivot;
    }
    // back substitution
    for (size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

// Solves (I - alpha * Delta_fd) x = rhs on a periodic grid via the
// Sherman-Morrison corner correction of the Thomas solve.
inline void solve_cyclic_fd(const PeriodicGrid& g, double alpha, std::span<const double> rhs,
                            std::span<double> x) {
    const int n = g.n;
    const double beta = alpha / (g.delta * g.delta);
    const double diag = 1.0 + 2.0 * beta;

    if (n == 2) {
        // both neighbours of a point coincide: A = [[d, -2b], [-2b, d]]
        const double od = -2.0 * beta;
        const double det = diag * diag - od * od;
        x[0] = (diag * rhs[0] - od * rhs[1]) / det;
        x[1] = (diag * rhs[1] - od * rhs[0]) / det;
        return;
    }

    // A = A' + u v^T with u = (gamma, 0, .., 0, -beta)^T,
    // v = (1, 0, .., 0, -beta/gamma)^T; gamma = -diag keeps A' well conditioned.
    const double gamma = -diag;
    const double b1 = diag - gamma;
    const double bn = diag - beta * beta / gamma;

    std::vector<double> y(rhs.begin(), rhs.end());
    std::vector<double> z(static_cast<size_t>(n), 0.0);
    z[0] = gamma;
    z[static_cast<size_t>(n) - 1] = -beta;

    std::vector<double> scratch;
    thomas_constant(diag, beta, b1, bn, y, scratch);
    thomas_constant(diag, beta, b1, bn, z, scratch);

    const double vy = y[0] - beta / gamma * y[static_cast<size_t>(n) - 1];
    const double vz = z[0] - beta / gamma * z[static_cast<size_t>(n) - 1];
    const double factor = vy / (1.0 + vz);
    for (int i = 0; i < n; ++i) {
        x[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] - factor * z[static_cast<size_t>(i)];
    }
}

}  // namespace detail

// Solves (I - alpha L) x = rhs for the backend's Laplacian, per component.
// alpha = nu * theta * dt >= 0; alpha = 0 returns rhs unchanged.
inline Field solve_shifted_linear(StepperConfig::Backend backend, double alpha,
                                  const Field& rhs) {
    if (alpha < 0.0) throw std::invalid_argument("solve_shifted_linear: alpha must be >= 0");
    if (alpha == 0.0) return rhs;
    const PeriodicGrid& g = rhs.grid();
    Field x(g, rhs.components());
    if (backend == StepperConfig::Backend::cyclic_tridiagonal) {
        for (int c = 0; c < rhs.components(); ++c) {
            detail::solve_cyclic_fd(g, alpha, rhs.component(c), x.component(c));
        }
    } else {
        std::vector<std::complex<double>> coeffs(static_cast<size_t>(g.n / 2 + 1));
        for (int c = 0; c < rhs.components(); ++c) {
            detail::dft_forward(rhs.component(c), coeffs);
            for (int n = 0; n <= g.n / 2; ++n) {
                coeffs[static_cast<size_t>(n)] /= 1.0 + alpha * static_cast<double>(n) * n;
            }
            detail::dft_inverse(coeffs, x.component(c));
        }
    }
    return x;
}

// One theta-method step.  Throws CflViolation under the reject policy; the
// warn policy leaves reporting to the caller (integrate tracks the maximum
// observed Courant number).
inline TrajectoryState theta_step(const TrajectoryState& state, const ModelSpec& model,
                                  const StepperConfig& cfg, const NoiseIncrement& xi) {
    const PeriodicGrid& g = state.field.grid();
    const double courant = cfl_courant(state.field, cfg.dt, g.delta);
    if (cfg.cfl_policy == StepperConfig::CflPolicy::reject && courant > cfg.courant_limit) {
        throw CflViolation("CFL violation: courant " + std::to_string(courant) + " > limit " +
                           std::to_string(cfg.courant_limit) + " at t = " +
                           std::to_string(state.time));
    }

    const double nu = model.viscosity;
    Field rhs = state.field;
    const double expl = nu * (1.0 - cfg.theta) * cfg.dt;
    if (expl != 0.0) {
        Field lap = apply_linear_operator(cfg.laplacian(g), state.field);
        lap *= expl;
        rhs += lap;
    }

    Field drift = eval_drift(model, state.field);
    drift *= cfg.dt;
    rhs += drift;

    Field sigma = eval_noise_coefficient(model, state.field);
    if (!(xi.grid == g) || xi.components != model.components) {
        throw std::invalid_argument("theta_step: noise increment shape mismatch");
    }
    for (int c = 0; c < model.components; ++c) {
        for (int j = 0; j < g.n; ++j) rhs(c, j) += sigma(c, j) * xi(c, j);
    }

    TrajectoryState next;
    next.field = solve_shifted_linear(cfg.backend, nu * cfg.theta * cfg.dt, rhs);
    next.step_index = state.step_index + 1;
    next.time = static_cast<double>(next.step_index) * cfg.dt;
    return next;
}

struct IntegrationResult {
    TrajectoryState final_state;
    bool diverged = false;
    long divergence_step = -1;
    double divergence_time = -1.0;
    double max_courant = 0.0;
    bool cfl_exceeded = false;  // warn policy: limit was exceeded at least once
    std::vector<TrajectoryState> snapshots;

    bool completed() const { return !diverged; }
};

// Integrates K = T/dt steps, pulling the increment for step k from noise_at.
// A non-finite state stops the run and is reported, not thrown.
inline IntegrationResult integrate_source(const ModelSpec& model, const StepperConfig& cfg,
                                          const std::function<NoiseIncrement(long)>& noise_at,
                                          const Field& u0, double T) {
    if (T < 0.0) throw std::invalid_argument("integrate: T must be >= 0");
    const double steps_real = T / cfg.dt;
    const long steps = std::lround(steps_real);
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * std::max(1.0, steps_real)) {
        throw std::invalid_argument("integrate: T must be an integer multiple of dt");
    }

    IntegrationResult result;
    TrajectoryState state{0.0, u0, 0};
    if (cfg.snapshot_stride > 0) result.snapshots.push_back(state);

    for (long k = 0; k < steps; ++k) {
        NoiseIncrement xi = noise_at(k);
        result.max_courant =
            std::max(result.max_courant, cfl_courant(state.field, cfg.dt, u0.grid().delta));
        state = theta_step(state, model, cfg, xi);

        if (!state.field.all_finite()) {
            result.diverged = true;
            result.divergence_step = state.step_index;
            result.divergence_time = state.time;
            result.final_state = state;
            return result;
        }
        if (cfg.snapshot_stride > 0 && state.step_index % cfg.snapshot_stride == 0) {
            result.snapshots.push_back(state);
        }
    }
    result.cfl_exceeded = result.max_courant > cfg.courant_limit;
    result.final_state = state;
    return result;
}

// Stream-driven integration, consuming increments in step order.  When the
// stream lives on a finer grid than the state (N_stream = m * N_state), each
// increment is block-averaged onto the state grid, which couples runs on both
// grids to the same noise instance.
inline IntegrationResult integrate(const ModelSpec& model, const StepperConfig& cfg,
                                   NoiseStream& stream, const NoiseSpec& spec, const Field& u0,
                                   double T) {
    if (stream.grid.n % u0.grid().n != 0) {
        throw std::invalid_argument("integrate: stream grid must refine the state grid");
    }
    const int m = stream.grid.n / u0.grid().n;
    if (spec.components != model.components) {
        throw std::invalid_argument("integrate: noise components mismatch");
    }
    auto noise_at = [&](long) {
        NoiseIncrement xi = next_increment(stream, spec, cfg.dt);
        return m > 1 ? block_mean(xi, m) : xi;
    };
    return integrate_source(model, cfg, noise_at, u0, T);
}

}  // namespace spdelab
