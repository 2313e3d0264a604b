#pragma once

// Nelder-Mead simplex minimiser and the correction-polynomial fitting loop.
// The fit objective compares a reference run of the approximating equation
// against corrected-equation runs on a finer grid driven by block-mean-coupled
// noise, so every evaluation at the same coefficients is bitwise identical.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

struct SimplexConfig {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_step = 0.1;
    int max_evals = 2000;
    double f_tolerance = 1e-10;
    double x_tolerance = 1e-9;
};

struct FitResult {
    std::vector<double> best_params;
    double best_value = std::numeric_limits<double>::infinity();
    int evals_used = 0;
    bool converged = false;
    std::vector<std::pair<std::vector<double>, double>> evaluation_log;
};

using Objective = std::function<double(const std::vector<double>&)>;

namespace detail {

inline double sanitize_objective(double v) {
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace detail

// Standard reflect / expand / contract / shrink iteration.  The initial
// simplex is x0 plus one axis step of size initial_step per coordinate.
// Stops when the value spread falls below f_tolerance, the simplex diameter
// falls below x_tolerance, or the evaluation budget runs out.
inline FitResult nelder_mead(const Objective& objective, const std::vector<double>& x0,
                             const SimplexConfig& cfg) {
    if (x0.empty()) throw std::invalid_argument("nelder_mead: empty start point");
    if (cfg.reflection <= 0.0 || cfg.expansion <= cfg.reflection || cfg.contraction <= 0.0 ||
        cfg.shrink <= 0.0) {
        throw std::invalid_argument("nelder_mead: invalid simplex coefficients");
    }
    const size_t dim = x0.size();

    FitResult result;
    auto evaluate = [&](const std::vector<double>& x) {
        double v = detail::sanitize_objective(objective(x));
        result.evaluation_log.emplace_back(x, v);
        result.evals_used += 1;
        return v;
    };

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    std::vector<double> values(dim + 1);
    for (size_t i = 0; i < dim; ++i) simplex[i + 1][i] += cfg.initial_step;
    for (size_t i = 0; i <= dim; ++i) {
        values[i] = evaluate(simplex[i]);
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument("nelder_mead: objective not finite at initial simplex");
        }
    }

    std::vector<size_t> order(dim + 1);
    std::vector<double> centroid(dim), candidate(dim);

    while (result.evals_used < cfg.max_evals) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return values[a] < values[b]; });
        const size_t best = order.front(), worst = order.back(),
                     second_worst = order[dim - 1];

        // convergence checks
        double spread = values[worst] - values[best];
        double diameter = 0.0;
        for (size_t i = 0; i <= dim; ++i) {
            for (size_t k = 0; k < dim; ++k) {
                diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
            }
        }
        if (spread < cfg.f_tolerance || diameter < cfg.x_tolerance) {
            result.converged = true;
            break;
        }

        for (size_t k = 0; k < dim; ++k) {
            double acc = 0.0;
            for (size_t i = 0; i <= dim; ++i) {
                if (i != worst) acc += simplex[i][k];
            }
            centroid[k] = acc / static_cast<double>(dim);
        }

        auto move = [&](double coeff) {
            for (size_t k = 0; k < dim; ++k) {
                candidate[k] = centroid[k] + coeff * (centroid[k] - simplex[worst][k]);
            }
            return evaluate(candidate);
        };

        double f_reflect = move(cfg.reflection);
        if (f_reflect < values[best]) {
            std::vector<double> reflect_point = candidate;
            if (result.evals_used >= cfg.max_evals) {
                simplex[worst] = reflect_point;
                values[worst] = f_reflect;
                break;
            }
            double f_expand = move(cfg.expansion * cfg.reflection);
            if (f_expand < f_reflect) {
                simplex[worst] = candidate;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect_point;
                values[worst] = f_reflect;
            }
        } else if (f_reflect < values[second_worst]) {
            simplex[worst] = candidate;
            values[worst] = f_reflect;
        } else {
            bool outside = f_reflect < values[worst];
            if (result.evals_used >= cfg.max_evals) break;
            double f_contract =
                move(outside ? cfg.contraction * cfg.reflection : -cfg.contraction);
            if (f_contract < std::min(f_reflect, values[worst])) {
                simplex[worst] = candidate;
                values[worst] = f_contract;
            } else {
                // shrink towards the best vertex
                for (size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (size_t k = 0; k < dim; ++k) {
                        simplex[i][k] =
                            simplex[best][k] + cfg.shrink * (simplex[i][k] - simplex[best][k]);
                    }
                    if (result.evals_used >= cfg.max_evals) break;
                    values[i] = evaluate(simplex[i]);
                }
            }
        }
    }

    auto best_it = std::min_element(
        result.evaluation_log.begin(), result.evaluation_log.end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    result.best_params = best_it->first;
    result.best_value = best_it->second;
    return result;
}

// Fits polynomial correction coefficients by minimising the grid L2 distance
// between the reference final state (approximating equation, coarse grid) and
// the corrected-equation final state restricted from the finer grid.
//
// solver: coefficient vector -> final fine-grid field; failures (divergence,
// CFL rejection) count as +infinity and stay in the evaluation log.
inline FitResult fit_correction_polynomial(
    const Field& reference_final,
    const std::function<Field(const std::vector<double>&)>& solver, int refine_factor,
    int degree, const SimplexConfig& cfg) {
    if (degree < 0 || degree > 8) {
        throw std::invalid_argument("fit_correction_polynomial: degree must be in 0..8");
    }
    Objective objective = [&](const std::vector<double>& coeffs) -> double {
        try {
            Field fine = solver(coeffs);
            if (!fine.all_finite()) return std::numeric_limits<double>::infinity();
            return l2_norm(restrict_to_coarse(fine, refine_factor) - reference_final);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    std::vector<double> x0(static_cast<size_t>(degree) + 1, 0.0);
    return nelder_mead(objective, x0, cfg);
}

}  // namespace spdelab
