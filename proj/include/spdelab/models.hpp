#pragma once

// SPDE right-hand sides: the explicitly integrated drift (transport
// nonlinearity plus correction term) and the noise coefficient.  The viscous
// term nu * Laplacian is owned by the time stepper, which treats it
// theta-implicitly.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/operators.hpp"

namespace spdelab {

using ScalarFn = std::function<double(double)>;
// d-vector valued map of a d-vector state.
using VectorFn = std::function<void(const double* u, double* out)>;
// d x d matrix (row major) valued map of a d-vector state.
using MatrixFn = std::function<void(const double* u, double* out)>;

struct Nonlinearity {
    enum class Kind {
        none,            // pure heat equation (plus noise)
        burgers,         // -u * (D u)
        conservative,    // -D G(u)
        gradient,        // h'(u) * (D u)
        nongradient,     // sum_j G_ij(u) (D u_j) + f_i(u)
        multiplicative,  // g(u) * (D u)
    };

    Kind kind = Kind::none;
    StencilSpec stencil = StencilSpec::centred();
    ScalarFn G;          // conservative
    ScalarFn h_prime;    // gradient
    MatrixFn G_matrix;   // nongradient
    VectorFn reaction;   // nongradient
    ScalarFn g;          // multiplicative
};

struct Correction {
    enum class Kind { none, constant, polynomial, divergence, multiplicative_rule };

    Kind kind = Kind::none;
    double gamma = 0.0;                // constant: + gamma sigma^2 / nu
    std::vector<double> poly;          // polynomial: - s^2/(4 nu) * p(u), monomial basis
    VectorFn div_G;                    // divergence: - s^2/(4 nu) * sum_j d_j G_ij(u)
    ScalarFn g_prime;                  // multiplicative_rule: - 1/(4 nu) * g'(u) f(u)^2
    ScalarFn f_noise;
};

struct NoiseCoefficient {
    enum class Kind { additive, state_dependent };

    Kind kind = Kind::additive;
    double sigma = 1.0;  // additive
    ScalarFn f;          // state_dependent, scalar models only

    static NoiseCoefficient additive(double sigma) { return {Kind::additive, sigma, nullptr}; }
    static NoiseCoefficient state_dependent(ScalarFn f) {
        return {Kind::state_dependent, 1.0, std::move(f)};
    }
};

struct ModelSpec {
    std::string name;
    std::string description;
    Nonlinearity nonlinearity;
    Correction correction;
    NoiseCoefficient noise;
    double viscosity = 1.0;
    int components = 1;

    // Noise scale entering correction formulas: the additive sigma, or 1 for
    // state-dependent noise (whose amplitude enters through f explicitly).
    double correction_sigma() const {
        return noise.kind == NoiseCoefficient::Kind::additive ? noise.sigma : 1.0;
    }
};

inline double eval_polynomial(const std::vector<double>& coeffs, double u) {
    double acc = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * u + coeffs[i];
    return acc;
}

// Explicit drift: nonlinearity plus correction, evaluated pointwise.
inline Field eval_drift(const ModelSpec& m, const Field& f) {
    if (f.components() != m.components) {
        throw std::invalid_argument("eval_drift: component mismatch");
    }
    const PeriodicGrid& g = f.grid();
    const int d = m.components;
    Field out(g, d);

    switch (m.nonlinearity.kind) {
        case Nonlinearity::Kind::none:
            break;
        case Nonlinearity::Kind::burgers: {
            Field du = apply_stencil(m.nonlinearity.stencil, f);
            for (int j = 0; j < g.n; ++j) out(0, j) = -f(0, j) * du(0, j);
            break;
        }
        case Nonlinearity::Kind::conservative: {
            Field dG = conservative_derivative(m.nonlinearity.G, m.nonlinearity.stencil, f);
            for (int j = 0; j < g.n; ++j) out(0, j) = -dG(0, j);
            break;
        }
        case Nonlinearity::Kind::gradient: {
            Field du = apply_stencil(m.nonlinearity.stencil, f);
            for (int j = 0; j < g.n; ++j) out(0, j) = m.nonlinearity.h_prime(f(0, j)) * du(0, j);
            break;
        }
        case Nonlinearity::Kind::nongradient: {
            Field du = apply_stencil(m.nonlinearity.stencil, f);
            std::vector<double> u(static_cast<size_t>(d));
            std::vector<double> mat(static_cast<size_t>(d) * d);
            std::vector<double> react(static_cast<size_t>(d));
            for (int j = 0; j < g.n; ++j) {
                for (int c = 0; c < d; ++c) u[static_cast<size_t>(c)] = f(c, j);
                m.nonlinearity.G_matrix(u.data(), mat.data());
                m.nonlinearity.reaction(u.data(), react.data());
                for (int i = 0; i < d; ++i) {
                    double acc = react[static_cast<size_t>(i)];
                    for (int c = 0; c < d; ++c) {
                        acc += mat[static_cast<size_t>(i) * d + c] * du(c, j);
                    }
                    out(i, j) = acc;
                }
            }
            break;
        }
        case Nonlinearity::Kind::multiplicative: {
            Field du = apply_stencil(m.nonlinearity.stencil, f);
            for (int j = 0; j < g.n; ++j) out(0, j) = m.nonlinearity.g(f(0, j)) * du(0, j);
            break;
        }
    }

    const double s = m.correction_sigma();
    switch (m.correction.kind) {
        case Correction::Kind::none:
            break;
        case Correction::Kind::constant: {
            const double value = m.correction.gamma * s * s / m.viscosity;
            for (int c = 0; c < d; ++c) {
                for (int j = 0; j < g.n; ++j) out(c, j) += value;
            }
            break;
        }
        case Correction::Kind::polynomial: {
            if (m.correction.poly.size() > 9) {
                throw std::invalid_argument("eval_drift: correction degree above 8");
            }
            const double scale = -s * s / (4.0 * m.viscosity);
            for (int j = 0; j < g.n; ++j) {
                out(0, j) += scale * eval_polynomial(m.correction.poly, f(0, j));
            }
            break;
        }
        case Correction::Kind::divergence: {
            const double scale = -s * s / (4.0 * m.viscosity);
            std::vector<double> u(static_cast<size_t>(d));
            std::vector<double> div(static_cast<size_t>(d));
            for (int j = 0; j < g.n; ++j) {
                for (int c = 0; c < d; ++c) u[static_cast<size_t>(c)] = f(c, j);
                m.correction.div_G(u.data(), div.data());
                for (int i = 0; i < d; ++i) out(i, j) += scale * div[static_cast<size_t>(i)];
            }
            break;
        }
        case Correction::Kind::multiplicative_rule: {
            const double scale = -1.0 / (4.0 * m.viscosity);
            for (int j = 0; j < g.n; ++j) {
                double fu = m.correction.f_noise(f(0, j));
                out(0, j) += scale * m.correction.g_prime(f(0, j)) * fu * fu;
            }
            break;
        }
    }
    return out;
}

// Pointwise noise coefficient sigma(u).
inline Field eval_noise_coefficient(const ModelSpec& m, const Field& f) {
    if (f.components() != m.components) {
        throw std::invalid_argument("eval_noise_coefficient: component mismatch");
    }
    Field out(f.grid(), m.components);
    if (m.noise.kind == NoiseCoefficient::Kind::additive) {
        for (double& v : out.values()) v = m.noise.sigma;
    } else {
        for (int c = 0; c < m.components; ++c) {
            for (int j = 0; j < f.size(); ++j) out(c, j) = m.noise.f(f(c, j));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in model catalog.

// Stochastic heat equation du = nu u_xx dt + sigma dw.
inline ModelSpec linear_model(double nu = 1.0, double sigma = 1.0) {
    ModelSpec m;
    m.name = "linear";
    m.description = "heat equation with additive noise (no transport term)";
    m.nonlinearity.kind = Nonlinearity::Kind::none;
    m.noise = NoiseCoefficient::additive(sigma);
    m.viscosity = nu;
    return m;
}

// Burgers drift -u D^{a,b} u with additive noise.
inline ModelSpec burgers_fd(int a, int b, double nu = 1.0, double sigma = 1.0) {
    ModelSpec m;
    m.name = "burgers_fd";
    m.description = "Burgers nonlinearity -u D u with a two-point stencil";
    m.nonlinearity.kind = Nonlinearity::Kind::burgers;
    m.nonlinearity.stencil = StencilSpec::two_point(a, b);
    m.noise = NoiseCoefficient::additive(sigma);
    m.viscosity = nu;
    return m;
}

// Convergent conservative form -D^{0,1}(u^2/2) with additive noise.
inline ModelSpec burgers_conservative(double nu = 1.0, double sigma = 1.0) {
    ModelSpec m;
    m.name = "burgers_conservative";
    m.description = "conservative Burgers drift -(u_j^2 - u_{j-1}^2) / (2 delta)";
    m.nonlinearity.kind = Nonlinearity::Kind::conservative;
    m.nonlinearity.stencil = StencilSpec::left_sided();
    m.nonlinearity.G = [](double u) { return 0.5 * u * u; };
    m.noise = NoiseCoefficient::additive(sigma);
    m.viscosity = nu;
    return m;
}

// Gradient-type transport h'(u) D u with h'(u) = sin(u)^2.
inline ModelSpec gradient_sin2(double nu = 1.0, double sigma = 1.0,
                               StencilSpec stencil = StencilSpec::right_sided()) {
    ModelSpec m;
    m.name = "gradient_sin2";
    m.description = "gradient transport h'(u) D u with h'(u) = sin(u)^2";
    m.nonlinearity.kind = Nonlinearity::Kind::gradient;
    m.nonlinearity.stencil = stencil;
    m.nonlinearity.h_prime = [](double u) { double s = std::sin(u); return s * s; };
    m.noise = NoiseCoefficient::additive(sigma);
    m.viscosity = nu;
    return m;
}

// Antiderivative of sin(u)^2 and the conjectured correction sin(2u).
inline double sin2_antiderivative(double u) { return 0.5 * u - 0.25 * std::sin(2.0 * u); }
inline double sin2_correction(double u) { return std::sin(2.0 * u); }

// R^2-valued transport equation whose coefficient matrix has no
// antiderivative: viscosity 1/s^2, matrix transport, reaction term and
// additive noise sqrt(2).
inline ModelSpec strange_spde(double s = 1.0, StencilSpec stencil = StencilSpec::right_sided()) {
    ModelSpec m;
    m.name = "strange_spde";
    m.description = "R^2-valued transport with non-integrable coefficient matrix";
    m.components = 2;
    m.viscosity = 1.0 / (s * s);
    m.nonlinearity.kind = Nonlinearity::Kind::nongradient;
    m.nonlinearity.stencil = stencil;
    const double amp = 2.0 / (s * s);
    m.nonlinearity.G_matrix = [amp](const double* u, double* out) {
        out[0] = 0.0;
        out[1] = amp * (std::cos(u[1]) - std::sin(u[0]));
        out[2] = amp * (std::sin(u[0]) - std::cos(u[1]));
        out[3] = 0.0;
    };
    const double ramp = 4.0 / (s * s);
    m.nonlinearity.reaction = [ramp](const double* u, double* out) {
        out[0] = ramp * std::sin(u[0]) * std::cos(u[0]);
        out[1] = -ramp * std::cos(u[1]) * std::sin(u[1]);
    };
    m.noise = NoiseCoefficient::additive(std::sqrt(2.0));
    return m;
}

// Divergence of the strange_spde coefficient matrix, for the corrected
// centred scheme: sum_j d_j G_ij(u).
inline VectorFn strange_spde_div_G(double s) {
    const double amp = 2.0 / (s * s);
    return [amp](const double* u, double* out) {
        out[0] = -amp * std::sin(u[1]);
        out[1] = amp * std::cos(u[0]);
    };
}

inline ModelSpec strange_spde_corrected(double s = 1.0) {
    ModelSpec m = strange_spde(s, StencilSpec::centred());
    m.name = "strange_spde_corrected";
    m.description = "centred strange_spde with the divergence correction term";
    m.correction.kind = Correction::Kind::divergence;
    m.correction.div_G = strange_spde_div_G(s);
    return m;
}

inline double cos3_noise_coefficient(double u) { return 1.0 + 0.5 * std::cos(3.0 * u); }

// Multiplicative-noise transport g(u) D u with g(u) = -u, f(u) = 1 + cos(3u)/2.
inline ModelSpec multiplicative_cos3(double nu = 1.0,
                                     StencilSpec stencil = StencilSpec::right_sided()) {
    ModelSpec m;
    m.name = "multiplicative_cos3";
    m.description = "transport g(u) = -u with state-dependent noise 1 + cos(3u)/2";
    m.nonlinearity.kind = Nonlinearity::Kind::multiplicative;
    m.nonlinearity.stencil = stencil;
    m.nonlinearity.g = [](double u) { return -u; };
    m.noise = NoiseCoefficient::state_dependent(cos3_noise_coefficient);
    m.viscosity = nu;
    return m;
}

// Vanishing-viscosity regime: viscosity eps, noise amplitude sqrt(eps).
inline ModelSpec inviscid_regime(double eps, int a = 1, int b = 0) {
    ModelSpec m = burgers_fd(a, b, eps, std::sqrt(eps));
    m.name = "inviscid_regime";
    m.description = "Burgers with viscosity eps and noise sqrt(eps)";
    return m;
}

inline std::vector<ModelSpec> builtin_models() {
    return {
        linear_model(),
        burgers_fd(1, 0),
        burgers_conservative(),
        gradient_sin2(),
        strange_spde(),
        multiplicative_cos3(),
        inviscid_regime(0.05),
    };
}

}  // namespace spdelab
