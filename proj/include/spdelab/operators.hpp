#pragma once

// Difference stencils and discrete Laplacians.
//
// Two-point stencil with integer offsets a, b (in units of the grid spacing):
//   (D f)_j = (f_{j+a} - f_{j-b}) / ((a+b) delta)
// General four-point stencil, second order for every c:
//   (D f)_j = (c f_{j+2} + (1-3c) f_{j+1} + 3c f_j - (1+c) f_{j-1}) / (2 delta)
// c = 0 coincides with the symmetric two-point stencil (1,1).
//
// Laplacians: the three-point finite difference operator with symbol
// -(2/delta * sin(n delta/2))^2, and the spectral Galerkin operator, diagonal
// in the Fourier basis with eigenvalue -n^2.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

struct StencilSpec {
    enum class Variant { two_point, general };

    Variant variant = Variant::two_point;
    int a = 1;
    int b = 1;
    double c = 0.0;

    // Offsets are restricted to small nonnegative integers so the stencil
    // stays on-grid; the experiments use (1,0), (1,1) and (0,1).
    static StencilSpec two_point(int a, int b) {
        if (a < 0 || b < 0) throw std::invalid_argument("StencilSpec: a and b must be >= 0");
        if (a + b == 0) throw std::invalid_argument("StencilSpec: a + b must be positive");
        StencilSpec s;
        s.variant = Variant::two_point;
        s.a = a;
        s.b = b;
        return s;
    }

    static StencilSpec general(double c) {
        StencilSpec s;
        s.variant = Variant::general;
        s.c = c;
        return s;
    }

    static StencilSpec right_sided() { return two_point(1, 0); }
    static StencilSpec centred() { return two_point(1, 1); }
    static StencilSpec left_sided() { return two_point(0, 1); }
};

struct LinearOperatorSpec {
    enum class Kind { fd_laplacian, galerkin_laplacian };

    Kind kind = Kind::fd_laplacian;
    PeriodicGrid grid;
};

// Applies the difference stencil per component with cyclic indexing.
inline Field apply_stencil(const StencilSpec& s, const Field& f) {
    const PeriodicGrid& g = f.grid();
    Field out(g, f.components());
    if (s.variant == StencilSpec::Variant::two_point) {
        const double inv = 1.0 / ((s.a + s.b) * g.delta);
        for (int c = 0; c < f.components(); ++c) {
            for (int j = 0; j < g.n; ++j) {
                out(c, j) = (f.cyclic(c, j + s.a) - f.cyclic(c, j - s.b)) * inv;
            }
        }
    } else {
        const double inv = 1.0 / (2.0 * g.delta);
        const double w2 = s.c, w1 = 1.0 - 3.0 * s.c, w0 = 3.0 * s.c, wm1 = -(1.0 + s.c);
        for (int c = 0; c < f.components(); ++c) {
            for (int j = 0; j < g.n; ++j) {
                out(c, j) = (w2 * f.cyclic(c, j + 2) + w1 * f.cyclic(c, j + 1) +
                             w0 * f.cyclic(c, j) + wm1 * f.cyclic(c, j - 1)) *
                            inv;
            }
        }
    }
    return out;
}

inline Field apply_linear_operator(const LinearOperatorSpec& op, const Field& f) {
    if (!(op.grid == f.grid())) {
        throw std::invalid_argument("apply_linear_operator: grid mismatch");
    }
    const PeriodicGrid& g = f.grid();
    Field out(g, f.components());
    if (op.kind == LinearOperatorSpec::Kind::fd_laplacian) {
        const double inv = 1.0 / (g.delta * g.delta);
        for (int c = 0; c < f.components(); ++c) {
            for (int j = 0; j < g.n; ++j) {
                out(c, j) =
                    (f.cyclic(c, j + 1) - 2.0 * f.cyclic(c, j) + f.cyclic(c, j - 1)) * inv;
            }
        }
    } else {
        std::vector<std::complex<double>> coeffs(static_cast<size_t>(g.n / 2 + 1));
        for (int c = 0; c < f.components(); ++c) {
            detail::dft_forward(f.component(c), coeffs);
            for (int n = 0; n <= g.n / 2; ++n) {
                coeffs[static_cast<size_t>(n)] *= -static_cast<double>(n) * n;
            }
            detail::dft_inverse(coeffs, out.component(c));
        }
    }
    return out;
}

// |M_eps(k)| where M_eps(k) = (exp(i k eps) - 1 - i k eps) / eps is the
// Fourier multiplier of the gap between the right-sided difference quotient
// and the exact derivative.
inline double multiplier_gap(double eps, double k) {
    if (eps <= 0.0) throw std::invalid_argument("multiplier_gap: eps must be positive");
    const double theta = k * eps;
    const double re = std::cos(theta) - 1.0;
    const double im = std::sin(theta) - theta;
    return std::sqrt(re * re + im * im) / eps;
}

// D_eps(G(u)): the conservative form of a transport nonlinearity.  With
// G(u) = u^2/2 and the left-sided stencil this is the convergent scheme
// (u_j^2/2 - u_{j-1}^2/2) / delta.
inline Field conservative_derivative(const std::function<double(double)>& G,
                                     const StencilSpec& s, const Field& f) {
    Field mapped(f.grid(), f.components());
    for (int c = 0; c < f.components(); ++c) {
        for (int j = 0; j < f.size(); ++j) mapped(c, j) = G(f(c, j));
    }
    return apply_stencil(s, mapped);
}

}  // namespace spdelab
