#pragma once

// Periodic spatial grids on [0, 2*pi), field containers with cyclic indexing,
// the weighted grid L2 norm, cross-grid restriction by gridpoint sampling and
// the half-spectrum discrete Fourier transform.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "spdelab/fft.hpp"

namespace spdelab {

inline constexpr double kDomainLength = 2.0 * std::numbers::pi;

// Uniform periodic grid with N points, spacing delta = 2*pi/N, x_j = j*delta.
struct PeriodicGrid {
    int n = 0;
    double delta = 0.0;

    PeriodicGrid() = default;

    explicit PeriodicGrid(int points) : n(points), delta(kDomainLength / points) {
        if (points <= 0 || points % 2 != 0) {
            throw std::invalid_argument("PeriodicGrid: N must be a positive even integer");
        }
    }

    double point(int j) const { return delta * j; }

    friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) { return a.n == b.n; }
};

// d-component real-valued state vector on a periodic grid.  Index j is cyclic:
// j = N is the same point as j = 0.
class Field {
public:
    Field() = default;

    explicit Field(PeriodicGrid grid, int components = 1, double fill = 0.0)
        : grid_(grid), components_(components),
          values_(static_cast<size_t>(components) * grid.n, fill) {
        if (components < 1) throw std::invalid_argument("Field: components must be >= 1");
    }

    static Field from_function(PeriodicGrid grid, const std::function<double(double)>& f) {
        Field out(grid);
        for (int j = 0; j < grid.n; ++j) out(0, j) = f(grid.point(j));
        return out;
    }

    const PeriodicGrid& grid() const { return grid_; }
    int size() const { return grid_.n; }
    int components() const { return components_; }

    double& operator()(int c, int j) { return values_[static_cast<size_t>(c) * grid_.n + j]; }
    double operator()(int c, int j) const { return values_[static_cast<size_t>(c) * grid_.n + j]; }

    // Cyclic access; offset may take j outside [0, N).
    double cyclic(int c, int j) const {
        int n = grid_.n;
        int jj = j % n;
        if (jj < 0) jj += n;
        return (*this)(c, jj);
    }

    std::span<double> component(int c) {
        return {values_.data() + static_cast<size_t>(c) * grid_.n, static_cast<size_t>(grid_.n)};
    }
    std::span<const double> component(int c) const {
        return {values_.data() + static_cast<size_t>(c) * grid_.n, static_cast<size_t>(grid_.n)};
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool all_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    Field& operator+=(const Field& other) {
        check_shape(other);
        for (size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
        return *this;
    }

    Field& operator-=(const Field& other) {
        check_shape(other);
        for (size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
        return *this;
    }

    Field& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field f) { return f *= s; }

private:
    void check_shape(const Field& other) const {
        if (!(grid_ == other.grid_) || components_ != other.components_) {
            throw std::invalid_argument("Field: shape mismatch");
        }
    }

    PeriodicGrid grid_;
    int components_ = 1;
    std::vector<double> values_;
};

// Half-spectrum Fourier coefficients of a single-component field: modes
// n = 0..N/2 with c_{-n} = conj(c_n) implied.  Mode 0 and mode N/2 are real.
struct SpectralCoeffs {
    PeriodicGrid grid;
    std::vector<std::complex<double>> coeffs;

    int modes() const { return grid.n / 2 + 1; }
};

// Grid L2 norm with Riemann weight delta, comparable across resolutions:
// sqrt(delta * sum_{c,j} f_{c,j}^2).
inline double l2_norm(const Field& f) {
    double acc = 0.0;
    for (double v : f.values()) acc += v * v;
    return std::sqrt(f.grid().delta * acc);
}

// Pointwise sampling at shared gridpoints: coarse_j = fine_{j*m}.
inline Field restrict_to_coarse(const Field& fine, int m) {
    if (m < 1) throw std::invalid_argument("restrict_to_coarse: m must be positive");
    if (fine.size() % m != 0) {
        throw std::invalid_argument("restrict_to_coarse: m does not divide N");
    }
    PeriodicGrid coarse_grid(fine.size() / m);
    Field coarse(coarse_grid, fine.components());
    for (int c = 0; c < fine.components(); ++c) {
        for (int j = 0; j < coarse_grid.n; ++j) coarse(c, j) = fine(c, j * m);
    }
    return coarse;
}

inline SpectralCoeffs spectral_transform(const Field& f) {
    if (f.components() != 1) {
        throw std::invalid_argument("spectral_transform: one component expected");
    }
    SpectralCoeffs out{f.grid(), std::vector<std::complex<double>>(f.grid().n / 2 + 1)};
    detail::dft_forward(f.component(0), out.coeffs);
    return out;
}

inline Field inverse_transform(const SpectralCoeffs& c) {
    Field out(c.grid);
    detail::dft_inverse(c.coeffs, out.component(0));
    return out;
}

// Spectral energy consistent with l2_norm: 2*pi * sum over the full spectrum
// of |c_n|^2, i.e. interior modes count twice.
inline double spectral_energy(const SpectralCoeffs& c) {
    double acc = 0.0;
    const int half = c.grid.n / 2;
    for (int n = 0; n <= half; ++n) {
        double w = (n == 0 || n == half) ? 1.0 : 2.0;
        acc += w * std::norm(c.coeffs[static_cast<size_t>(n)]);
    }
    return kDomainLength * acc;
}

}  // namespace spdelab
