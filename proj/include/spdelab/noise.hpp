#pragma once

// Discretised space-time noise.  A cell-averaged white-noise increment over a
// time step dt carries i.i.d. N(0, dt/delta) entries; fractionally coloured
// noise applies the Fourier multiplier (1+n^2)^{-colour_exponent} per mode.
//
// Increments are counter-based: the sample for (master_seed, run_id, step) is
// a pure function of those labels, so runs can be replayed, coupled across
// grids, and scheduled in any order without changing the draw.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

struct NoiseSpec {
    enum class Kind { white, coloured };

    Kind kind = Kind::white;
    double colour_exponent = 0.0;  // multiplier (1+n^2)^{-colour_exponent}
    int components = 1;

    static NoiseSpec white(int components = 1) { return {Kind::white, 0.0, components}; }
    static NoiseSpec coloured(double exponent, int components = 1) {
        return {Kind::coloured, exponent, components};
    }
};

struct NoiseStream {
    std::uint64_t master_seed = 0;
    std::uint64_t run_id = 0;
    std::uint64_t step_counter = 0;
    PeriodicGrid grid;
};

struct NoiseIncrement {
    PeriodicGrid grid;
    int components = 1;
    std::vector<double> values;  // [c*N + j], scaled by sqrt(dt/delta)

    double& operator()(int c, int j) { return values[static_cast<size_t>(c) * grid.n + j]; }
    double operator()(int c, int j) const { return values[static_cast<size_t>(c) * grid.n + j]; }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keyed splitmix64 stream; the key is a bijective mix of the labels.
struct CounterRng {
    std::uint64_t state;

    CounterRng(std::uint64_t seed, std::uint64_t run, std::uint64_t step)
        : state(mix64(mix64(mix64(seed) ^ run) ^ step)) {}

    std::uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Box-Muller pair from two 53-bit uniforms; u1 is kept away from zero.
    void next_gaussian_pair(double& z0, double& z1) {
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double phi = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(phi);
        z1 = r * std::sin(phi);
    }
};

}  // namespace detail

// In-place spectral colouring with multiplier (1+n^2)^{-exponent} per mode,
// applied per component.  Linear in the increment.
inline void apply_colour(NoiseIncrement& xi, double exponent) {
    if (exponent == 0.0) return;
    const int n = xi.grid.n;
    std::vector<std::complex<double>> coeffs(static_cast<size_t>(n / 2 + 1));
    for (int c = 0; c < xi.components; ++c) {
        std::span<double> comp{xi.values.data() + static_cast<size_t>(c) * n,
                               static_cast<size_t>(n)};
        detail::dft_forward(comp, coeffs);
        for (int k = 0; k <= n / 2; ++k) {
            coeffs[static_cast<size_t>(k)] *=
                std::pow(1.0 + static_cast<double>(k) * k, -exponent);
        }
        detail::dft_inverse(coeffs, comp);
    }
}

// Draws the increment for the stream's current step and advances the counter.
// White entries are i.i.d. N(0, dt/delta); coloured noise transforms the same
// white draw, so colour_exponent = 0 reproduces the white samples bitwise.
inline NoiseIncrement next_increment(NoiseStream& stream, const NoiseSpec& spec, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("next_increment: dt must be positive");
    const int n = stream.grid.n;
    NoiseIncrement xi{stream.grid, spec.components,
                      std::vector<double>(static_cast<size_t>(spec.components) * n)};

    detail::CounterRng rng(stream.master_seed, stream.run_id, stream.step_counter);
    const double scale = std::sqrt(dt / stream.grid.delta);
    const size_t count = xi.values.size();
    for (size_t i = 0; i + 1 < count; i += 2) {
        double z0, z1;
        rng.next_gaussian_pair(z0, z1);
        xi.values[i] = scale * z0;
        xi.values[i + 1] = scale * z1;
    }
    if (count % 2 == 1) {
        double z0, z1;
        rng.next_gaussian_pair(z0, z1);
        xi.values[count - 1] = scale * z0;
    }

    if (spec.kind == NoiseSpec::Kind::coloured && spec.colour_exponent != 0.0) {
        apply_colour(xi, spec.colour_exponent);
    }

    stream.step_counter += 1;
    return xi;
}

// Coarse increment as the cell average of the fine one: entry j is the mean of
// fine entries j*m .. j*m+m-1.  Preserves the N(0, dt/delta) law on the coarse
// grid, making both resolutions consistent functionals of one noise instance.
inline NoiseIncrement block_mean(const NoiseIncrement& fine, int m) {
    if (m < 1) throw std::invalid_argument("block_mean: m must be positive");
    if (fine.grid.n % m != 0) throw std::invalid_argument("block_mean: m does not divide N");
    if (m == 1) return fine;
    PeriodicGrid coarse_grid(fine.grid.n / m);
    NoiseIncrement coarse{coarse_grid, fine.components,
                          std::vector<double>(static_cast<size_t>(fine.components) * coarse_grid.n)};
    for (int c = 0; c < fine.components; ++c) {
        for (int j = 0; j < coarse_grid.n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k) acc += fine(c, j * m + k);
            coarse(c, j) = acc / m;
        }
    }
    return coarse;
}

inline std::vector<NoiseStream> make_paired_streams(const PeriodicGrid& grid,
                                                    std::uint64_t master_seed,
                                                    const std::vector<std::uint64_t>& run_ids) {
    for (size_t i = 0; i < run_ids.size(); ++i) {
        for (size_t j = i + 1; j < run_ids.size(); ++j) {
            if (run_ids[i] == run_ids[j]) {
                throw std::invalid_argument("make_paired_streams: duplicate run_ids");
            }
        }
    }
    std::vector<NoiseStream> streams;
    streams.reserve(run_ids.size());
    for (std::uint64_t id : run_ids) streams.push_back(NoiseStream{master_seed, id, 0, grid});
    return streams;
}

}  // namespace spdelab
