#pragma once

// Correction constants for the stencil-induced drift, two-centre bipolar
// coordinates, per-mode spectral statistics and histogram/quantile summaries.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

// Query for the spurious drift constant induced by a transport stencil acting
// on Brownian-regularity states.
struct CorrectionQuery {
    enum class Kind { continuum_two_point, general_stencil, fd_discrete, galerkin_discrete };

    Kind kind = Kind::continuum_two_point;
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    int n = 0;
    double sigma = 1.0;
    double nu = 1.0;

    static CorrectionQuery continuum(double a, double b, double sigma = 1.0, double nu = 1.0) {
        if (a + b <= 0.0) throw std::invalid_argument("CorrectionQuery: a + b must be positive");
        CorrectionQuery q;
        q.kind = Kind::continuum_two_point;
        q.a = a;
        q.b = b;
        q.sigma = sigma;
        q.nu = nu;
        return q;
    }
    static CorrectionQuery general(double c, double sigma = 1.0, double nu = 1.0) {
        CorrectionQuery q;
        q.kind = Kind::general_stencil;
        q.c = c;
        q.sigma = sigma;
        q.nu = nu;
        return q;
    }
    static CorrectionQuery fd(int n, double sigma = 1.0, double nu = 1.0) {
        CorrectionQuery q;
        q.kind = Kind::fd_discrete;
        q.n = n;
        q.sigma = sigma;
        q.nu = nu;
        return q;
    }
    static CorrectionQuery galerkin(int n, double sigma = 1.0, double nu = 1.0) {
        CorrectionQuery q;
        q.kind = Kind::galerkin_discrete;
        q.n = n;
        q.sigma = sigma;
        q.nu = nu;
        return q;
    }
};

// Drift constant for the queried discretisation:
//   continuum two-point:  sigma^2/(4 nu) * (a-b)/(a+b)
//   general stencil:     -c sigma^2 / (8 nu)
//   fd discrete:          sigma^2/(2 pi nu) * sum_{n=1}^{N/2} (1-cos n d)/(d eta_n^2),
//                         eta_n = (2/d) sin(n d/2); every summand is d/2, so
//                         the sum is N-independent and equals sigma^2/(4 nu)
//   galerkin discrete:    same sum with eta_n = n
inline double correction_constant(const CorrectionQuery& q) {
    if (q.nu <= 0.0) throw std::invalid_argument("correction_constant: nu must be positive");
    const double s2 = q.sigma * q.sigma;
    switch (q.kind) {
        case CorrectionQuery::Kind::continuum_two_point:
            return s2 / (4.0 * q.nu) * (q.a - q.b) / (q.a + q.b);
        case CorrectionQuery::Kind::general_stencil:
            return -q.c * s2 / (8.0 * q.nu);
        case CorrectionQuery::Kind::fd_discrete: {
            if (q.n <= 0 || q.n % 2 != 0) {
                throw std::invalid_argument("correction_constant: N must be positive even");
            }
            const double d = kDomainLength / q.n;
            double sum = 0.0;
            for (int n = 1; n <= q.n / 2; ++n) {
                const double eta = 2.0 / d * std::sin(0.5 * n * d);
                sum += (1.0 - std::cos(n * d)) / (d * eta * eta);
            }
            return s2 / (2.0 * std::numbers::pi * q.nu) * sum;
        }
        case CorrectionQuery::Kind::galerkin_discrete: {
            if (q.n <= 0 || q.n % 2 != 0) {
                throw std::invalid_argument("correction_constant: N must be positive even");
            }
            const double d = kDomainLength / q.n;
            double sum = 0.0;
            for (int n = 1; n <= q.n / 2; ++n) {
                sum += (1.0 - std::cos(n * d)) / (d * static_cast<double>(n) * n);
            }
            return s2 / (2.0 * std::numbers::pi * q.nu) * sum;
        }
    }
    throw std::logic_error("correction_constant: unreachable");
}

// Planar point reconstructed from its distances d0, d1 to the two centres
// (0, 0) and (D, 0).  y is clamped to 0 when the distances are (numerically)
// inconsistent; the clamped flag fires only past a 1e-9 * D tolerance.
struct BipolarPoint {
    double x = 0.0;
    double y = 0.0;
    double d0 = 0.0;
    double d1 = 0.0;
    double D = 0.0;
    bool clamped = false;
};

inline BipolarPoint bipolar_coordinates(double d0, double d1, double D) {
    if (D <= 0.0) throw std::invalid_argument("bipolar_coordinates: D must be positive");
    BipolarPoint p;
    p.d0 = d0;
    p.d1 = d1;
    p.D = D;
    p.x = (D * D + d0 * d0 - d1 * d1) / (2.0 * D);
    const double y2 = d0 * d0 - p.x * p.x;
    p.y = y2 > 0.0 ? std::sqrt(y2) : 0.0;
    const double violation =
        std::max({D - (d0 + d1), d0 - (d1 + D), d1 - (d0 + D)});
    p.clamped = violation > 1e-9 * D;
    return p;
}

// Empirical second moments of the spectral coefficients, per mode.
struct SpectrumStats {
    PeriodicGrid grid;
    std::vector<double> mean_sq;    // mean |c_n|^2 over samples, n = 0..N/2
    std::vector<double> std_error;  // standard error of the mean
};

inline SpectrumStats spectrum_stats(const std::vector<Field>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("spectrum_stats: need >= 2 samples");
    const PeriodicGrid grid = samples.front().grid();
    const int modes = grid.n / 2 + 1;
    std::vector<double> sum(static_cast<size_t>(modes), 0.0);
    std::vector<double> sum_sq(static_cast<size_t>(modes), 0.0);
    for (const Field& f : samples) {
        if (!(f.grid() == grid)) throw std::invalid_argument("spectrum_stats: grid mismatch");
        SpectralCoeffs c = spectral_transform(f);
        for (int n = 0; n < modes; ++n) {
            const double p = std::norm(c.coeffs[static_cast<size_t>(n)]);
            sum[static_cast<size_t>(n)] += p;
            sum_sq[static_cast<size_t>(n)] += p * p;
        }
    }
    const double count = static_cast<double>(samples.size());
    SpectrumStats stats{grid, std::vector<double>(static_cast<size_t>(modes)),
                        std::vector<double>(static_cast<size_t>(modes))};
    for (int n = 0; n < modes; ++n) {
        const double mean = sum[static_cast<size_t>(n)] / count;
        const double var =
            std::max(0.0, sum_sq[static_cast<size_t>(n)] / count - mean * mean);
        stats.mean_sq[static_cast<size_t>(n)] = mean;
        stats.std_error[static_cast<size_t>(n)] = std::sqrt(var / count);
    }
    return stats;
}

// Equal-width histogram plus the 5% / 95% quantiles.  Quantiles interpolate
// linearly between order statistics: the p-quantile sits at sorted position
// p * (n - 1).
struct QuantileSummary {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long> counts;
    double q05 = 0.0;
    double q95 = 0.0;
};

inline double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
    const size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline QuantileSummary histogram_quantiles(std::vector<double> values, int nbins) {
    if (values.empty()) throw std::invalid_argument("histogram_quantiles: empty input");
    if (nbins < 1) throw std::invalid_argument("histogram_quantiles: nbins must be positive");
    std::sort(values.begin(), values.end());

    QuantileSummary s;
    s.lo = values.front();
    s.hi = values.back();
    s.q05 = interpolated_quantile(values, 0.05);
    s.q95 = interpolated_quantile(values, 0.95);

    if (s.lo == s.hi) {
        s.counts.assign(1, static_cast<long>(values.size()));
        return s;
    }
    s.counts.assign(static_cast<size_t>(nbins), 0);
    const double width = (s.hi - s.lo) / nbins;
    for (double v : values) {
        int bin = static_cast<int>((v - s.lo) / width);
        bin = std::clamp(bin, 0, nbins - 1);  // top edge is inclusive
        s.counts[static_cast<size_t>(bin)] += 1;
    }
    return s;
}

}  // namespace spdelab
