#pragma once

// Real-data discrete Fourier transforms on top of FFTW, with a per-size plan
// cache.  Conventions used throughout the library:
//
//   forward:  c_n = (1/N) sum_j f_j exp(-i n x_j),   n = 0..N/2
//   inverse:  f_j = sum_{n=-N/2+1}^{N/2} c_n exp(i n x_j),  c_{-n} = conj(c_n)
//
// Only the half-spectrum n = 0..N/2 is stored for real data.

#include <fftw3.h>

#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>

namespace spdelab::detail {

class FftPlan {
public:
    explicit FftPlan(int n)
        : n_(n),
          real_(fftw_alloc_real(static_cast<size_t>(n))),
          cplx_(fftw_alloc_complex(static_cast<size_t>(n / 2 + 1))),
          fwd_(fftw_plan_dft_r2c_1d(n, real_, cplx_, FFTW_ESTIMATE)),
          inv_(fftw_plan_dft_c2r_1d(n, cplx_, real_, FFTW_ESTIMATE)) {}

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    ~FftPlan() {
        fftw_destroy_plan(inv_);
        fftw_destroy_plan(fwd_);
        fftw_free(cplx_);
        fftw_free(real_);
    }

    int size() const { return n_; }
    int modes() const { return n_ / 2 + 1; }

    // Buffers are shared; callers must hold the cache mutex while executing.
    void forward_locked(std::span<const double> in, std::span<std::complex<double>> out) {
        for (int j = 0; j < n_; ++j) real_[j] = in[static_cast<size_t>(j)];
        fftw_execute(fwd_);
        const double scale = 1.0 / n_;
        for (int k = 0; k < modes(); ++k) {
            out[static_cast<size_t>(k)] =
                std::complex<double>(cplx_[k][0] * scale, cplx_[k][1] * scale);
        }
    }

    void inverse_locked(std::span<const std::complex<double>> in, std::span<double> out) {
        for (int k = 0; k < modes(); ++k) {
            cplx_[k][0] = in[static_cast<size_t>(k)].real();
            cplx_[k][1] = in[static_cast<size_t>(k)].imag();
        }
        fftw_execute(inv_);
        for (int j = 0; j < n_; ++j) out[static_cast<size_t>(j)] = real_[j];
    }

private:
    int n_;
    double* real_;
    fftw_complex* cplx_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

struct FftCache {
    std::mutex mutex;
    std::unordered_map<int, std::unique_ptr<FftPlan>> plans;

    static FftCache& instance() {
        static FftCache cache;
        return cache;
    }

    FftPlan& plan_locked(int n) {
        auto it = plans.find(n);
        if (it == plans.end()) {
            it = plans.emplace(n, std::make_unique<FftPlan>(n)).first;
        }
        return *it->second;
    }
};

// f has n entries, c has n/2+1 entries.
inline void dft_forward(std::span<const double> f, std::span<std::complex<double>> c) {
    auto& cache = FftCache::instance();
    std::scoped_lock lock(cache.mutex);
    cache.plan_locked(static_cast<int>(f.size())).forward_locked(f, c);
}

inline void dft_inverse(std::span<const std::complex<double>> c, std::span<double> f) {
    auto& cache = FftCache::instance();
    std::scoped_lock lock(cache.mutex);
    cache.plan_locked(static_cast<int>(f.size())).inverse_locked(c, f);
}

}  // namespace spdelab::detail
