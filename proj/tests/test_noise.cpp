#include "spdelab/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace spdelab;

TEST(Noise, ColouredWithZeroExponentMatchesWhiteBitwise) {
    PeriodicGrid grid(32);
    NoiseStream a{42, 7, 0, grid};
    NoiseStream b{42, 7, 0, grid};
    NoiseIncrement white = next_increment(a, NoiseSpec::white(), 0.01);
    NoiseIncrement coloured = next_increment(b, NoiseSpec::coloured(0.0), 0.01);
    ASSERT_EQ(white.values.size(), coloured.values.size());
    for (size_t i = 0; i < white.values.size(); ++i) {
        EXPECT_EQ(white.values[i], coloured.values[i]);
    }
}

TEST(Noise, WhiteVarianceMonteCarlo) {
    // entries ~ N(0, dt/delta); dt = 0.01, N = 64 => variance 0.01 * 64/(2 pi)
    PeriodicGrid grid(64);
    const double dt = 0.01;
    const double expected = dt / grid.delta;
    NoiseStream stream{1, 0, 0, grid};
    const int samples = 100000 / grid.n + 1;
    double acc = 0.0;
    long count = 0;
    for (int s = 0; s < samples; ++s) {
        NoiseIncrement xi = next_increment(stream, NoiseSpec::white(), dt);
        for (double v : xi.values) {
            acc += v * v;
            ++count;
        }
    }
    const double variance = acc / static_cast<double>(count);
    EXPECT_NEAR(variance, expected, 0.03 * expected);
}

TEST(Noise, ColouredModeVarianceMonteCarlo) {
    // exponent -0.2 scales the mode-n variance by (1+n^2)^{0.4}
    PeriodicGrid grid(32);
    const double dt = 0.01;
    const int mode = 8;
    const double expected_ratio = std::pow(1.0 + mode * mode, 0.4);

    NoiseStream sw{9, 0, 0, grid};
    NoiseStream sc{9, 0, 0, grid};
    const int samples = 4000;
    double acc_white = 0.0, acc_col = 0.0;
    std::vector<std::complex<double>> coeffs(static_cast<size_t>(grid.n / 2 + 1));
    for (int s = 0; s < samples; ++s) {
        NoiseIncrement w = next_increment(sw, NoiseSpec::white(), dt);
        NoiseIncrement c = next_increment(sc, NoiseSpec::coloured(-0.2), dt);
        detail::dft_forward(std::span<const double>(w.values), coeffs);
        acc_white += std::norm(coeffs[mode]);
        detail::dft_forward(std::span<const double>(c.values), coeffs);
        acc_col += std::norm(coeffs[mode]);
    }
    EXPECT_NEAR(acc_col / acc_white, expected_ratio, 0.05 * expected_ratio);
}

TEST(Noise, ColouringIsLinear) {
    PeriodicGrid grid(64);
    NoiseStream s{3, 1, 0, grid};
    NoiseIncrement xi1 = next_increment(s, NoiseSpec::white(), 0.5);
    NoiseIncrement xi2 = next_increment(s, NoiseSpec::white(), 0.5);

    const double a = 1.7, b = -0.4;
    NoiseIncrement combo = xi1;
    for (size_t i = 0; i < combo.values.size(); ++i) {
        combo.values[i] = a * xi1.values[i] + b * xi2.values[i];
    }
    apply_colour(combo, -0.3);
    apply_colour(xi1, -0.3);
    apply_colour(xi2, -0.3);
    for (size_t i = 0; i < combo.values.size(); ++i) {
        EXPECT_NEAR(combo.values[i], a * xi1.values[i] + b * xi2.values[i], 1e-12);
    }
}

TEST(BlockMean, IdentityAndConstants) {
    PeriodicGrid grid(16);
    NoiseStream s{5, 0, 0, grid};
    NoiseIncrement xi = next_increment(s, NoiseSpec::white(), 0.1);
    NoiseIncrement same = block_mean(xi, 1);
    for (size_t i = 0; i < xi.values.size(); ++i) EXPECT_EQ(same.values[i], xi.values[i]);

    NoiseIncrement constant{grid, 1, std::vector<double>(16, 2.5)};
    NoiseIncrement coarse = block_mean(constant, 4);
    EXPECT_EQ(coarse.grid.n, 4);
    for (double v : coarse.values) EXPECT_DOUBLE_EQ(v, 2.5);
}

TEST(BlockMean, VarianceMatchesCoarseLaw) {
    // mean of m i.i.d. N(0, dt/delta_fine) entries has variance dt/delta_coarse
    PeriodicGrid fine(64);
    const double dt = 0.01;
    const int m = 4;
    PeriodicGrid coarse(fine.n / m);
    NoiseStream stream{21, 0, 0, fine};
    double acc = 0.0;
    long count = 0;
    const int samples = 8000;
    for (int s = 0; s < samples; ++s) {
        NoiseIncrement xi = block_mean(next_increment(stream, NoiseSpec::white(), dt), m);
        for (double v : xi.values) {
            acc += v * v;
            ++count;
        }
    }
    const double expected = dt / coarse.delta;
    EXPECT_NEAR(acc / static_cast<double>(count), expected, 0.03 * expected);
}

TEST(BlockMean, RejectsNonDivisor) {
    PeriodicGrid grid(16);
    NoiseIncrement xi{grid, 1, std::vector<double>(16, 0.0)};
    EXPECT_THROW(block_mean(xi, 3), std::invalid_argument);
}

TEST(PairedStreams, DeterministicPerLabel) {
    PeriodicGrid grid(32);
    auto streams1 = make_paired_streams(grid, 99, {0, 1});
    auto streams2 = make_paired_streams(grid, 99, {0, 1});
    NoiseIncrement a = next_increment(streams1[0], NoiseSpec::white(), 0.1);
    NoiseIncrement b = next_increment(streams2[0], NoiseSpec::white(), 0.1);
    for (size_t i = 0; i < a.values.size(); ++i) EXPECT_EQ(a.values[i], b.values[i]);
}

TEST(PairedStreams, DistinctRunsDecorrelated) {
    PeriodicGrid grid(64);
    auto streams = make_paired_streams(grid, 7, {0, 1});
    std::vector<double> xs, ys;
    for (int s = 0; s < 160; ++s) {
        NoiseIncrement a = next_increment(streams[0], NoiseSpec::white(), 0.1);
        NoiseIncrement b = next_increment(streams[1], NoiseSpec::white(), 0.1);
        xs.insert(xs.end(), a.values.begin(), a.values.end());
        ys.insert(ys.end(), b.values.begin(), b.values.end());
    }
    ASSERT_GE(xs.size(), 10000u);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxy += xs[i] * ys[i];
        sxx += xs[i] * xs[i];
        syy += ys[i] * ys[i];
    }
    EXPECT_LT(std::abs(sxy / std::sqrt(sxx * syy)), 0.05);
    EXPECT_NE(xs[0], ys[0]);
}

TEST(PairedStreams, SeedSeparation) {
    PeriodicGrid grid(16);
    NoiseStream a{1000, 0, 0, grid};
    NoiseStream b{1001, 0, 0, grid};
    NoiseIncrement xa = next_increment(a, NoiseSpec::white(), 0.1);
    NoiseIncrement xb = next_increment(b, NoiseSpec::white(), 0.1);
    bool any_diff = false;
    for (size_t i = 0; i < xa.values.size(); ++i) any_diff |= xa.values[i] != xb.values[i];
    EXPECT_TRUE(any_diff);
}

TEST(PairedStreams, RejectsDuplicateIds) {
    EXPECT_THROW(make_paired_streams(PeriodicGrid(8), 1, {3, 3}), std::invalid_argument);
}

TEST(Noise, SchedulingIndependence) {
    // increments for different (run, step) labels do not depend on the order
    // in which they are generated
    PeriodicGrid grid(16);
    const double dt = 0.05;

    NoiseStream r0{11, 0, 0, grid};
    NoiseStream r1{11, 1, 0, grid};
    NoiseIncrement seq00 = next_increment(r0, NoiseSpec::white(), dt);
    NoiseIncrement seq01 = next_increment(r0, NoiseSpec::white(), dt);
    NoiseIncrement seq10 = next_increment(r1, NoiseSpec::white(), dt);

    NoiseStream r1b{11, 1, 0, grid};
    NoiseStream r0b{11, 0, 0, grid};
    NoiseIncrement other10 = next_increment(r1b, NoiseSpec::white(), dt);
    NoiseIncrement other00 = next_increment(r0b, NoiseSpec::white(), dt);
    NoiseIncrement other01 = next_increment(r0b, NoiseSpec::white(), dt);

    for (size_t i = 0; i < seq00.values.size(); ++i) {
        EXPECT_EQ(seq00.values[i], other00.values[i]);
        EXPECT_EQ(seq01.values[i], other01.values[i]);
        EXPECT_EQ(seq10.values[i], other10.values[i]);
    }
}

TEST(Noise, CouplingIsDeterministicFunctionOfFineIncrements) {
    PeriodicGrid fine(32);
    NoiseStream s1{77, 2, 0, fine};
    NoiseStream s2{77, 2, 0, fine};
    for (int step = 0; step < 5; ++step) {
        NoiseIncrement direct = block_mean(next_increment(s1, NoiseSpec::white(), 0.1), 4);
        NoiseIncrement fine_xi = next_increment(s2, NoiseSpec::white(), 0.1);
        NoiseIncrement replay = block_mean(fine_xi, 4);
        for (size_t i = 0; i < direct.values.size(); ++i) {
            EXPECT_EQ(direct.values[i], replay.values[i]);
        }
    }
}

TEST(Noise, RejectsNonPositiveDt) {
    PeriodicGrid grid(8);
    NoiseStream s{1, 0, 0, grid};
    EXPECT_THROW(next_increment(s, NoiseSpec::white(), 0.0), std::invalid_argument);
}

TEST(Noise, ThreadedGenerationMatchesSequential) {
    PeriodicGrid grid(64);
    const double dt = 0.01;
    const int runs = 4, steps = 25;

    std::vector<std::vector<NoiseIncrement>> sequential(runs);
    for (int r = 0; r < runs; ++r) {
        NoiseStream s{55, static_cast<std::uint64_t>(r), 0, grid};
        for (int k = 0; k < steps; ++k) {
            sequential[r].push_back(next_increment(s, NoiseSpec::coloured(-0.1), dt));
        }
    }

    std::vector<std::vector<NoiseIncrement>> threaded(runs);
    std::vector<std::thread> workers;
    for (int r = 0; r < runs; ++r) {
        workers.emplace_back([&, r] {
            NoiseStream s{55, static_cast<std::uint64_t>(r), 0, grid};
            for (int k = 0; k < steps; ++k) {
                threaded[r].push_back(next_increment(s, NoiseSpec::coloured(-0.1), dt));
            }
        });
    }
    for (auto& w : workers) w.join();

    for (int r = 0; r < runs; ++r) {
        for (int k = 0; k < steps; ++k) {
            for (size_t i = 0; i < sequential[r][k].values.size(); ++i) {
                ASSERT_EQ(sequential[r][k].values[i], threaded[r][k].values[i]);
            }
        }
    }
}
