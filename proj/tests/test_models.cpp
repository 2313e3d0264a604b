#include "spdelab/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace spdelab;

namespace {

Field random_field(const PeriodicGrid& grid, unsigned seed, int components = 1) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    Field f(grid, components);
    for (double& v : f.values()) v = dist(rng);
    return f;
}

double field_max_abs(const Field& f) {
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    return peak;
}

}  // namespace

TEST(Drift, BurgersConstantStateGivesZero) {
    ModelSpec m = burgers_fd(1, 0);
    Field f(PeriodicGrid(32), 1, 2.0);
    EXPECT_NEAR(field_max_abs(eval_drift(m, f)), 0.0, 1e-12);
}

TEST(Drift, ConstantCorrectionQuarter) {
    ModelSpec m = burgers_fd(1, 0, 1.0, 1.0);
    m.correction.kind = Correction::Kind::constant;
    m.correction.gamma = 0.25;
    Field f(PeriodicGrid(16));
    Field drift = eval_drift(m, f);
    for (int j = 0; j < f.size(); ++j) EXPECT_NEAR(drift(0, j), 0.25, 1e-14);
}

TEST(Drift, StrangeSpdeVanishesAtOrigin) {
    ModelSpec m = strange_spde(std::sqrt(2.0));
    Field f(PeriodicGrid(16), 2);
    EXPECT_NEAR(field_max_abs(eval_drift(m, f)), 0.0, 1e-14);
}

TEST(Drift, MultiplicativeRuleHandValue) {
    // -(1/4) g'(0) f(0)^2 = -(1/4)(-1)(1.5^2) = 0.5625
    ModelSpec m = multiplicative_cos3(1.0);
    m.correction.kind = Correction::Kind::multiplicative_rule;
    m.correction.g_prime = [](double) { return -1.0; };
    m.correction.f_noise = cos3_noise_coefficient;
    Field f(PeriodicGrid(16));
    Field drift = eval_drift(m, f);
    for (int j = 0; j < f.size(); ++j) EXPECT_NEAR(drift(0, j), 0.5625, 1e-14);
}

TEST(Drift, RejectsComponentMismatch) {
    ModelSpec m = strange_spde();
    Field f(PeriodicGrid(16), 1);
    EXPECT_THROW(eval_drift(m, f), std::invalid_argument);
}

TEST(NoiseCoeff, AdditiveConstant) {
    ModelSpec m = burgers_fd(1, 0, 1.0, 0.5);
    Field f = random_field(PeriodicGrid(16), 3);
    Field sigma = eval_noise_coefficient(m, f);
    for (int j = 0; j < f.size(); ++j) EXPECT_DOUBLE_EQ(sigma(0, j), 0.5);
}

TEST(NoiseCoeff, StateDependentPointwise) {
    ModelSpec m = multiplicative_cos3(1.0);
    Field zero(PeriodicGrid(8));
    Field sigma0 = eval_noise_coefficient(m, zero);
    for (int j = 0; j < zero.size(); ++j) EXPECT_NEAR(sigma0(0, j), 1.5, 1e-14);

    Field third(PeriodicGrid(8), 1, std::numbers::pi / 3.0);
    Field sigma1 = eval_noise_coefficient(m, third);
    for (int j = 0; j < third.size(); ++j) EXPECT_NEAR(sigma1(0, j), 0.5, 1e-14);
}

TEST(Builtins, CatalogContainsNamedModels) {
    auto models = builtin_models();
    auto find = [&](const std::string& name) {
        for (const ModelSpec& m : models) {
            if (m.name == name) return true;
        }
        return false;
    };
    for (const char* name : {"linear", "burgers_fd", "burgers_conservative", "gradient_sin2",
                             "strange_spde", "multiplicative_cos3", "inviscid_regime"}) {
        EXPECT_TRUE(find(name)) << name;
    }
}

TEST(Builtins, StrangeSpdeCoefficients) {
    const double s = 1.7;
    ModelSpec m = strange_spde(s);
    EXPECT_DOUBLE_EQ(m.viscosity, 1.0 / (s * s));
    EXPECT_EQ(m.components, 2);
    EXPECT_EQ(m.noise.kind, NoiseCoefficient::Kind::additive);
    EXPECT_DOUBLE_EQ(m.noise.sigma, std::sqrt(2.0));

    const double u[2] = {0.3, -1.2};
    double mat[4];
    m.nonlinearity.G_matrix(u, mat);
    const double amp = 2.0 / (s * s);
    EXPECT_NEAR(mat[0], 0.0, 1e-15);
    EXPECT_NEAR(mat[1], amp * (std::cos(u[1]) - std::sin(u[0])), 1e-15);
    EXPECT_NEAR(mat[2], amp * (std::sin(u[0]) - std::cos(u[1])), 1e-15);
    EXPECT_NEAR(mat[3], 0.0, 1e-15);
}

TEST(Builtins, StrangeSpdeDriftMatchesHandCodedOracle) {
    // oracle written directly from the displayed matrix and reaction term
    const double s = 1.3;
    ModelSpec m = strange_spde(s);  // right-sided stencil
    PeriodicGrid grid(32);
    Field f = random_field(grid, 7, 2);
    Field drift = eval_drift(m, f);

    const double a = 2.0 / (s * s);
    const double r = 4.0 / (s * s);
    for (int j = 0; j < grid.n; ++j) {
        const double u1 = f(0, j), u2 = f(1, j);
        const double du1 = (f.cyclic(0, j + 1) - u1) / grid.delta;
        const double du2 = (f.cyclic(1, j + 1) - u2) / grid.delta;
        const double g12 = a * (std::cos(u2) - std::sin(u1));
        const double g21 = a * (std::sin(u1) - std::cos(u2));
        const double expect1 = g12 * du2 + r * std::sin(u1) * std::cos(u1);
        const double expect2 = g21 * du1 - r * std::cos(u2) * std::sin(u2);
        EXPECT_NEAR(drift(0, j), expect1, 1e-12 * std::max(1.0, std::abs(expect1)));
        EXPECT_NEAR(drift(1, j), expect2, 1e-12 * std::max(1.0, std::abs(expect2)));
    }
}

TEST(Builtins, StrangeSpdeDivergenceByFiniteDifferences) {
    const double s = 1.0;
    VectorFn div = strange_spde_div_G(s);
    ModelSpec m = strange_spde(s);
    const double h = 1e-6;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        double u[2] = {dist(rng), dist(rng)};
        double out[2];
        div(u, out);
        // row i: d/du_1 G_i1 + d/du_2 G_i2
        double gp[4], gm[4];
        double up[2] = {u[0] + h, u[1]}, um[2] = {u[0] - h, u[1]};
        m.nonlinearity.G_matrix(up, gp);
        m.nonlinearity.G_matrix(um, gm);
        double d1_g11 = (gp[0] - gm[0]) / (2 * h);
        double d1_g21 = (gp[2] - gm[2]) / (2 * h);
        up[0] = u[0], up[1] = u[1] + h;
        um[0] = u[0], um[1] = u[1] - h;
        m.nonlinearity.G_matrix(up, gp);
        m.nonlinearity.G_matrix(um, gm);
        double d2_g12 = (gp[1] - gm[1]) / (2 * h);
        double d2_g22 = (gp[3] - gm[3]) / (2 * h);
        EXPECT_NEAR(out[0], d1_g11 + d2_g12, 1e-8);
        EXPECT_NEAR(out[1], d1_g21 + d2_g22, 1e-8);
    }
}

TEST(Builtins, GradientSin2Pieces) {
    ModelSpec m = gradient_sin2();
    const double u = 0.7;
    const double s = std::sin(u);
    EXPECT_NEAR(m.nonlinearity.h_prime(u), s * s, 1e-15);

    // antiderivative and conjectured correction consistent with h' = sin^2
    const double h = 1e-6;
    EXPECT_NEAR((sin2_antiderivative(u + h) - sin2_antiderivative(u - h)) / (2 * h), s * s, 1e-8);
    EXPECT_NEAR(sin2_correction(u), std::sin(2.0 * u), 1e-15);
    EXPECT_NEAR((m.nonlinearity.h_prime(u + h) - m.nonlinearity.h_prime(u - h)) / (2 * h),
                sin2_correction(u), 1e-8);
}

TEST(Builtins, InviscidRegimeScaling) {
    const double eps = 0.05;
    ModelSpec m = inviscid_regime(eps);
    EXPECT_DOUBLE_EQ(m.viscosity, eps);
    EXPECT_DOUBLE_EQ(m.noise.sigma, std::sqrt(eps));
    EXPECT_EQ(m.nonlinearity.kind, Nonlinearity::Kind::burgers);
}

TEST(Drift, GradientAndConservativeRoutesAgree) {
    // two discretisations of -u u_x: gradient h'(u) = -u and the conservative
    // form of G(u) = u^2/2; the centred difference is second order, so the
    // gap shrinks 16-fold when N quadruples
    auto gap = [](int n) {
        PeriodicGrid grid(n);
        Field f = Field::from_function(grid, [](double x) { return std::sin(x); });

        ModelSpec grad;
        grad.nonlinearity.kind = Nonlinearity::Kind::gradient;
        grad.nonlinearity.stencil = StencilSpec::centred();
        grad.nonlinearity.h_prime = [](double u) { return -u; };

        ModelSpec cons;
        cons.nonlinearity.kind = Nonlinearity::Kind::conservative;
        cons.nonlinearity.stencil = StencilSpec::centred();
        cons.nonlinearity.G = [](double u) { return 0.5 * u * u; };

        Field a = eval_drift(grad, f);
        Field b = eval_drift(cons, f);
        double peak = 0.0;
        for (int j = 0; j < n; ++j) peak = std::max(peak, std::abs(a(0, j) - b(0, j)));
        return peak;
    };
    const double e64 = gap(64), e256 = gap(256);
    EXPECT_GT(e64, 0.0);
    const double ratio = e64 / e256;
    EXPECT_GE(ratio, 4.0);  // at least first order
    EXPECT_NEAR(ratio, 16.0, 0.2 * 16.0);
}

TEST(Drift, CorrectionIsPointwiseLocal) {
    // rotating the state rotates the correction term identically
    ModelSpec m;
    m.nonlinearity.kind = Nonlinearity::Kind::none;
    m.correction.kind = Correction::Kind::polynomial;
    m.correction.poly = {0.3, -1.0, 0.0, 2.0};
    m.noise = NoiseCoefficient::additive(1.4);
    m.viscosity = 0.7;

    PeriodicGrid grid(32);
    Field f = random_field(grid, 19);
    Field rotated(grid);
    const int shift = 5;
    for (int j = 0; j < grid.n; ++j) rotated(0, j) = f.cyclic(0, j + shift);

    Field base = eval_drift(m, f);
    Field rot = eval_drift(m, rotated);
    for (int j = 0; j < grid.n; ++j) {
        EXPECT_DOUBLE_EQ(rot(0, j), base.cyclic(0, j + shift));
    }
}

TEST(Drift, RejectsOversizedPolynomialCorrection) {
    ModelSpec m;
    m.nonlinearity.kind = Nonlinearity::Kind::none;
    m.correction.kind = Correction::Kind::polynomial;
    m.correction.poly = std::vector<double>(10, 1.0);  // degree 9
    EXPECT_THROW(eval_drift(m, Field(PeriodicGrid(8))), std::invalid_argument);
}

TEST(Polynomial, HornerEvaluation) {
    std::vector<double> p = {1.0, -2.0, 3.0};  // 1 - 2u + 3u^2
    EXPECT_DOUBLE_EQ(eval_polynomial(p, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(eval_polynomial(p, 2.0), 1.0 - 4.0 + 12.0);
    EXPECT_DOUBLE_EQ(eval_polynomial({}, 5.0), 0.0);
}
