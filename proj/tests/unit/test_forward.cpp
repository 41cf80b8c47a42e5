#include <gtest/gtest.h>

#include <cmath>

#include "spdelab/errors.hpp"
#include "spdelab/forward.hpp"
#include "spdelab/random_fields.hpp"
#include "support.hpp"

using namespace spdelab;
using namespace testing_support;

namespace {

double rel_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    auto d = a - b;
    return d.max_abs() / std::max(a.max_abs(), 1e-300);
}

GridFunction gaussian(std::shared_ptr<const Grid> g, double c, double w) {
    auto p = GridFunction::sample(g, [&](double x) { return std::exp(-0.5 * std::pow((x - c) / w, 2)); });
    double mass = 0.0;
    for (double v : p.values()) mass += v * g->dx();
    for (double& v : p.values()) v /= mass;
    return p;
}

}  // namespace

TEST(StepForward, RejectsIncrementsOffTheTree) {
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), 11);
    CoefficientSet c(Family::constant, constant_params({1.0}));
    GridFunction p(grid);
    std::vector<GridFunction> noise{GridFunction(grid)};
    std::vector<double> dw{0.3};
    EXPECT_THROW(step_forward(c, PathState{}, p, nullptr, noise, dw, 0.04), InvalidArgument);
    dw[0] = -0.2;
    EXPECT_NO_THROW(step_forward(c, PathState{}, p, nullptr, noise, dw, 0.04));
}

TEST(StepForward, SolvesTheImplicitStep) {
    Gen gen(61);
    const std::size_t nx = 15;
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), nx);
    CoefficientSet c(Family::constant, constant_params({0.7}, -0.3));
    GridFunction p(grid, gen.interior_vec(nx)), h(grid, gen.interior_vec(nx)), n(grid, gen.interior_vec(nx));
    const double dt = 0.01;
    std::vector<GridFunction> noise{n};
    std::vector<double> dw{0.1};
    const auto out = step_forward(c, PathState{}, p, &h, noise, dw, dt);
    const Matrix A = generator_matrix(std::vector<double>(nx, -0.3), std::vector<double>(nx, 0.49), grid->dx());
    std::vector<double> rhs(nx);
    for (std::size_t i = 0; i < nx; ++i) rhs[i] = p[i] + dt * h[i] + 0.1 * n[i];
    rhs.front() = rhs.back() = 0.0;
    const auto ref = dense_solve(shifted(transpose(A), dt), rhs);
    for (std::size_t i = 1; i + 1 < nx; ++i) EXPECT_NEAR(out[i], ref[i], 1e-12);
}

TEST(Dual, TStarMatchesDenseMarchForNonrandomData) {
    const std::size_t nx = 13, N = 4;
    Model m = model(Family::constant, constant_params({0.9}, 0.5), nx, N);
    auto h = random_smooth_field(m.grid, m.tree, 4, 3, false);
    const auto pi = solve_T_star(h, m);
    const Matrix At = transpose(generator_matrix(std::vector<double>(nx, 0.5), std::vector<double>(nx, 0.81), m.grid->dx()));
    std::vector<double> cur(nx, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t x = 0; x < nx; ++x) cur[x] += m.tree->dt() * h.slice(k, 0)[x];
        cur.front() = cur.back() = 0.0;
        cur = dense_solve(shifted(At, m.tree->dt()), cur);
        for (std::size_t i = 0; i < m.tree->level_size(k + 1); ++i)
            for (std::size_t x = 1; x + 1 < nx; ++x) EXPECT_NEAR(pi.slice(k + 1, i)[x], cur[x], 1e-12);
    }
    for (double v : pi.slice(0, 0)) EXPECT_EQ(v, 0.0);
}

TEST(Dual, PureNoiseSolutionsHaveZeroMean) {
    Model m = model(Family::constant, constant_params({0.6, 0.8}), 31, 8);
    auto h = random_smooth_field(m.grid, m.tree, 5, 3);
    const double scale = solve_G_star(0, h, m).max_abs();
    for (const auto& f : {solve_G_star(0, h, m), solve_B_star(h, m)})
        for (std::size_t k = 0; k <= 8; ++k)
            for (double v : level_mean(f, k)) EXPECT_NEAR(v, 0.0, 1e-10 * (1.0 + scale));
}

TEST(Dual, SolversAreLinear) {
    Model m = model(Family::drift_random, drift_random_params(0.3), 31, 6);
    auto a = random_smooth_field(m.grid, m.tree, 1, 3);
    auto b = random_smooth_field(m.grid, m.tree, 2, 3);
    const auto c = 1.5 * a + (-0.7) * b;
    EXPECT_LE(rel_diff(solve_T_star(c, m), 1.5 * solve_T_star(a, m) + (-0.7) * solve_T_star(b, m)), 1e-10);
    EXPECT_LE(rel_diff(solve_G_star(0, c, m), 1.5 * solve_G_star(0, a, m) + (-0.7) * solve_G_star(0, b, m)), 1e-10);
    EXPECT_LE(rel_diff(solve_B_star(c, m), 1.5 * solve_B_star(a, m) + (-0.7) * solve_B_star(b, m)), 1e-10);
    EXPECT_LE(rel_diff(solve_R_star(c, m), 1.5 * solve_R_star(a, m) + (-0.7) * solve_R_star(b, m)), 1e-10);
    EXPECT_LE(rel_diff(solve_L_star(c, m), 1.5 * solve_L_star(a, m) + (-0.7) * solve_L_star(b, m)), 1e-10);
}

TEST(Dual, RStarInvertsOnePlusBStar) {
    Model m = model(Family::drift_random, drift_random_params(0.3), 41, 7);
    auto pi = random_smooth_field(m.grid, m.tree, 8, 3);
    const auto h = solve_R_star(pi, m);
    EXPECT_LE(rel_diff(h + solve_B_star(h, m), pi), 1e-12);
}

TEST(Dual, LStarComposesRStarAndTStar) {
    Model m = model(Family::drift_random, drift_random_params(0.3), 41, 7);
    auto xi = random_smooth_field(m.grid, m.tree, 9, 3);
    EXPECT_LE(rel_diff(solve_L_star(xi, m), solve_R_star(solve_T_star(xi, m), m)), 1e-12);
}

TEST(Dual, SuperparabolicSolversNeedATailComponent) {
    Model m = model(Family::constant, constant_params({1.0}), 21, 4);
    auto h = random_smooth_field(m.grid, m.tree, 1, 2);
    EXPECT_THROW(solve_R_star(h, m), InvalidArgument);
    EXPECT_THROW(solve_L_star(h, m), InvalidArgument);
    EXPECT_THROW(solve_G_star(1, h, m), InvalidArgument);
}

TEST(Density, MeanFollowsTheDeterministicForwardEquation) {
    const std::size_t nx = 21, N = 6;
    Model m = model(Family::constant, constant_params({0.5, 0.6}, 0.2), nx, N);
    const auto p0 = gaussian(m.grid, 0.5, 0.12);
    const auto d = solve_density(p0, m);
    const Matrix At = transpose(generator_matrix(std::vector<double>(nx, 0.2), std::vector<double>(nx, 0.61), m.grid->dx()));
    std::vector<double> cur(p0.values().begin(), p0.values().end());
    cur.front() = cur.back() = 0.0;
    for (std::size_t k = 1; k <= N; ++k) {
        cur = dense_solve(shifted(At, m.tree->dt()), cur);
        const auto mean = level_mean(d.p, k);
        for (std::size_t x = 1; x + 1 < nx; ++x) EXPECT_NEAR(mean[x], cur[x], 1e-12);
    }
}

TEST(Density, MassDecaysOnAnAbsorbingInterval) {
    Model m = model(Family::drift_random, drift_random_params(0.25), 101, 8);
    const auto d = solve_density(gaussian(m.grid, 0.5, 0.15), m);
    double prev = 1.0 + 1e-9;
    for (std::size_t k = 0; k <= 8; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m.tree->level_size(k); ++i)
            mean += m.tree->probability(k) * d.mass[m.tree->global_index(k, i)];
        EXPECT_LE(mean, prev);
        prev = mean;
    }
    EXPECT_FALSE(d.negativity_flagged);
    EXPECT_GT(d.min_value[0], -1e-12);
}

TEST(Density, NegativityIsReportedNotHidden) {
    Model m = model(Family::constant, constant_params({3.0, 0.5}), 41, 2, 1.0);
    const auto d = solve_density(gaussian(m.grid, 0.5, 0.05), m);
    EXPECT_TRUE(d.negativity_flagged);
    EXPECT_LT(d.min_value[1], 0.0);
}

TEST(Density, InitialDensityIsChecked) {
    Model m = model(Family::constant, constant_params({1.0}), 21, 2);
    auto p0 = gaussian(m.grid, 0.5, 0.1);
    auto neg = p0;
    neg[5] = -1.0;
    EXPECT_THROW(solve_density(neg, m), InvalidArgument);
    auto heavy = p0;
    for (double& v : heavy.values()) v *= 2.0;
    EXPECT_THROW(solve_density(heavy, m), InvalidArgument);
    DensityOptions loose;
    loose.validate = false;
    EXPECT_NO_THROW(solve_density(heavy, m, loose));
}
