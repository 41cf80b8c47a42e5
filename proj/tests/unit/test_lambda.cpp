#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spdelab/lambda_transform.hpp"
#include "support.hpp"

using namespace spdelab;
using namespace testing_support;

namespace {

/// (I - Delta_h) on interior nodes as a dense matrix.
Matrix one_minus_laplacian(std::size_t n, double dx) {
    Matrix m = zeros(n);
    m[0][0] = 1.0;
    m[n - 1][n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m[i][i] = 1.0 + 2.0 / (dx * dx);
        if (i > 1) m[i][i - 1] = -1.0 / (dx * dx);
        if (i + 2 < n) m[i][i + 1] = -1.0 / (dx * dx);
    }
    return m;
}

}  // namespace

TEST(Lambda, EigenvaluesOfTheDirichletLaplacian) {
    auto grid = build_grid(DomainSpec::interval(0, 2, 1), 17);
    LambdaTransform lam(grid);
    const std::size_t m = 15;
    ASSERT_EQ(lam.eigenvalues().size(), m);
    for (std::size_t k = 1; k <= m; ++k) {
        const double s = std::sin(k * std::numbers::pi / (2.0 * (m + 1)));
        EXPECT_NEAR(lam.eigenvalues()[k - 1], 4.0 / (grid->dx() * grid->dx()) * s * s, 1e-9);
    }
}

TEST(Lambda, SquareIsOneMinusLaplacian) {
    Gen gen(8);
    for (std::size_t n : {9u, 20u, 65u}) {
        auto grid = build_grid(DomainSpec::interval(0, 1, 1), n);
        LambdaTransform lam(grid);
        const auto u = gen.interior_vec(n);
        std::vector<double> once(n), twice(n);
        lam.apply(u, 1, once);
        lam.apply(once, 1, twice);
        const auto ref = matvec(one_minus_laplacian(n, grid->dx()), u);
        for (std::size_t i = 1; i + 1 < n; ++i) EXPECT_NEAR(twice[i], ref[i], 1e-9 * (1 + std::abs(ref[i])));
    }
}

TEST(Lambda, NegativeNormMatchesDenseSolve) {
    Gen gen(9);
    const std::size_t n = 30;
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), n);
    LambdaTransform lam(grid);
    const auto u = gen.interior_vec(n);
    const auto y = dense_solve(one_minus_laplacian(n, grid->dx()), u);
    EXPECT_NEAR(lam.norm(u, -1), std::sqrt(inner_H0(*grid, u, y)), 1e-12);
    EXPECT_NEAR(lam.norm(u, 0), norm_H0(*grid, u), 1e-12);
}

TEST(Lambda, DualityOfPositiveAndNegativePowers) {
    Gen gen(10);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = gen.index(8, 100);
        auto grid = build_grid(DomainSpec::interval(0, gen.uniform(0.5, 5), 1), n);
        LambdaTransform lam(grid);
        const auto u = gen.interior_vec(n), v = gen.interior_vec(n);
        std::vector<double> lu(n), liv(n), back(n);
        lam.apply(u, 1, lu);
        lam.apply(v, -1, liv);
        EXPECT_LE(rel(inner_H0(*grid, u, v), inner_H0(*grid, lu, liv)), 1e-12);
        lam.apply(lu, -1, back);
        for (std::size_t i = 1; i + 1 < n; ++i) EXPECT_NEAR(back[i], u[i], 1e-12);
    }
}

TEST(Lambda, NormsAreOrdered) {
    Gen gen(11);
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), 50);
    LambdaTransform lam(grid);
    for (int trial = 0; trial < 10; ++trial) {
        const auto u = gen.interior_vec(50);
        EXPECT_LE(lam.norm(u, -1), lam.norm(u, 0));
        EXPECT_LE(lam.norm(u, 0), lam.norm(u, 1));
    }
}
