#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spdelab/coefficients.hpp"
#include "spdelab/errors.hpp"
#include "support.hpp"

using namespace spdelab;
using namespace testing_support;

TEST(Families, NamesRoundTrip) {
    for (auto f : {Family::constant, Family::drift_random, Family::space_smooth})
        EXPECT_EQ(parse_family(family_name(f)), f);
    EXPECT_THROW(parse_family("nope"), InvalidArgument);
}

TEST(Families, ParameterChecks) {
    auto p = constant_params({});
    EXPECT_THROW(CoefficientSet(Family::constant, p), InvalidArgument);
    p = constant_params({1.0});
    p.d = 2;
    EXPECT_THROW(CoefficientSet(Family::constant, p), InvalidArgument);
    p.d = 3;
    p.sigma = {1, 1, 1};
    EXPECT_THROW(CoefficientSet(Family::constant, p), InvalidArgument);
    // drift-random needs a free tail component.
    p = constant_params({1.0});
    EXPECT_THROW(CoefficientSet(Family::drift_random, p), InvalidArgument);
    p = constant_params({1.0}, std::nan(""));
    EXPECT_THROW(CoefficientSet(Family::constant, p), InvalidArgument);
    p = constant_params({1e6});
    EXPECT_THROW(CoefficientSet(Family::constant, p), InvalidArgument);
    EXPECT_THROW(make_family("unknown", constant_params()), InvalidArgument);
}

TEST(Families, Values) {
    CoefficientSet c(Family::constant, constant_params({0.3, 0.4}, 1.5));
    PathState s{0.2, {0.7, 0.0}};
    EXPECT_DOUBLE_EQ(c.drift(0.1, s), 1.5);
    EXPECT_DOUBLE_EQ(c.beta(1, 0.1, s), 0.4);
    EXPECT_TRUE(c.nonrandom());

    CoefficientSet r(Family::drift_random, drift_random_params(0.5));
    EXPECT_DOUBLE_EQ(r.drift(0.3, s), 0.5 * std::tanh(0.7));
    EXPECT_FALSE(r.nonrandom());
    EXPECT_TRUE(CoefficientSet(Family::drift_random, drift_random_params(0.0)).nonrandom());

    auto p = constant_params({1.0});
    p.amplitude = 2.0;
    p.epsilon = 0.5;
    CoefficientSet m(Family::space_smooth, p);
    EXPECT_NEAR(m.drift(0.25, s), 2.0 * std::sin(std::numbers::pi * 0.25) * (1 + 0.5 * std::tanh(0.7)), 1e-15);
}

TEST(Families, SampleMatchesPointwiseEvaluation) {
    Gen gen(31);
    auto p = constant_params({0.9, 0.2});
    p.amplitude = 1.1;
    p.epsilon = 0.3;
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), 25);
    for (auto fam : {Family::constant, Family::space_smooth, Family::drift_random}) {
        CoefficientSet c(fam, fam == Family::drift_random ? drift_random_params(0.8) : p);
        for (int trial = 0; trial < 5; ++trial) {
            PathState s{gen.uniform(0, 1), {gen.uniform(-2, 2), 0}};
            NodeCoefficients nc;
            c.sample(grid->nodes(), s, nc);
            for (std::size_t i = 0; i < grid->size(); ++i) {
                const double x = grid->x(i);
                EXPECT_NEAR(nc.f[i], c.drift(x, s), 1e-14);
                double b = 0.0;
                for (std::size_t j = 0; j < c.noise_dim(); ++j) {
                    EXPECT_DOUBLE_EQ(nc.beta_column(j)[i], c.beta(j, x, s));
                    b += c.beta(j, x, s) * c.beta(j, x, s);
                }
                EXPECT_NEAR(nc.b[i], b, 1e-14);
            }
        }
    }
}

TEST(Families, AdaptedToTheDrivingPath) {
    // Nodes sharing the path prefix up to level k see identical coefficients at level k.
    CoefficientSet c(Family::drift_random, drift_random_params(0.7));
    auto t = build_tree(1, 6, 1.0);
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), 9);
    for (std::size_t k = 0; k <= 6; ++k) {
        for (std::size_t leaf = 0; leaf + 1 < t->leaf_count(); ++leaf) {
            const std::size_t a = t->ancestor(leaf, k), b = t->ancestor(leaf + 1, k);
            if (a != b) continue;
            NodeCoefficients x, y;
            c.sample(grid->nodes(), t->state(k, a), x);
            c.sample(grid->nodes(), t->state(k, b), y);
            EXPECT_EQ(x.f, y.f);
        }
    }
}

TEST(Validation, MeasuresTheStandingBounds) {
    auto t = build_tree(1, 6, 1.0);
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), 21);
    CoefficientSet r(Family::drift_random, drift_random_params(0.25));
    const auto rep = validate(r, *grid, *t, true);
    EXPECT_TRUE(rep.passed());
    EXPECT_NEAR(rep.delta, 0.64, 1e-12);
    EXPECT_NEAR(rep.delta_b, 1.0, 1e-12);
    EXPECT_NEAR(rep.k2, 1.0, 1e-12);
    EXPECT_NEAR(rep.k3, 0.0, 1e-12);
    EXPECT_NEAR(rep.lipschitz_f, 0.0, 1e-12);
    // sup |f| is attained at the extreme leaf, omega = sqrt(T) * steps / sqrt(steps).
    EXPECT_NEAR(rep.k1, 0.25 * std::tanh(std::sqrt(t->dt()) * 6), 1e-12);

    auto p = constant_params({1.0});
    p.amplitude = 2.0;
    CoefficientSet m(Family::space_smooth, p);
    const auto rm = validate(m, *grid, *t, false);
    EXPECT_TRUE(rm.passed());
    EXPECT_NEAR(rm.lipschitz_f, 2.0 * std::numbers::pi, 0.05);
}

TEST(Validation, FlagsDegenerateNoise) {
    auto t = build_tree(1, 3, 1.0);
    auto grid = build_grid(DomainSpec::interval(0, 1, 1), 11);
    CoefficientSet c(Family::constant, constant_params({1e-5}));
    const auto rep = validate(c, *grid, *t, false);
    EXPECT_FALSE(rep.passed());
    // Superparabolic mode needs a non-degenerate tail block, which d = d0 lacks.
    CoefficientSet full(Family::constant, constant_params({1.0}));
    EXPECT_FALSE(validate(full, *grid, *t, true).passed());
    EXPECT_TRUE(validate(full, *grid, *t, false).passed());
}
