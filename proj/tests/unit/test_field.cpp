#include <gtest/gtest.h>

#include <cmath>

#include "spdelab/errors.hpp"
#include "spdelab/field.hpp"
#include "support.hpp"

using namespace spdelab;
using namespace testing_support;

namespace {

SpaceTimeField random_field(std::shared_ptr<const Grid> g, std::shared_ptr<const ScenarioTree> t, Gen& gen) {
    SpaceTimeField f(g, t);
    for (double& v : f.data()) v = gen.uniform(-1, 1);
    return f;
}

}  // namespace

TEST(SpaceTimeField, SliceLayout) {
    auto g = build_grid(DomainSpec::interval(0, 1, 1), 9);
    auto t = build_tree(1, 3, 1.0);
    SpaceTimeField f(g, t);
    EXPECT_EQ(f.data().size(), 9u * 15u);
    f.slice(2, 3)[4] = 7.0;
    EXPECT_EQ(f.data()[t->global_index(2, 3) * 9 + 4], 7.0);
    auto s = SpaceTimeField::sample(g, t, [](double x, const PathState& st) { return x + st.t + st.omega[0]; });
    EXPECT_NEAR(s.slice(3, 5)[2], g->x(2) + 1.0 + t->omega(3, 5)[0], 1e-15);
}

TEST(SpaceTimeField, ArithmeticAndCompatibility) {
    Gen gen(41);
    auto g = build_grid(DomainSpec::interval(0, 1, 1), 9);
    auto t = build_tree(1, 3, 1.0);
    auto a = random_field(g, t, gen), b = random_field(g, t, gen);
    auto c = a + 2.0 * b;
    c -= a;
    c.axpy(-2.0, b);
    EXPECT_LE(c.max_abs(), 1e-15);
    SpaceTimeField other(build_grid(DomainSpec::interval(0, 1, 1), 10), t);
    EXPECT_FALSE(a.compatible(other));
    EXPECT_THROW(a += other, InvalidArgument);
}

TEST(Norms, X0ProductIsTheLeftRuleExpectation) {
    Gen gen(42);
    auto g = build_grid(DomainSpec::interval(0, 2, 1), 11);
    for (std::size_t d : {1u, 2u}) {
        auto t = build_tree(d, 4, 0.8);
        auto a = random_field(g, t, gen), b = random_field(g, t, gen);
        double ref = 0.0;
        for (std::size_t k = 0; k < t->steps(); ++k)
            for (std::size_t i = 0; i < t->level_size(k); ++i)
                ref += t->dt() * t->probability(k) * inner_H0(*g, a.slice(k, i), b.slice(k, i));
        EXPECT_LE(rel(inner_X0(a, b), ref), 1e-13);
        EXPECT_NEAR(norm_X0(a), std::sqrt(inner_X0(a, a)), 1e-14);
    }
}

TEST(Norms, C0IsTheWorstLevel) {
    Gen gen(43);
    auto g = build_grid(DomainSpec::interval(0, 1, 1), 11);
    auto t = build_tree(1, 3, 1.0);
    auto a = random_field(g, t, gen);
    double worst = 0.0;
    for (std::size_t k = 0; k <= 3; ++k) {
        double e = 0.0;
        for (std::size_t i = 0; i < t->level_size(k); ++i) e += t->probability(k) * inner_H0(*g, a.slice(k, i), a.slice(k, i));
        worst = std::max(worst, std::sqrt(e));
    }
    EXPECT_NEAR(norm_C0(a), worst, 1e-14);
}

TEST(Norms, LevelMeanAveragesNodes) {
    Gen gen(44);
    auto g = build_grid(DomainSpec::interval(0, 1, 1), 9);
    auto t = build_tree(2, 2, 1.0);
    auto a = random_field(g, t, gen);
    const auto m = level_mean(a, 2);
    for (std::size_t x = 0; x < 9; ++x) {
        double s = 0.0;
        for (std::size_t i = 0; i < 16; ++i) s += a.slice(2, i)[x];
        EXPECT_NEAR(m[x], s / 16.0, 1e-15);
    }
}
