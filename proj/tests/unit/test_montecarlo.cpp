#include <gtest/gtest.h>

#include <cmath>

#include "spdelab/errors.hpp"
#include "spdelab/montecarlo.hpp"
#include "support.hpp"

using namespace spdelab;
using namespace testing_support;

namespace {

Integrand unit() {
    return [](double, double, const PathState&) { return 1.0; };
}

}  // namespace

TEST(DensitySampler, QuantilesOfLinearDensities) {
    auto g = build_grid(DomainSpec::interval(0, 1, 1), 11);
    DensitySampler flat(GridFunction::sample(g, [](double) { return 1.0; }));
    DensitySampler ramp(GridFunction::sample(g, [](double x) { return 2.0 * x; }));
    EXPECT_NEAR(flat.mass(), 1.0, 1e-14);
    EXPECT_NEAR(ramp.mass(), 1.0, 1e-14);
    for (double u : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0}) {
        EXPECT_NEAR(flat.quantile(u), u, 1e-12);
        EXPECT_NEAR(ramp.quantile(u), std::sqrt(u), 1e-12);
    }
    EXPECT_THROW(DensitySampler(GridFunction::sample(g, [](double) { return 0.0; })), InvalidArgument);
    EXPECT_THROW(DensitySampler(GridFunction::sample(g, [](double x) { return x - 0.5; })), InvalidArgument);
}

TEST(DensitySampler, DrawsFollowTheDensity) {
    auto g = build_grid(DomainSpec::interval(0, 1, 1), 21);
    DensitySampler ramp(GridFunction::sample(g, [](double x) { return 2.0 * x; }));
    std::mt19937_64 e(3);
    const int n = 20000;
    int below = 0;
    for (int i = 0; i < n; ++i) below += ramp.draw(e) < 0.5;
    EXPECT_NEAR(below / double(n), 0.25, 4 * std::sqrt(0.25 * 0.75 / n));
}

TEST(Simulate, ReproducibleAndIndependentOfWorkers) {
    auto p = drift_random_params(0.5);
    CoefficientSet c(Family::drift_random, p);
    auto dom = DomainSpec::interval(0, 1, 0.5);
    auto t = build_tree(1, 5, 0.5);
    PathBundle b(t, PathLaw::free, 3000, 2, 0.01, 17);
    const auto a = simulate(c, InitialCondition::point(0.4), 0.0, b, dom, {}, 1);
    const auto a2 = simulate(c, InitialCondition::point(0.4), 0.0, b, dom, {}, 1);
    const auto w = simulate(c, InitialCondition::point(0.4), 0.0, b, dom, {}, 3);
    EXPECT_EQ(a.y, a2.y);
    EXPECT_EQ(a.y, w.y);
    EXPECT_EQ(a.exit_step, w.exit_step);
    auto phi = [](double x, double, const PathState& s) { return x * x + s.omega[0]; };
    const auto e1 = estimate_functional(a, phi), e3 = estimate_functional(w, phi);
    EXPECT_EQ(e1.mean, e3.mean);
    EXPECT_EQ(e1.std_error, e3.std_error);
    std::vector<InitialCondition> inits{InitialCondition::point(0.4)};
    const auto s1 = functional_streaming(c, inits, b, dom, phi, 1);
    const auto s3 = functional_streaming(c, inits, b, dom, phi, 3);
    EXPECT_EQ(s1[0].mean, s3[0].mean);
    EXPECT_NEAR(s1[0].mean, e1.mean, 1e-12);
    EXPECT_NEAR(s1[0].std_error, e1.std_error, 1e-12);
}

TEST(Simulate, StreamingHandlesSeveralStartsWithSharedNoise) {
    CoefficientSet c(Family::drift_random, drift_random_params(0.5));
    auto dom = DomainSpec::interval(0, 1, 0.5);
    auto t = build_tree(1, 5, 0.5);
    PathBundle b(t, PathLaw::free, 2000, 2, 0.01, 4);
    std::vector<InitialCondition> inits{InitialCondition::point(0.2), InitialCondition::point(0.7)};
    const auto both = functional_streaming(c, inits, b, dom, unit());
    for (std::size_t i = 0; i < 2; ++i) {
        const auto single = estimate_functional(simulate(c, inits[i], 0.0, b, dom), unit());
        EXPECT_NEAR(both[i].mean, single.mean, 1e-12);
    }
}

TEST(Simulate, DriftAndDiffusionMoments) {
    CoefficientSet c(Family::constant, constant_params({0.5}, 0.3));
    auto dom = DomainSpec::truncated_line(-50, 50, 1.0);
    auto t = build_tree(1, 4, 1.0);
    PathBundle b(t, PathLaw::free, 20000, 1, 0.01, 5);
    const auto tr = simulate(c, InitialCondition::point(1.0), 0.0, b, dom, RecordSpec{{b.fine_steps()}});
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < tr.paths; ++p) {
        const double y = tr.value(p, 0);
        s += y;
        s2 += y * y;
    }
    const double n = tr.paths, mean = s / n, var = s2 / n - mean * mean;
    EXPECT_NEAR(mean, 1.3, 4 * std::sqrt(0.25 / n));
    EXPECT_NEAR(var, 0.25, 4 * 0.25 * std::sqrt(2.0 / n));
    EXPECT_EQ(tr.exit_step[0], b.fine_steps());
}

TEST(Simulate, ShrinkingTheDomainOnlyAdvancesExit) {
    CoefficientSet c(Family::constant, constant_params({1.0}));
    auto t = build_tree(1, 4, 1.0);
    PathBundle b(t, PathLaw::free, 2000, 1, 0.01, 6);
    const auto wide = simulate(c, InitialCondition::point(0.5), 0.0, b, DomainSpec::interval(-0.5, 1.5, 1.0));
    const auto narrow = simulate(c, InitialCondition::point(0.5), 0.0, b, DomainSpec::interval(0.0, 1.0, 1.0));
    for (std::size_t p = 0; p < 2000; ++p) {
        EXPECT_LE(narrow.exit_step[p], wide.exit_step[p]);
        EXPECT_LE(narrow.tau[p], wide.tau[p]);
    }
}

TEST(Simulate, StandardErrorScalesWithPathCount) {
    CoefficientSet c(Family::constant, constant_params({1.0}));
    auto dom = DomainSpec::interval(0, 1, 0.5);
    auto t = build_tree(1, 4, 0.5);
    double prev = 0.0;
    for (std::size_t m : {2000u, 8000u, 32000u}) {
        PathBundle b(t, PathLaw::free, m, 1, 0.005, 7);
        std::vector<InitialCondition> init{InitialCondition::point(0.3)};
        const double se = functional_streaming(c, init, b, dom, unit())[0].std_error;
        if (prev > 0.0) EXPECT_NEAR(prev / se, 2.0, 0.4);
        prev = se;
    }
}

TEST(Simulate, RejectsBadStarts) {
    CoefficientSet c(Family::constant, constant_params({1.0}));
    auto dom = DomainSpec::interval(0, 1, 1.0);
    auto t = build_tree(1, 4, 1.0);
    PathBundle b(t, PathLaw::free, 10, 1, 0.05, 1);
    EXPECT_THROW(simulate(c, InitialCondition::point(1.5), 0.0, b, dom), InvalidArgument);
    EXPECT_THROW(simulate(c, InitialCondition::point(0.5), 0.33, b, dom), InvalidArgument);
    EXPECT_THROW(simulate(c, InitialCondition::point(0.5), 1.0, b, dom), InvalidArgument);
    EXPECT_NO_THROW(simulate(c, InitialCondition::point(0.5), 0.5, b, dom));
    EXPECT_THROW(simulate(c, InitialCondition::point(0.5), 0.0, b, DomainSpec::interval(0, 1, 2.0)), InvalidArgument);
}

TEST(Simulate, EmpiricalDensityCarriesTheSurvivingMass) {
    CoefficientSet c(Family::constant, constant_params({0.8}));
    auto dom = DomainSpec::interval(0, 1, 0.2);
    auto t = build_tree(1, 2, 0.2);
    PathBundle b(t, PathLaw::free, 5000, 1, 0.01, 8);
    auto grid = build_grid(dom, 41);
    auto p0 = GridFunction::sample(grid, [](double x) { return 6.0 * x * (1.0 - x); });
    auto init = InitialCondition::density(std::make_shared<DensitySampler>(p0));
    const auto tr = simulate(c, init, 0.0, b, dom);
    const auto h = empirical_density(tr, 0.2, grid);
    double mass = 0.0;
    for (double v : h.values()) mass += v * grid->dx();
    std::size_t alive = 0;
    for (std::size_t p = 0; p < tr.paths; ++p) alive += tr.alive(p, b.fine_steps());
    EXPECT_NEAR(mass, double(alive) / tr.paths, 1e-12);
}

TEST(Conditional, LeafAverageMatchesTheUnconditionalLaw) {
    CoefficientSet c(Family::drift_random, drift_random_params(0.8));
    auto dom = DomainSpec::interval(-1, 1, 0.5);
    auto t = build_tree(1, 2, 0.5);
    auto phi = [](double x, double, const PathState&) { return std::cos(x); };
    std::vector<std::size_t> levels{1, 2};
    const double dt = 0.01;
    auto init = InitialCondition::point(0.1);
    std::vector<double> avg(2, 0.0), var(2, 0.0);
    for (std::size_t leaf = 0; leaf < t->leaf_count(); ++leaf) {
        const auto r = conditional_functional(c, phi, t, leaf, levels, 4000, dt, 100 + leaf, init, dom);
        for (std::size_t q = 0; q < 2; ++q) {
            avg[q] += r[q].mean / 4.0;
            var[q] += r[q].std_error * r[q].std_error / 16.0;
        }
    }
    PathBundle b(t, PathLaw::sampled_leaf, 16000, 2, dt, 9);
    std::vector<std::size_t> steps{b.substeps(), 2 * b.substeps()};
    const auto u = observe_streaming(c, init, b, dom, phi, steps);
    for (std::size_t q = 0; q < 2; ++q)
        EXPECT_NEAR(avg[q], u[q].mean, 3.0 * std::sqrt(var[q] + u[q].std_error * u[q].std_error));
}

TEST(Conditional, NeedsATailComponent) {
    CoefficientSet c(Family::constant, constant_params({1.0}));
    auto t = build_tree(1, 2, 1.0);
    std::vector<std::size_t> levels{1};
    EXPECT_THROW(conditional_functional(c, unit(), t, 0, levels, 10, 0.1, 1, InitialCondition::point(0.5),
                                        DomainSpec::interval(0, 1, 1.0)),
                 InvalidArgument);
}
