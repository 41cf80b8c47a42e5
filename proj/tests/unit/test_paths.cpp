#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "spdelab/errors.hpp"
#include "spdelab/paths.hpp"

using namespace spdelab;

TEST(Seeds, StreamsAreDistinctAndStable) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t p = 0; p < 100; ++p)
        for (std::uint64_t s = 0; s < 2; ++s) seen.insert(stream_seed(42, p, s));
    EXPECT_EQ(seen.size(), 200u);
    EXPECT_EQ(stream_seed(42, 3, 1), stream_seed(42, 3, 1));
    EXPECT_NE(stream_seed(42, 3, 1), stream_seed(43, 3, 1));
}

TEST(PathBundle, ArgumentChecks) {
    auto t = build_tree(1, 4, 1.0);
    EXPECT_THROW(PathBundle(t, PathLaw::free, 0, 1, 0.05, 1), InvalidArgument);
    EXPECT_THROW(PathBundle(t, PathLaw::free, 10, 1, 0.03, 1), InvalidArgument);
    EXPECT_THROW(PathBundle(t, PathLaw::free, 10, 1, -0.05, 1), InvalidArgument);
    EXPECT_THROW(PathBundle(t, PathLaw::fixed_leaf, 10, 2, 0.05, 1, 16), InvalidArgument);
    auto t2 = build_tree(2, 2, 1.0);
    EXPECT_THROW(PathBundle(t2, PathLaw::free, 10, 1, 0.05, 1), InvalidArgument);
    PathBundle b(t, PathLaw::free, 10, 2, 0.05, 1);
    EXPECT_EQ(b.substeps(), 5u);
    EXPECT_EQ(b.fine_steps(), 20u);
}

TEST(PathBundle, CursorReplaysGenerate) {
    auto t = build_tree(1, 5, 1.0);
    for (auto law : {PathLaw::free, PathLaw::fixed_leaf, PathLaw::sampled_leaf}) {
        PathBundle b(t, law, 20, 2, 0.05, 9, 13);
        PathBundle::Realization r;
        for (std::size_t p = 0; p < 20; p += 3) {
            b.generate(p, r);
            PathBundle::Cursor c(b, p);
            EXPECT_EQ(c.leaf(), r.leaf);
            for (std::size_t k = 0; k < 5; ++k) {
                c.advance();
                for (std::size_t q = 0; q < b.substeps() * 2; ++q)
                    EXPECT_EQ(c.block()[q], r.increments[k * b.substeps() * 2 + q]);
                EXPECT_EQ(c.omega(k + 1)[0], r.omega[k + 1]);
            }
            EXPECT_THROW(c.advance(), InvalidArgument);
        }
    }
}

TEST(PathBundle, FreePathsReadOmegaOffTheIncrements) {
    auto t = build_tree(1, 4, 2.0);
    PathBundle b(t, PathLaw::free, 5, 2, 0.1, 3);
    PathBundle::Realization r;
    b.generate(2, r);
    double w = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t q = 0; q < b.substeps(); ++q) w += r.increments[(k * b.substeps() + q) * 2];
        EXPECT_NEAR(r.omega[k + 1], w, 1e-12);
    }
}

TEST(PathBundle, BridgedPathsPassThroughTheLeaf) {
    auto t = build_tree(2, 3, 0.6);
    for (std::size_t leaf : {0u, 17u, 63u}) {
        PathBundle b(t, PathLaw::fixed_leaf, 30, 3, 0.02, 5, leaf);
        const auto path = t->leaf_path(leaf);
        PathBundle::Realization r;
        for (std::size_t p = 0; p < 30; ++p) {
            b.generate(p, r);
            EXPECT_EQ(r.leaf, leaf);
            std::vector<double> w(3, 0.0);
            for (std::size_t k = 0; k < 3; ++k) {
                for (std::size_t q = 0; q < b.substeps(); ++q)
                    for (std::size_t j = 0; j < 3; ++j) w[j] += r.increments[(k * b.substeps() + q) * 3 + j];
                for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(w[j], t->omega(k + 1, path[k + 1])[j], 1e-12);
            }
        }
    }
}

TEST(PathBundle, BridgeFromALeafPath) {
    auto t = build_tree(1, 4, 1.0);
    const auto path = t->leaf_path(11);
    auto b = bridge_paths(t, path, 10, 2, 0.05, 4);
    EXPECT_EQ(b.law(), PathLaw::fixed_leaf);
    EXPECT_EQ(b.leaf(), 11u);
    std::vector<std::size_t> broken = path;
    broken[2] = (broken[2] + 1) % 4;
    EXPECT_THROW(bridge_paths(t, broken, 10, 2, 0.05, 4), InvalidArgument);
}

TEST(PathBundle, SampledLeavesAreUniform) {
    auto t = build_tree(1, 2, 1.0);
    PathBundle b(t, PathLaw::sampled_leaf, 8000, 2, 0.5, 6);
    std::vector<int> count(4, 0);
    PathBundle::Realization r;
    for (std::size_t p = 0; p < 8000; ++p) {
        b.generate(p, r);
        ++count[r.leaf];
    }
    for (int c : count) EXPECT_NEAR(c, 2000, 4 * std::sqrt(8000 * 0.25 * 0.75));
}

TEST(PathBundle, FreeIncrementsHaveTheRightVariance) {
    auto t = build_tree(1, 2, 1.0);
    PathBundle b(t, PathLaw::free, 4000, 2, 0.1, 8);
    PathBundle::Realization r;
    double s = 0.0, s2 = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < 4000; ++p) {
        b.generate(p, r);
        for (double v : r.increments) {
            s += v;
            s2 += v * v;
            ++n;
        }
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    EXPECT_NEAR(mean, 0.0, 4 * std::sqrt(0.1 / n));
    EXPECT_NEAR(var, 0.1, 4 * 0.1 * std::sqrt(2.0 / n));
}
