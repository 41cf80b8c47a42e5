#include "spdelab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spdelab/errors.hpp"

namespace spdelab {

ScenarioTree::ScenarioTree(std::size_t d, std::size_t steps, double horizon)
    : d_(d), steps_(steps), horizon_(horizon) {
    if (d < 1 || d > kMaxTreeDim) throw InvalidArgument("tree dimension must be 1 or 2");
    const std::size_t cap = d == 1 ? kMaxStepsDim1 : kMaxStepsDim2;
    if (steps < 1 || steps > cap)
        throw InvalidArgument("tree steps must lie in [1, " + std::to_string(cap) +
                              "] for d = " + std::to_string(d));
    if (!std::isfinite(horizon) || !(horizon > 0.0))
        throw InvalidArgument("tree horizon must be positive");

    dt_ = horizon_ / static_cast<double>(steps_);
    sqrt_dt_ = std::sqrt(dt_);
    branching_ = std::size_t{1} << d_;

    level_sizes_.resize(steps_ + 1);
    level_offsets_.resize(steps_ + 2);
    level_probs_.resize(steps_ + 1);
    level_sizes_[0] = 1;
    level_probs_[0] = 1.0;
    for (std::size_t k = 1; k <= steps_; ++k) {
        level_sizes_[k] = level_sizes_[k - 1] * branching_;
        level_probs_[k] = level_probs_[k - 1] / static_cast<double>(branching_);
    }
    level_offsets_[0] = 0;
    for (std::size_t k = 0; k <= steps_; ++k)
        level_offsets_[k + 1] = level_offsets_[k] + level_sizes_[k];
    leaf_block_.resize(steps_ + 1);
    for (std::size_t k = 0; k <= steps_; ++k)
        leaf_block_[k] = level_sizes_[steps_] / level_sizes_[k];

    omega_.assign(node_count() * d_, 0.0);
    for (std::size_t k = 0; k < steps_; ++k) {
        for (std::size_t i = 0; i < level_sizes_[k]; ++i) {
            const double* parent = omega_.data() + global_index(k, i) * d_;
            for (std::size_t c = 0; c < branching_; ++c) {
                double* kid = omega_.data() + global_index(k + 1, child(i, c)) * d_;
                for (std::size_t j = 0; j < d_; ++j) kid[j] = parent[j] + child_increment(c, j);
            }
        }
    }
}

TreeNode ScenarioTree::node(std::size_t level, std::size_t index) const {
    if (level > steps_ || index >= level_sizes_[level]) throw InvalidArgument("node out of range");
    TreeNode n;
    n.level = level;
    n.index = index;
    if (level > 0) {
        n.parent = index / branching_;
        const std::size_t c = index % branching_;
        for (std::size_t j = 0; j < d_; ++j) n.increment[j] = child_increment(c, j);
    }
    return n;
}

PathState ScenarioTree::state(std::size_t level, std::size_t index) const noexcept {
    PathState s;
    s.t = time(level);
    const auto w = omega(level, index);
    for (std::size_t j = 0; j < d_; ++j) s.omega[j] = w[j];
    return s;
}

std::vector<std::size_t> ScenarioTree::leaf_path(std::size_t leaf) const {
    if (leaf >= leaf_count()) throw InvalidArgument("leaf out of range");
    std::vector<std::size_t> path(steps_ + 1);
    for (std::size_t k = 0; k <= steps_; ++k) path[k] = ancestor(leaf, k);
    return path;
}

std::shared_ptr<const ScenarioTree> build_tree(std::size_t d, std::size_t steps, double horizon) {
    return std::make_shared<const ScenarioTree>(d, steps, horizon);
}

namespace {

void require_leaves(std::span<const double> leaf_values, const ScenarioTree& tree) {
    if (leaf_values.size() != tree.leaf_count())
        throw InvalidArgument("expected one value per leaf");
}

// Conditional means at every level, level-major in global node order.
std::vector<double> all_level_means(std::span<const double> leaf_values,
                                    const ScenarioTree& tree) {
    std::vector<double> m(tree.node_count());
    const std::size_t n = tree.steps();
    const std::size_t kb = tree.branching();
    const double inv = 1.0 / static_cast<double>(kb);
    std::copy(leaf_values.begin(), leaf_values.end(), m.begin() + tree.level_offset(n));
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t i = 0; i < tree.level_size(k); ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < kb; ++c) s += m[tree.global_index(k + 1, tree.child(i, c))];
            m[tree.global_index(k, i)] = s * inv;
        }
    }
    return m;
}

}  // namespace

LevelValues cond_expect(std::span<const double> leaf_values, std::size_t level,
                        const ScenarioTree& tree) {
    require_leaves(leaf_values, tree);
    if (level > tree.steps()) throw InvalidArgument("level out of range");
    const std::size_t block = tree.leaves_below(level);
    LevelValues out(tree.level_size(level));
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t l = i * block; l < (i + 1) * block; ++l) s += leaf_values[l];
        out[i] = s / static_cast<double>(block);
    }
    return out;
}

LeafValues ito_integral(const AdaptedProcess& gamma, const ScenarioTree& tree) {
    if (gamma.dim != tree.dim() || gamma.values.size() != tree.inner_node_count() * tree.dim())
        throw InvalidArgument("kernel layout does not match the tree");
    LeafValues out(tree.leaf_count(), 0.0);
    const std::size_t kb = tree.branching();
    for (std::size_t leaf = 0; leaf < out.size(); ++leaf) {
        double s = 0.0;
        for (std::size_t k = 0; k < tree.steps(); ++k) {
            const std::size_t node = tree.ancestor(leaf, k);
            const std::size_t c = tree.ancestor(leaf, k + 1) % kb;
            for (std::size_t j = 0; j < tree.dim(); ++j)
                s += gamma.at(tree, k, node, j) * tree.child_increment(c, j);
        }
        out[leaf] = s;
    }
    return out;
}

MartingaleDecomposition clark_decompose(std::span<const double> leaf_values,
                                        const ScenarioTree& tree) {
    require_leaves(leaf_values, tree);
    const auto m = all_level_means(leaf_values, tree);
    const std::size_t kb = tree.branching();
    const std::size_t d = tree.dim();
    const double inv = 1.0 / static_cast<double>(kb);

    MartingaleDecomposition out;
    out.mean = m[0];
    out.kernels = AdaptedProcess(tree);
    if (d == 2) out.cross.assign(tree.inner_node_count(), 0.0);
    for (std::size_t k = 0; k < tree.steps(); ++k) {
        for (std::size_t i = 0; i < tree.level_size(k); ++i) {
            for (std::size_t c = 0; c < kb; ++c) {
                const double mc = m[tree.global_index(k + 1, tree.child(i, c))] * inv;
                for (std::size_t j = 0; j < d; ++j)
                    out.kernels.at(tree, k, i, j) += mc * tree.child_sign(c, j);
                if (d == 2)
                    out.cross[tree.global_index(k, i)] +=
                        mc * tree.child_sign(c, 0) * tree.child_sign(c, 1);
            }
            for (std::size_t j = 0; j < d; ++j) out.kernels.at(tree, k, i, j) /= tree.sqrt_dt();
            if (d == 2) out.cross[tree.global_index(k, i)] /= tree.dt();
        }
    }
    return out;
}

LeafValues MartingaleDecomposition::reconstruct(const ScenarioTree& tree) const {
    LeafValues out = ito_integral(kernels, tree);
    const std::size_t kb = tree.branching();
    for (std::size_t leaf = 0; leaf < out.size(); ++leaf) {
        out[leaf] += mean;
        if (cross.empty()) continue;
        for (std::size_t k = 0; k < tree.steps(); ++k) {
            const std::size_t node = tree.ancestor(leaf, k);
            const std::size_t c = tree.ancestor(leaf, k + 1) % kb;
            out[leaf] += cross[tree.global_index(k, node)] * tree.child_increment(c, 0) *
                         tree.child_increment(c, 1);
        }
    }
    return out;
}

double expectation(std::span<const double> leaf_values, const ScenarioTree& tree) {
    require_leaves(leaf_values, tree);
    double s = 0.0;
    for (double v : leaf_values) s += v;
    return s / static_cast<double>(leaf_values.size());
}

}  // namespace spdelab
