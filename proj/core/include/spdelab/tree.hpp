#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace spdelab {

inline constexpr std::size_t kMaxTreeDim = 2;

/// Values of the driving path at a time: t and omega_j(t), j < d.
struct PathState {
    double t = 0.0;
    std::array<double, kMaxTreeDim> omega{};
};

/// A node of the scenario tree. `index` counts nodes within a level, in the order
/// that keeps every subtree's leaves contiguous.
struct TreeNode {
    std::size_t level = 0;
    std::size_t index = 0;
    std::size_t parent = 0;                            ///< index at level-1 (0 for the root)
    std::array<double, kMaxTreeDim> increment{};       ///< edge increment from the parent
};

/// Binomial model of the d driving Wiener components on [0, T]: every node has 2^d
/// children, child c moves component j by +sqrt(dt) if bit j of c is set, else -sqrt(dt).
class ScenarioTree {
public:
    ScenarioTree(std::size_t d, std::size_t steps, double horizon);

    std::size_t dim() const noexcept { return d_; }
    std::size_t steps() const noexcept { return steps_; }
    double horizon() const noexcept { return horizon_; }
    double dt() const noexcept { return dt_; }
    double sqrt_dt() const noexcept { return sqrt_dt_; }
    std::size_t branching() const noexcept { return branching_; }

    double time(std::size_t level) const noexcept { return static_cast<double>(level) * dt_; }
    std::size_t level_size(std::size_t level) const noexcept { return level_sizes_[level]; }
    std::size_t level_offset(std::size_t level) const noexcept { return level_offsets_[level]; }
    std::size_t node_count() const noexcept { return level_offsets_.back(); }
    std::size_t leaf_count() const noexcept { return level_sizes_.back(); }
    /// Number of nodes on levels 0..steps-1 (the nodes that carry an outgoing increment).
    std::size_t inner_node_count() const noexcept { return level_offsets_[steps_]; }

    /// Probability of any single node at the level.
    double probability(std::size_t level) const noexcept { return level_probs_[level]; }

    std::size_t global_index(std::size_t level, std::size_t index) const noexcept {
        return level_offsets_[level] + index;
    }
    std::size_t child(std::size_t index, std::size_t c) const noexcept {
        return index * branching_ + c;
    }

    /// Sign (+1/-1) of component j on the edge into child slot c.
    double child_sign(std::size_t c, std::size_t j) const noexcept {
        return ((c >> j) & 1U) ? 1.0 : -1.0;
    }
    double child_increment(std::size_t c, std::size_t j) const noexcept {
        return child_sign(c, j) * sqrt_dt_;
    }

    TreeNode node(std::size_t level, std::size_t index) const;

    /// omega(t_level) along the path to the node, one value per tree component.
    std::span<const double> omega(std::size_t level, std::size_t index) const noexcept {
        return {omega_.data() + global_index(level, index) * d_, d_};
    }
    PathState state(std::size_t level, std::size_t index) const noexcept;

    /// Ancestor of a leaf at the given level.
    std::size_t ancestor(std::size_t leaf, std::size_t level) const noexcept {
        return leaf / leaf_block_[level];
    }
    /// Number of leaves below any node of the level.
    std::size_t leaves_below(std::size_t level) const noexcept { return leaf_block_[level]; }

    /// Node indices (one per level 0..steps) along the path to a leaf.
    std::vector<std::size_t> leaf_path(std::size_t leaf) const;

private:
    std::size_t d_;
    std::size_t steps_;
    double horizon_;
    double dt_;
    double sqrt_dt_;
    std::size_t branching_;
    std::vector<std::size_t> level_sizes_;
    std::vector<std::size_t> level_offsets_;  // steps+2 entries; back() = node count
    std::vector<std::size_t> leaf_block_;
    std::vector<double> level_probs_;
    std::vector<double> omega_;
};

inline constexpr std::size_t kMaxStepsDim1 = 16;
inline constexpr std::size_t kMaxStepsDim2 = 8;

std::shared_ptr<const ScenarioTree> build_tree(std::size_t d, std::size_t steps, double horizon);

/// Values indexed by the leaves of a tree (an F_T-measurable random variable).
using LeafValues = std::vector<double>;
/// Values indexed by the nodes of a single level (an F_t-measurable random variable).
using LevelValues = std::vector<double>;

/// E{X | F_t} for every node of level t.
LevelValues cond_expect(std::span<const double> leaf_values, std::size_t level,
                        const ScenarioTree& tree);

/// An adapted d-row process on levels 0..steps-1: row of node n multiplies the increment
/// leaving n. Layout: inner_node_count() x d, global node order.
struct AdaptedProcess {
    std::size_t dim = 1;
    std::vector<double> values;

    AdaptedProcess() = default;
    explicit AdaptedProcess(const ScenarioTree& tree)
        : dim(tree.dim()), values(tree.inner_node_count() * tree.dim(), 0.0) {}

    double& at(const ScenarioTree& tree, std::size_t level, std::size_t index, std::size_t j) {
        return values[tree.global_index(level, index) * dim + j];
    }
    double at(const ScenarioTree& tree, std::size_t level, std::size_t index,
              std::size_t j) const {
        return values[tree.global_index(level, index) * dim + j];
    }
};

/// Per leaf, sum over the path edges of gamma_j(node) * d omega_j(edge).
LeafValues ito_integral(const AdaptedProcess& gamma, const ScenarioTree& tree);

/// Clark representation X = mean + sum_levels [ sum_j gamma_j d omega_j + cross d omega_1 d omega_2 ].
/// The `cross` kernel exists only for d = 2, where the two sign variables of an edge span a
/// four-dimensional space and the product chaos is needed for an exact reconstruction.
struct MartingaleDecomposition {
    double mean = 0.0;
    AdaptedProcess kernels;
    std::vector<double> cross;  ///< empty unless d = 2; indexed by global node

    LeafValues reconstruct(const ScenarioTree& tree) const;
};

MartingaleDecomposition clark_decompose(std::span<const double> leaf_values,
                                        const ScenarioTree& tree);

/// Expectation of a leaf-indexed variable.
double expectation(std::span<const double> leaf_values, const ScenarioTree& tree);

}  // namespace spdelab
