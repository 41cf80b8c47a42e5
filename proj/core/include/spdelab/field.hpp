#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "spdelab/grid.hpp"
#include "spdelab/lambda_transform.hpp"
#include "spdelab/tree.hpp"

namespace spdelab {

enum class Regularity { h_minus1, h0, h1 };

/// Grid x time-level x tree-node tensor. The slice at level k is indexed by the nodes of
/// level k only, so every field is adapted by construction.
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    SpaceTimeField(std::shared_ptr<const Grid> grid, std::shared_ptr<const ScenarioTree> tree,
                   Regularity regularity = Regularity::h0);

    /// Evaluates fn(x, state) at every grid node of every tree node.
    static SpaceTimeField sample(std::shared_ptr<const Grid> grid,
                                 std::shared_ptr<const ScenarioTree> tree,
                                 const std::function<double(double, const PathState&)>& fn);

    const Grid& grid() const { return *grid_; }
    const ScenarioTree& tree() const { return *tree_; }
    const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
    const std::shared_ptr<const ScenarioTree>& tree_ptr() const noexcept { return tree_; }
    Regularity regularity() const noexcept { return regularity_; }
    void set_regularity(Regularity r) noexcept { regularity_ = r; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<double> slice(std::size_t level, std::size_t index) noexcept {
        return {data_.data() + tree_->global_index(level, index) * nx_, nx_};
    }
    std::span<const double> slice(std::size_t level, std::size_t index) const noexcept {
        return {data_.data() + tree_->global_index(level, index) * nx_, nx_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Layout equality (same grid layout and same tree shape).
    bool compatible(const SpaceTimeField& other) const noexcept;
    void require_compatible(const SpaceTimeField& other) const;

    SpaceTimeField& operator+=(const SpaceTimeField& other);
    SpaceTimeField& operator-=(const SpaceTimeField& other);
    SpaceTimeField& operator*=(double s) noexcept;
    /// this += s * other
    SpaceTimeField& axpy(double s, const SpaceTimeField& other);
    void fill(double v) noexcept;
    /// max |value| over the whole tensor.
    double max_abs() const noexcept;

private:
    std::shared_ptr<const Grid> grid_;
    std::shared_ptr<const ScenarioTree> tree_;
    Regularity regularity_ = Regularity::h0;
    std::size_t nx_ = 0;
    std::vector<double> data_;
};

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator*(double s, SpaceTimeField a);

/// Discrete X^0 product: sum over levels 0..N-1 of dt * sum over nodes of
/// prob(node) * <F, G>_{H^0}. The terminal level carries no time weight.
double inner_X0(const SpaceTimeField& f, const SpaceTimeField& g);
double norm_X0(const SpaceTimeField& f);
/// ||F||_{X^k} with the H^k norm taken through Lambda^k, k in {-1, 0, 1}.
double norm_X(const SpaceTimeField& f, int k, const LambdaTransform& lambda);
/// ||F||_{C_0} = max over levels of sqrt(E ||F(t)||^2_{H^0}).
double norm_C0(const SpaceTimeField& f);

/// Probability-average over the nodes of a level (the unconditional mean slice).
std::vector<double> level_mean(const SpaceTimeField& f, std::size_t level);

}  // namespace spdelab
