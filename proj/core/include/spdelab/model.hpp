#pragma once

#include <memory>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/tree.hpp"

namespace spdelab {

/// Everything a field solver needs: the spatial grid, the scenario tree and the
/// coefficient family. theta selects the time scheme of the backward solver
/// (1 = fully implicit, 1/2 = Crank-Nicolson).
struct Model {
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<const ScenarioTree> tree;
    std::shared_ptr<const CoefficientSet> coeffs;
    double theta = 1.0;

    /// Throws InvalidArgument on missing members, theta outside [1/2, 1], or a tree whose
    /// dimension differs from the coefficient family's.
    void validate() const;
    /// d < d0: the tail block tilde-beta is present.
    bool superparabolic() const noexcept { return coeffs->noise_dim() > coeffs->tree_dim(); }
};

}  // namespace spdelab
