#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"

namespace spdelab {

/// Centred-difference stencil of A = f d/dx + (1/2) b d^2/dx^2 on a grid. Rows are
/// built for every node, including the two boundary nodes, so the transpose can use the
/// boundary-node coefficients in its conservative form; outputs on boundary rows are 0.
class GeneratorStencil {
public:
    GeneratorStencil() = default;
    GeneratorStencil(const Grid& grid, const NodeCoefficients& coeffs) { assign(grid, coeffs); }

    void assign(const Grid& grid, const NodeCoefficients& coeffs);

    std::size_t size() const noexcept { return diag_.size(); }
    double lower(std::size_t i) const noexcept { return lower_[i]; }
    double diag(std::size_t i) const noexcept { return diag_[i]; }
    double upper(std::size_t i) const noexcept { return upper_[i]; }

    /// out = A u on interior rows, 0 on the boundary.
    void apply(std::span<const double> u, std::span<double> out) const;
    /// out = A^T w on interior rows (the Lagrange adjoint -d(f w) + (1/2) d^2(b w)).
    void apply_transpose(std::span<const double> w, std::span<double> out) const;

private:
    std::vector<double> lower_;
    std::vector<double> diag_;
    std::vector<double> upper_;
};

/// Factorisation of (I - c A) or (I - c A^T) on interior nodes with homogeneous Dirichlet
/// data; solves in place and leaves the boundary entries at 0.
class ShiftedSolver {
public:
    enum class Side { direct, transpose };

    void factor(const GeneratorStencil& stencil, double c, Side side);
    void solve(std::span<double> rhs) const;

private:
    std::vector<double> sub_;
    std::vector<double> inv_pivot_;
    std::vector<double> super_mod_;
};

/// apply_A / apply_A_star at one (t, driving state).
GridFunction apply_A(const CoefficientSet& coeffs, const GridFunction& u, const PathState& state);
GridFunction apply_A_star(const CoefficientSet& coeffs, const GridFunction& u,
                          const PathState& state);

}  // namespace spdelab
