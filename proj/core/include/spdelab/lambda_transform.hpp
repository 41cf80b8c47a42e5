#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

/// Lambda = sqrt(I - Delta) realised in the sine eigenbasis of the discrete Dirichlet
/// Laplacian. Immutable after construction; apply() may be called concurrently.
class LambdaTransform {
public:
    explicit LambdaTransform(std::shared_ptr<const Grid> grid);
    ~LambdaTransform();
    LambdaTransform(const LambdaTransform&) = delete;
    LambdaTransform& operator=(const LambdaTransform&) = delete;

    const Grid& grid() const noexcept { return *grid_; }
    /// Eigenvalues of -Delta_h, ascending, one per interior mode.
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

    /// out = Lambda^k u, k in {-1, 0, 1}. Boundary entries of the input are ignored
    /// and the output vanishes on the boundary.
    void apply(std::span<const double> u, int k, std::span<double> out) const;

    /// ||u||_{H^k} = ||Lambda^k u||_{H^0}.
    double norm(std::span<const double> u, int k) const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> eigenvalues_;
    void* plan_ = nullptr;
};

GridFunction lambda_pow(const LambdaTransform& lambda, const GridFunction& u, int k);

}  // namespace spdelab
