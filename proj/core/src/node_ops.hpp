#pragma once

#include <span>
#include <vector>

#include "spdelab/generator.hpp"
#include "spdelab/model.hpp"

namespace spdelab::detail {

/// Coefficients and generator stencil frozen at one tree node.
struct NodeOps {
    NodeCoefficients coeffs;
    GeneratorStencil stencil;

    void assign(const Model& model, std::size_t level, std::size_t index) {
        model.coeffs->sample(model.grid->nodes(), model.tree->state(level, index), coeffs);
        stencil.assign(*model.grid, coeffs);
    }
};

inline void axpy(double s, std::span<const double> x, std::span<double> y) noexcept {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

}  // namespace spdelab::detail
