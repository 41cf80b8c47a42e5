#include "spdelab/model.hpp"

#include <cmath>

#include "spdelab/errors.hpp"

namespace spdelab {

void Model::validate() const {
    if (!grid || !tree || !coeffs) throw InvalidArgument("model needs a grid, a tree and coefficients");
    if (!(theta >= 0.5 && theta <= 1.0)) throw InvalidArgument("theta must lie in [1/2, 1]");
    if (tree->dim() != coeffs->tree_dim())
        throw InvalidArgument("tree dimension differs from the coefficient family's d");
    const double T = grid->domain().horizon;
    if (std::abs(tree->horizon() - T) > 1e-12 * T)
        throw InvalidArgument("tree horizon differs from the domain horizon");
}

}  // namespace spdelab
