#pragma once

#include <cstdint>
#include <memory>

#include "spdelab/field.hpp"
#include "spdelab/grid.hpp"

namespace spdelab {

/// Smooth adapted test field
///   F(x, t, w) = sum_m a_m sin(m pi (x - a)/(b - a)) (c_m0 + c_m1 t + c_m2 tanh(w_1(t)) [+ c_m3 tanh(w_2(t))])
/// with coefficients drawn uniformly from [-1, 1]. Zero on the boundary.
/// With `random_in_omega` false the path terms are dropped (a nonrandom field).
SpaceTimeField random_smooth_field(std::shared_ptr<const Grid> grid,
                                   std::shared_ptr<const ScenarioTree> tree, std::uint64_t seed,
                                   std::size_t modes = 4, bool random_in_omega = true);

}  // namespace spdelab
