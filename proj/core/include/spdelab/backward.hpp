#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spdelab/field.hpp"
#include "spdelab/model.hpp"

namespace spdelab {

/// U(x, t) along one leaf path of the tree: levels 0..N, nx values each.
struct PathwiseSolution {
    std::size_t leaf = 0;
    std::size_t nx = 0;
    std::vector<double> values;

    std::span<const double> at(std::size_t level) const noexcept {
        return {values.data() + level * nx, nx};
    }
};

/// Pathwise backward parabolic problem dU/dt + A U = -g, U = 0 on the parabolic
/// boundary at t = T, solved along the node sequence of one leaf with the theta scheme
/// (I - theta dt A_k) U^k = (I + (1-theta) dt A_k) U^{k+1} + dt g_k.
PathwiseSolution solve_backward_pathwise(const SpaceTimeField& g, const Model& model,
                                         std::size_t leaf);

/// The adapted pair (v, X) of the backward SPDE dv + (A v + g) dt = X d omega, v(T) = 0.
struct BackwardSolution {
    SpaceTimeField v;
    std::vector<SpaceTimeField> chi;  ///< one kernel per tree component
};

enum class BackwardRoute {
    /// Conditional expectation carried level by level down the tree. Because A_k and g_k
    /// are F_{t_k}-measurable this is algebraically the same as averaging the pathwise
    /// solutions, at O(nodes) instead of O(leaves x levels) cost.
    tree_induction,
    /// Literal construction: solve every leaf path, then take E{U | F_t} and the Clark
    /// kernel of U(x, t, .) on the diagonal.
    pathwise_average,
};

/// v = T g and X_j = G_j g.
BackwardSolution solve_backward(const SpaceTimeField& g, const Model& model,
                                BackwardRoute route = BackwardRoute::tree_induction);

SpaceTimeField op_T(const SpaceTimeField& g, const Model& model,
                    BackwardRoute route = BackwardRoute::tree_induction);
std::vector<SpaceTimeField> op_G(const SpaceTimeField& g, const Model& model,
                                 BackwardRoute route = BackwardRoute::tree_induction);

/// B g = -sum_j beta_j dX_j/dx with X_j = G_j g; computed level by level without storing X.
SpaceTimeField op_B(const SpaceTimeField& g, const Model& model);

enum class InitialIterate { phi, zero };

struct RSolveOptions {
    double tol = 1e-10;          ///< relative residual ||(I+B)g - phi|| / ||phi||
    std::size_t max_iter = 400;
    double alpha = 0.8;          ///< damping in (0, 1]
    InitialIterate initial = InitialIterate::phi;
    /// Overrides `initial` when set.
    std::optional<SpaceTimeField> initial_field;
};

struct RSolveResult {
    SpaceTimeField g;
    std::size_t iterations = 0;          ///< applications of B
    double relative_residual = 0.0;
    std::vector<double> history;         ///< relative residual before each update
};

/// g = R phi = (I + B)^{-1} phi by the damped fixed point g <- (1-a) g + a (phi - B g).
/// Throws ConvergenceError when max_iter is exhausted.
RSolveResult solve_R(const SpaceTimeField& phi, const Model& model,
                     const RSolveOptions& options = {});

struct LSolution {
    BackwardSolution solution;  ///< (v, X) = (T R phi, G R phi)
    RSolveResult r;
};

LSolution op_L(const SpaceTimeField& phi, const Model& model, const RSolveOptions& options = {});

/// X^0 norm of the per-leaf defect of the integral identity
///   v(t_k) = sum_{m>=k} dt [ (A_m v_m + A_m v_{m+1}) / 2 + g_m ] - sum_{m>=k} X_m . d omega_{m+1}.
double residual_bspde(const BackwardSolution& solution, const SpaceTimeField& g,
                      const Model& model);

}  // namespace spdelab
