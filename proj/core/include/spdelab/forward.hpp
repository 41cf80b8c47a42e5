#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spdelab/field.hpp"
#include "spdelab/model.hpp"

namespace spdelab {

/// One forward step of dp = (A* p + drift) dt + sum_j noise_j d omega_j:
///   (I - dt A*(state)) p_new = p_old + dt drift + sum_j noise_j d omega_j.
/// drift may be empty (no source); noise_sources may be empty or hold one GridFunction
/// per increment. Throws InvalidArgument when |d omega_j| differs from sqrt(dt).
GridFunction step_forward(const CoefficientSet& coeffs, const PathState& state,
                          const GridFunction& p_old, const GridFunction* drift,
                          std::span<const GridFunction> noise_sources,
                          std::span<const double> d_omega, double dt);

/// pi = T* h: d pi/dt = A* pi + h, pi(0) = 0.
SpaceTimeField solve_T_star(const SpaceTimeField& h, const Model& model);

/// q = G_j* h: dq = A* q dt + h d omega_j, q(0) = 0.
SpaceTimeField solve_G_star(std::size_t j, const SpaceTimeField& h, const Model& model);

/// z = B* h: dz = A* z dt + sum_j d(beta_j h)/dx d omega_j, z(0) = 0.
SpaceTimeField solve_B_star(const SpaceTimeField& h, const Model& model);

/// h = R* pi = pi - z with dz = A* z dt + sum_j d(beta_j (pi - z))/dx d omega_j.
/// Requires d < d0.
SpaceTimeField solve_R_star(const SpaceTimeField& pi, const Model& model);

/// h = L* xi: dh = (A* h + xi) dt - sum_j d(beta_j h)/dx d omega_j. Requires d < d0.
SpaceTimeField solve_L_star(const SpaceTimeField& xi, const Model& model);

struct DensityOptions {
    /// Refuse coefficient sets that fail validation in superparabolic mode.
    bool validate = true;
    double blowup = 1e6;
    /// Relative depth of a negative lobe that flags the run.
    double negativity_flag = 1e-3;
};

struct DensitySolution {
    SpaceTimeField p;
    std::vector<double> mass;        ///< integral of p per global tree node
    std::vector<double> min_value;   ///< min p per level
    std::vector<double> max_value;   ///< max p per level
    bool negativity_flagged = false;
};

/// Conditional density of the killed diffusion given the driving path:
/// dp = A* p dt - sum_j d(beta_j p)/dx d omega_j, p(0) = p0.
DensitySolution solve_density(const GridFunction& p0, const Model& model,
                              const DensityOptions& options = {});

}  // namespace spdelab
