#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdelab/grid.hpp"
#include "spdelab/tree.hpp"

namespace spdelab {

enum class Family {
    constant,      ///< f = f0, beta = (sigma_1, ..., sigma_d0); nonrandom
    drift_random,  ///< f = kappa * tanh(omega_1(t)), beta constant, d < d0
    space_smooth,  ///< f = a * sin(pi x) * (1 + eps * tanh(omega_1(t))), beta constant
};

std::string_view family_name(Family family) noexcept;
Family parse_family(std::string_view name);

struct FamilyParams {
    std::size_t d = 1;           ///< number of driving components carried by the tree
    std::vector<double> sigma;   ///< beta row, one entry per Wiener component (d0 = size)
    double f0 = 0.0;             ///< constant
    double kappa = 0.0;          ///< drift-random
    double amplitude = 0.0;      ///< space-smooth: a
    double epsilon = 0.0;        ///< space-smooth: eps
};

/// Coefficients f, beta (and b = beta beta^T) sampled on every grid node for one
/// (t, path state). beta is stored column-major: column j occupies [j*nx, (j+1)*nx).
struct NodeCoefficients {
    std::size_t nx = 0;
    std::size_t d0 = 0;
    std::vector<double> f;
    std::vector<double> b;
    std::vector<double> beta;

    std::span<const double> beta_column(std::size_t j) const noexcept {
        return {beta.data() + j * nx, nx};
    }
};

/// Random coefficient fields of the Ito equation dy = f dt + beta dW. Randomness enters
/// only through omega_1 at the evaluation time, so every family is adapted by construction.
class CoefficientSet {
public:
    CoefficientSet(Family family, FamilyParams params);

    Family family() const noexcept { return family_; }
    const FamilyParams& params() const noexcept { return params_; }
    std::size_t tree_dim() const noexcept { return params_.d; }
    std::size_t noise_dim() const noexcept { return params_.sigma.size(); }
    /// True when neither f nor beta depends on the driving path.
    bool nonrandom() const noexcept;

    double drift(double x, const PathState& state) const noexcept;
    double beta(std::size_t j, double x, const PathState& state) const noexcept;

    void sample(std::span<const double> x, const PathState& state, NodeCoefficients& out) const;

private:
    Family family_;
    FamilyParams params_;
};

CoefficientSet make_family(Family family, FamilyParams params);
CoefficientSet make_family(std::string_view name, FamilyParams params);

/// Bounds measured over every grid node x every tree node.
struct ValidationReport {
    double delta = 0.0;        ///< min eigenvalue of the tail block tilde-beta tilde-beta^T
    double delta_b = 0.0;      ///< min eigenvalue of beta beta^T
    double k1 = 0.0;           ///< sup |f|
    double k2 = 0.0;           ///< sup |beta| (Frobenius)
    double k3 = 0.0;           ///< sup |d beta / dx| by finite differences
    double lipschitz_f = 0.0;  ///< sup |f(x_{i+1}) - f(x_i)| / dx
    bool superparabolic_required = false;
    std::vector<std::string> failures;

    bool passed() const noexcept { return failures.empty(); }
};

inline constexpr double kDegeneracyThreshold = 1e-6;

ValidationReport validate(const CoefficientSet& coeffs, const Grid& grid,
                          const ScenarioTree& tree, bool superparabolic_required);

}  // namespace spdelab
