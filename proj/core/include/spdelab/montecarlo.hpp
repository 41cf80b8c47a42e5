#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/paths.hpp"

namespace spdelab {

/// Inverse-CDF sampler of the piecewise-linear interpolant of a nonnegative grid density.
class DensitySampler {
public:
    explicit DensitySampler(const GridFunction& p0);
    /// Maps u in [0, 1) to a point of [a, b].
    double quantile(double u) const;
    double draw(std::mt19937_64& engine) const;
    double mass() const noexcept { return total_; }

private:
    std::vector<double> x_;
    std::vector<double> p_;
    std::vector<double> cdf_;  // cumulative mass at nodes
    double total_ = 0.0;
};

/// Starting value of the diffusion: a fixed point or a draw from a density.
struct InitialCondition {
    double x = 0.0;
    std::shared_ptr<const DensitySampler> sampler;

    static InitialCondition point(double x) { return {x, nullptr}; }
    static InitialCondition density(std::shared_ptr<const DensitySampler> s) {
        return {0.0, std::move(s)};
    }
    bool random() const noexcept { return sampler != nullptr; }
};

struct EstimatorResult {
    double mean = 0.0;
    double std_error = 0.0;  ///< sample standard deviation / sqrt(count)
    std::size_t count = 0;
};

/// Stored Euler-Maruyama trajectories on the recorded fine steps.
struct TrajectorySet {
    double s = 0.0;
    double dt_mc = 0.0;
    std::size_t start_step = 0;
    std::size_t fine_steps = 0;   ///< total fine steps on [0, T]
    std::size_t substeps = 1;     ///< fine steps per tree step
    std::size_t tree_dim = 1;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> record_steps;
    std::vector<double> y;             ///< paths x records
    std::vector<std::size_t> exit_step;  ///< first fine step outside D, fine_steps if none
    std::vector<double> tau;           ///< min(exit time, T)
    std::vector<double> omega;         ///< paths x (tree steps + 1) x d

    double value(std::size_t path, std::size_t record) const noexcept {
        return y[path * record_steps.size() + record];
    }
    /// I_tau: the path has not left D by fine step i.
    bool alive(std::size_t path, std::size_t step) const noexcept {
        return step < exit_step[path];
    }
    double time(std::size_t step) const noexcept { return static_cast<double>(step) * dt_mc; }
    PathState state(std::size_t path, std::size_t step) const noexcept;
};

/// Fine steps to store; empty means every step from the start to T.
struct RecordSpec {
    std::vector<std::size_t> steps;
};

/// phi(x, t, state) with t the fine time and state the driving state at the tree time
/// that opens the current tree step.
using Integrand = std::function<double(double, double, const PathState&)>;

/// Euler-Maruyama for dy = f dt + beta dW from y(s) = init, with the coefficients frozen at
/// the tree node active over each tree step. Exit is checked on mesh points only.
TrajectorySet simulate(const CoefficientSet& coeffs, const InitialCondition& init, double s,
                       const PathBundle& paths, const DomainSpec& domain,
                       const RecordSpec& record = {}, std::size_t workers = 1);

/// Mean over paths of sum_{t_i < tau} phi(y(t_i), t_i) dt_mc. Needs every step recorded.
EstimatorResult estimate_functional(const TrajectorySet& trajs, const Integrand& phi);

/// Same estimator without storing paths; all starts share the path noise.
std::vector<EstimatorResult> functional_streaming(const CoefficientSet& coeffs,
                                                  std::span<const InitialCondition> inits,
                                                  const PathBundle& paths,
                                                  const DomainSpec& domain, const Integrand& phi,
                                                  std::size_t workers = 1);

/// E[ I_tau(t) phi(y(t), t) ] at each listed fine step, from s = 0.
std::vector<EstimatorResult> observe_streaming(const CoefficientSet& coeffs,
                                               const InitialCondition& init,
                                               const PathBundle& paths, const DomainSpec& domain,
                                               const Integrand& phi,
                                               std::span<const std::size_t> steps,
                                               std::size_t workers = 1);

/// Conditional expectation given the tree path to `leaf`: the tree components of W are
/// bridged through that path, the remaining components and the initial draw are free.
/// Reported at the tree levels listed.
std::vector<EstimatorResult> conditional_functional(
    const CoefficientSet& coeffs, const Integrand& phi, std::shared_ptr<const ScenarioTree> tree,
    std::size_t leaf, std::span<const std::size_t> levels, std::size_t paths, double dt_mc,
    std::uint64_t seed, const InitialCondition& init, const DomainSpec& domain,
    std::size_t workers = 1);

/// Histogram of the alive paths at time t over the cells [x_i - dx/2, x_i + dx/2),
/// normalised by M dx; paths beyond the end cells are counted in them.
GridFunction empirical_density(const TrajectorySet& trajs, double t,
                               std::shared_ptr<const Grid> grid);

}  // namespace spdelab
