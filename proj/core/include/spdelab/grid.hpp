#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace spdelab {

enum class DomainMode {
    interval,        ///< bounded D = (a, b), absorbing Dirichlet boundary
    truncated_line,  ///< D = R realised as [a, b] with an artificial Dirichlet cut
};

/// Spatial domain plus time horizon of the cylinder Q = D x (0, T).
struct DomainSpec {
    DomainMode mode = DomainMode::interval;
    double a = 0.0;
    double b = 1.0;
    double horizon = 1.0;

    static DomainSpec interval(double a, double b, double horizon);
    static DomainSpec truncated_line(double a, double b, double horizon);

    /// True when leaving [a, b] kills a trajectory (bounded D).
    bool absorbing() const noexcept { return mode == DomainMode::interval; }

    void validate() const;
};

/// Uniform node-centred grid on [a, b]; nodes 0 and nx-1 are boundary nodes.
class Grid {
public:
    Grid(DomainSpec domain, std::size_t nx);

    const DomainSpec& domain() const noexcept { return domain_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t interior_size() const noexcept { return nodes_.size() - 2; }
    double dx() const noexcept { return dx_; }
    double x(std::size_t i) const noexcept { return nodes_[i]; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    /// Same node layout (domain bounds and node count).
    bool same_layout(const Grid& other) const noexcept;

private:
    DomainSpec domain_;
    double dx_;
    std::vector<double> nodes_;
};

inline constexpr std::size_t kMinGridNodes = 8;

std::shared_ptr<const Grid> build_grid(const DomainSpec& domain, std::size_t nx);

/// Discrete element of L2(D) on a grid.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const Grid> grid);
    GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values);

    static GridFunction sample(std::shared_ptr<const Grid> grid,
                               const std::function<double(double)>& fn);

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Zero the two boundary nodes.
    void apply_dirichlet() noexcept;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
};

/// Weighted l2 inner product sum_i dx * u_i * w_i.
double inner_H0(const Grid& grid, std::span<const double> u, std::span<const double> w);
double norm_H0(const Grid& grid, std::span<const double> u);

/// Centred first difference (u_{i+1} - u_{i-1}) / (2 dx) on interior nodes, zero on the
/// boundary. Its interior matrix is antisymmetric, so -D0 is the exact transpose of D0.
void centered_gradient(const Grid& grid, std::span<const double> u, std::span<double> out);

}  // namespace spdelab
