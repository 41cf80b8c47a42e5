#include "spdelab/grid.hpp"

#include <cmath>
#include <string>

#include "spdelab/errors.hpp"

namespace spdelab {

DomainSpec DomainSpec::interval(double a, double b, double horizon) {
    DomainSpec d{DomainMode::interval, a, b, horizon};
    d.validate();
    return d;
}

DomainSpec DomainSpec::truncated_line(double a, double b, double horizon) {
    DomainSpec d{DomainMode::truncated_line, a, b, horizon};
    d.validate();
    return d;
}

void DomainSpec::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw InvalidArgument("domain requires finite a < b");
    if (!std::isfinite(horizon) || !(horizon > 0.0))
        throw InvalidArgument("domain horizon must be positive");
}

Grid::Grid(DomainSpec domain, std::size_t nx) : domain_(domain) {
    domain_.validate();
    if (nx < kMinGridNodes)
        throw InvalidArgument("grid needs at least " + std::to_string(kMinGridNodes) + " nodes");
    dx_ = (domain_.b - domain_.a) / static_cast<double>(nx - 1);
    nodes_.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) nodes_[i] = domain_.a + static_cast<double>(i) * dx_;
    nodes_.back() = domain_.b;
}

bool Grid::same_layout(const Grid& other) const noexcept {
    return size() == other.size() && domain_.a == other.domain_.a && domain_.b == other.domain_.b;
}

std::shared_ptr<const Grid> build_grid(const DomainSpec& domain, std::size_t nx) {
    return std::make_shared<const Grid>(domain, nx);
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid) : grid_(std::move(grid)) {
    if (!grid_) throw InvalidArgument("grid function needs a grid");
    values_.assign(grid_->size(), 0.0);
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgument("grid function needs a grid");
    if (values_.size() != grid_->size()) throw InvalidArgument("grid function size mismatch");
}

GridFunction GridFunction::sample(std::shared_ptr<const Grid> grid,
                                  const std::function<double(double)>& fn) {
    GridFunction u(std::move(grid));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = fn(u.grid().x(i));
    return u;
}

void GridFunction::apply_dirichlet() noexcept {
    if (values_.empty()) return;
    values_.front() = 0.0;
    values_.back() = 0.0;
}

double inner_H0(const Grid& grid, std::span<const double> u, std::span<const double> w) {
    if (u.size() != grid.size() || w.size() != grid.size())
        throw InvalidArgument("inner product size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * w[i];
    return s * grid.dx();
}

double norm_H0(const Grid& grid, std::span<const double> u) {
    return std::sqrt(inner_H0(grid, u, u));
}

void centered_gradient(const Grid& grid, std::span<const double> u, std::span<double> out) {
    const std::size_t n = grid.size();
    if (u.size() != n || out.size() != n) throw InvalidArgument("gradient size mismatch");
    const double c = 0.5 / grid.dx();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = c * (u[i + 1] - u[i - 1]);
}

}  // namespace spdelab
