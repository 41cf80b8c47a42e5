#include "spdelab/generator.hpp"

#include <cmath>

#include "spdelab/errors.hpp"

namespace spdelab {

void GeneratorStencil::assign(const Grid& grid, const NodeCoefficients& coeffs) {
    const std::size_t n = grid.size();
    if (coeffs.nx != n) throw InvalidArgument("coefficient sample does not match the grid");
    const double h = grid.dx();
    const double c1 = 0.5 / h;
    const double c2 = 1.0 / (h * h);
    lower_.resize(n);
    diag_.resize(n);
    upper_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double adv = coeffs.f[i] * c1;
        const double dif = 0.5 * coeffs.b[i] * c2;
        lower_[i] = dif - adv;
        diag_[i] = -2.0 * dif;
        upper_[i] = dif + adv;
    }
}

void GeneratorStencil::apply(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = size();
    if (u.size() != n || out.size() != n) throw InvalidArgument("generator size mismatch");
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = lower_[i] * u[i - 1] + diag_[i] * u[i] + upper_[i] * u[i + 1];
}

void GeneratorStencil::apply_transpose(std::span<const double> w, std::span<double> out) const {
    const std::size_t n = size();
    if (w.size() != n || out.size() != n) throw InvalidArgument("generator size mismatch");
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = upper_[i - 1] * w[i - 1] + diag_[i] * w[i] + lower_[i + 1] * w[i + 1];
}

void ShiftedSolver::factor(const GeneratorStencil& stencil, double c, Side side) {
    const std::size_t n = stencil.size();
    if (n < 3) throw InvalidArgument("shifted solve needs interior nodes");
    const std::size_t m = n - 2;
    sub_.resize(m);
    inv_pivot_.resize(m);
    super_mod_.resize(m);
    double prev = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + 1;
        double a;
        double s;
        if (side == Side::direct) {
            a = -c * stencil.lower(i);
            s = -c * stencil.upper(i);
        } else {
            a = -c * stencil.upper(i - 1);
            s = -c * stencil.lower(i + 1);
        }
        if (r == 0) a = 0.0;
        if (r + 1 == m) s = 0.0;
        const double pivot = 1.0 - c * stencil.diag(i) - a * prev;
        if (!std::isfinite(pivot) || std::abs(pivot) < 1e-300)
            throw NumericalError("singular tridiagonal system");
        sub_[r] = a;
        inv_pivot_[r] = 1.0 / pivot;
        prev = s * inv_pivot_[r];
        super_mod_[r] = prev;
    }
}

void ShiftedSolver::solve(std::span<double> rhs) const {
    const std::size_t m = inv_pivot_.size();
    if (rhs.size() != m + 2) throw InvalidArgument("shifted solve size mismatch");
    double* x = rhs.data() + 1;
    x[0] *= inv_pivot_[0];
    for (std::size_t r = 1; r < m; ++r) x[r] = (x[r] - sub_[r] * x[r - 1]) * inv_pivot_[r];
    for (std::size_t r = m - 1; r-- > 0;) x[r] -= super_mod_[r] * x[r + 1];
    rhs[0] = 0.0;
    rhs[m + 1] = 0.0;
}

namespace {

GridFunction apply_impl(const CoefficientSet& coeffs, const GridFunction& u,
                        const PathState& state, bool transpose) {
    NodeCoefficients nc;
    coeffs.sample(u.grid().nodes(), state, nc);
    const GeneratorStencil stencil(u.grid(), nc);
    GridFunction out(u.grid_ptr());
    if (transpose)
        stencil.apply_transpose(u.values(), out.values());
    else
        stencil.apply(u.values(), out.values());
    return out;
}

}  // namespace

GridFunction apply_A(const CoefficientSet& coeffs, const GridFunction& u, const PathState& state) {
    return apply_impl(coeffs, u, state, false);
}

GridFunction apply_A_star(const CoefficientSet& coeffs, const GridFunction& u,
                          const PathState& state) {
    return apply_impl(coeffs, u, state, true);
}

}  // namespace spdelab
