#include "spdelab/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "node_ops.hpp"
#include "spdelab/errors.hpp"

namespace spdelab {

namespace {

void require_layout(const SpaceTimeField& f, const Model& model) {
    model.validate();
    if (f.empty()) throw InvalidArgument("field is empty");
    const ScenarioTree& t = f.tree();
    const ScenarioTree& mt = *model.tree;
    if (!f.grid().same_layout(*model.grid) || t.dim() != mt.dim() || t.steps() != mt.steps() ||
        t.horizon() != mt.horizon())
        throw InvalidArgument("field layout does not match the model");
}

void require_superparabolic(const Model& model, const char* what) {
    if (!model.superparabolic())
        throw InvalidArgument(std::string(what) + " requires d < d0 (superparabolic mode)");
}

/// Per-node source terms, evaluated on parent-level data.
struct Sources {
    bool has_drift = false;
    std::vector<double> drift;
    std::vector<bool> has_noise;
    std::vector<std::vector<double>> noise;

    Sources(std::size_t nx, std::size_t d)
        : drift(nx), has_noise(d, false), noise(d, std::vector<double>(nx)) {}
};

/// Forward march over the tree: for every node of level k the generator is frozen at the
/// node, (I - dt A*_k) is factored once, and each child gets
///   (I - dt A*_k) p_child = p_k + dt drift + sum_j noise_j d omega_j(child).
/// `fill` computes the sources for node (k, i) from the current state.
template <class Fill>
void march(SpaceTimeField& state, const Model& model, Fill&& fill, double blowup) {
    const ScenarioTree& tree = *model.tree;
    const std::size_t nx = model.grid->size();
    const std::size_t d = tree.dim();
    const double dt = tree.dt();
    Sources src(nx, d);
    detail::NodeOps ops;
    ShiftedSolver solver;
    for (std::size_t k = 0; k < tree.steps(); ++k) {
        for (std::size_t i = 0; i < tree.level_size(k); ++i) {
            ops.assign(model, k, i);
            solver.factor(ops.stencil, dt, ShiftedSolver::Side::transpose);
            src.has_drift = false;
            std::fill(src.has_noise.begin(), src.has_noise.end(), false);
            fill(k, i, ops, src);
            const auto parent = state.slice(k, i);
            for (std::size_t c = 0; c < tree.branching(); ++c) {
                auto out = state.slice(k + 1, tree.child(i, c));
                std::copy(parent.begin(), parent.end(), out.begin());
                if (src.has_drift) detail::axpy(dt, src.drift, out);
                for (std::size_t j = 0; j < d; ++j)
                    if (src.has_noise[j]) detail::axpy(tree.child_increment(c, j), src.noise[j], out);
                solver.solve(out);
                for (double v : out)
                    if (!(std::abs(v) <= blowup))
                        throw NumericalError("forward solution exceeded the blow-up guard");
            }
        }
    }
}

constexpr double kNoGuard = std::numeric_limits<double>::max();

/// out = D0(beta_j u), scaled by s.
void divergence(const Grid& grid, std::span<const double> beta, std::span<const double> u,
                double s, std::vector<double>& tmp, std::vector<double>& out) {
    for (std::size_t x = 0; x < u.size(); ++x) tmp[x] = beta[x] * u[x];
    centered_gradient(grid, tmp, out);
    if (s != 1.0)
        for (double& v : out) v *= s;
}

}  // namespace

GridFunction step_forward(const CoefficientSet& coeffs, const PathState& state,
                          const GridFunction& p_old, const GridFunction* drift,
                          std::span<const GridFunction> noise_sources,
                          std::span<const double> d_omega, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    if (!noise_sources.empty() && noise_sources.size() != d_omega.size())
        throw InvalidArgument("one noise source per increment expected");
    const double sq = std::sqrt(dt);
    for (double w : d_omega)
        if (std::abs(std::abs(w) - sq) > 1e-10 * sq)
            throw InvalidArgument("tree increments must have magnitude sqrt(dt)");
    const Grid& grid = p_old.grid();
    NodeCoefficients nc;
    coeffs.sample(grid.nodes(), state, nc);
    const GeneratorStencil stencil(grid, nc);
    ShiftedSolver solver;
    solver.factor(stencil, dt, ShiftedSolver::Side::transpose);
    GridFunction out = p_old;
    if (drift) {
        if (!drift->grid().same_layout(grid)) throw InvalidArgument("drift source grid mismatch");
        detail::axpy(dt, drift->values(), out.values());
    }
    for (std::size_t j = 0; j < noise_sources.size(); ++j) {
        if (!noise_sources[j].grid().same_layout(grid))
            throw InvalidArgument("noise source grid mismatch");
        detail::axpy(d_omega[j], noise_sources[j].values(), out.values());
    }
    solver.solve(out.values());
    return out;
}

SpaceTimeField solve_T_star(const SpaceTimeField& h, const Model& model) {
    require_layout(h, model);
    SpaceTimeField pi(model.grid, model.tree);
    march(pi, model,
          [&](std::size_t k, std::size_t i, const detail::NodeOps&, Sources& s) {
              const auto hk = h.slice(k, i);
              std::copy(hk.begin(), hk.end(), s.drift.begin());
              s.has_drift = true;
          },
          kNoGuard);
    return pi;
}

SpaceTimeField solve_G_star(std::size_t j, const SpaceTimeField& h, const Model& model) {
    require_layout(h, model);
    if (j >= model.tree->dim()) throw InvalidArgument("component index exceeds the tree dimension");
    SpaceTimeField q(model.grid, model.tree);
    march(q, model,
          [&](std::size_t k, std::size_t i, const detail::NodeOps&, Sources& s) {
              const auto hk = h.slice(k, i);
              std::copy(hk.begin(), hk.end(), s.noise[j].begin());
              s.has_noise[j] = true;
          },
          kNoGuard);
    return q;
}

SpaceTimeField solve_B_star(const SpaceTimeField& h, const Model& model) {
    require_layout(h, model);
    const Grid& grid = *model.grid;
    std::vector<double> tmp(grid.size());
    SpaceTimeField z(model.grid, model.tree);
    march(z, model,
          [&](std::size_t k, std::size_t i, const detail::NodeOps& ops, Sources& s) {
              for (std::size_t j = 0; j < s.noise.size(); ++j) {
                  divergence(grid, ops.coeffs.beta_column(j), h.slice(k, i), 1.0, tmp, s.noise[j]);
                  s.has_noise[j] = true;
              }
          },
          kNoGuard);
    return z;
}

SpaceTimeField solve_R_star(const SpaceTimeField& pi, const Model& model) {
    require_layout(pi, model);
    require_superparabolic(model, "R*");
    const Grid& grid = *model.grid;
    std::vector<double> tmp(grid.size()), diff(grid.size());
    SpaceTimeField z(model.grid, model.tree);
    march(z, model,
          [&](std::size_t k, std::size_t i, const detail::NodeOps& ops, Sources& s) {
              const auto pk = pi.slice(k, i);
              const auto zk = z.slice(k, i);
              for (std::size_t x = 0; x < diff.size(); ++x) diff[x] = pk[x] - zk[x];
              for (std::size_t j = 0; j < s.noise.size(); ++j) {
                  divergence(grid, ops.coeffs.beta_column(j), diff, 1.0, tmp, s.noise[j]);
                  s.has_noise[j] = true;
              }
          },
          kNoGuard);
    SpaceTimeField h = pi;
    h -= z;
    return h;
}

SpaceTimeField solve_L_star(const SpaceTimeField& xi, const Model& model) {
    require_layout(xi, model);
    require_superparabolic(model, "L*");
    const Grid& grid = *model.grid;
    std::vector<double> tmp(grid.size());
    SpaceTimeField h(model.grid, model.tree);
    march(h, model,
          [&](std::size_t k, std::size_t i, const detail::NodeOps& ops, Sources& s) {
              const auto xk = xi.slice(k, i);
              std::copy(xk.begin(), xk.end(), s.drift.begin());
              s.has_drift = true;
              for (std::size_t j = 0; j < s.noise.size(); ++j) {
                  divergence(grid, ops.coeffs.beta_column(j), h.slice(k, i), -1.0, tmp, s.noise[j]);
                  s.has_noise[j] = true;
              }
          },
          kNoGuard);
    return h;
}

DensitySolution solve_density(const GridFunction& p0, const Model& model,
                              const DensityOptions& options) {
    model.validate();
    const Grid& grid = *model.grid;
    if (!p0.grid().same_layout(grid)) throw InvalidArgument("initial density grid mismatch");
    if (options.validate) {
        double mass = 0.0;
        for (double v : p0.values()) {
            if (v < 0.0) throw InvalidArgument("initial density must be nonnegative");
            mass += v;
        }
        mass *= grid.dx();
        if (std::abs(mass - 1.0) > 1e-6) throw InvalidArgument("initial density must have unit mass");
        const ValidationReport report = validate(*model.coeffs, grid, *model.tree, true);
        if (!report.passed())
            throw InvalidArgument("density solve needs superparabolic coefficients: " +
                                  report.failures.front());
    }

    const ScenarioTree& tree = *model.tree;
    DensitySolution out{SpaceTimeField(model.grid, model.tree), {}, {}, {}, false};
    {
        auto root = out.p.slice(0, 0);
        std::copy(p0.values().begin(), p0.values().end(), root.begin());
        root.front() = 0.0;
        root.back() = 0.0;
    }
    std::vector<double> tmp(grid.size());
    march(out.p, model,
          [&](std::size_t k, std::size_t i, const detail::NodeOps& ops, Sources& s) {
              for (std::size_t j = 0; j < s.noise.size(); ++j) {
                  divergence(grid, ops.coeffs.beta_column(j), out.p.slice(k, i), -1.0, tmp,
                             s.noise[j]);
                  s.has_noise[j] = true;
              }
          },
          options.blowup);

    out.mass.resize(tree.node_count());
    out.min_value.assign(tree.steps() + 1, std::numeric_limits<double>::infinity());
    out.max_value.assign(tree.steps() + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k <= tree.steps(); ++k) {
        for (std::size_t i = 0; i < tree.level_size(k); ++i) {
            const auto row = out.p.slice(k, i);
            double m = 0.0;
            for (double v : row) {
                m += v;
                out.min_value[k] = std::min(out.min_value[k], v);
                out.max_value[k] = std::max(out.max_value[k], v);
            }
            out.mass[tree.global_index(k, i)] = m * grid.dx();
        }
        if (out.min_value[k] < -options.negativity_flag * out.max_value[k])
            out.negativity_flagged = true;
    }
    return out;
}

}  // namespace spdelab
