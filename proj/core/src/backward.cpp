#include "spdelab/backward.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

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

/// out = (I + (1 - theta) dt A) x
void explicit_part(const detail::NodeOps& ops, double c, std::span<const double> x,
                   std::span<double> out, std::span<double> scratch) {
    if (c == 0.0) {
        std::copy(x.begin(), x.end(), out.begin());
        return;
    }
    ops.stencil.apply(x, scratch);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + c * scratch[i];
}

/// Backward induction down the tree. For each node of level k (from N-1 to 0) it forms
/// the conditional mean and the covariance kernels of v_{k+1} over the children, then
///   v_k = M^{-1} (E mean + dt g_k),  X_j = M^{-1} E cov_j,
/// with M = I - theta dt A_k and E = I + (1 - theta) dt A_k, and hands them to visit.
template <class Visit>
void induct(const SpaceTimeField& g, const Model& model, Visit&& visit) {
    const ScenarioTree& tree = *model.tree;
    const std::size_t nx = model.grid->size();
    const std::size_t kb = tree.branching();
    const std::size_t d = tree.dim();
    const double dt = tree.dt();
    const double inv_k = 1.0 / static_cast<double>(kb);
    const double cov_scale = inv_k / tree.sqrt_dt();
    const double c_impl = model.theta * dt;
    const double c_expl = (1.0 - model.theta) * dt;

    std::vector<double> next(tree.level_size(tree.steps()) * nx, 0.0);
    std::vector<double> cur;
    std::vector<double> mean(nx), scratch(nx), v(nx);
    std::vector<std::vector<double>> cov(d, std::vector<double>(nx)), chi(d, std::vector<double>(nx));
    std::vector<std::span<const double>> chi_view(d);
    detail::NodeOps ops;
    ShiftedSolver solver;

    for (std::size_t k = tree.steps(); k-- > 0;) {
        cur.resize(tree.level_size(k) * nx);
        for (std::size_t i = 0; i < tree.level_size(k); ++i) {
            std::fill(mean.begin(), mean.end(), 0.0);
            for (auto& c : cov) std::fill(c.begin(), c.end(), 0.0);
            for (std::size_t c = 0; c < kb; ++c) {
                const double* child = next.data() + tree.child(i, c) * nx;
                for (std::size_t x = 0; x < nx; ++x) mean[x] += child[x];
                for (std::size_t j = 0; j < d; ++j) {
                    const double s = tree.child_sign(c, j);
                    for (std::size_t x = 0; x < nx; ++x) cov[j][x] += s * child[x];
                }
            }
            for (double& m : mean) m *= inv_k;
            for (auto& c : cov)
                for (double& m : c) m *= cov_scale;

            ops.assign(model, k, i);
            solver.factor(ops.stencil, c_impl, ShiftedSolver::Side::direct);

            explicit_part(ops, c_expl, mean, v, scratch);
            detail::axpy(dt, g.slice(k, i), v);
            solver.solve(v);
            for (std::size_t j = 0; j < d; ++j) {
                explicit_part(ops, c_expl, cov[j], chi[j], scratch);
                solver.solve(chi[j]);
                chi_view[j] = chi[j];
            }
            std::copy(v.begin(), v.end(), cur.begin() + static_cast<std::ptrdiff_t>(i * nx));
            visit(k, i, std::span<const double>(v), std::span<const std::span<const double>>(chi_view), ops);
        }
        next.swap(cur);
    }
}

BackwardSolution pathwise_route(const SpaceTimeField& g, const Model& model) {
    const ScenarioTree& tree = *model.tree;
    const std::size_t d = tree.dim();
    BackwardSolution out{SpaceTimeField(model.grid, model.tree, Regularity::h1), {}};
    for (std::size_t j = 0; j < d; ++j) out.chi.emplace_back(model.grid, model.tree);
    const double kernel_scale = 1.0 / tree.sqrt_dt();
    for (std::size_t leaf = 0; leaf < tree.leaf_count(); ++leaf) {
        const PathwiseSolution u = solve_backward_pathwise(g, model, leaf);
        for (std::size_t k = 0; k < tree.steps(); ++k) {
            const std::size_t node = tree.ancestor(leaf, k);
            const std::size_t c = tree.ancestor(leaf, k + 1) % tree.branching();
            const double w = 1.0 / static_cast<double>(tree.leaves_below(k));
            const auto uk = u.at(k);
            detail::axpy(w, uk, out.v.slice(k, node));
            for (std::size_t j = 0; j < d; ++j)
                detail::axpy(w * tree.child_sign(c, j) * kernel_scale, uk, out.chi[j].slice(k, node));
        }
    }
    return out;
}

}  // namespace

PathwiseSolution solve_backward_pathwise(const SpaceTimeField& g, const Model& model,
                                         std::size_t leaf) {
    require_layout(g, model);
    const ScenarioTree& tree = *model.tree;
    const std::size_t nx = model.grid->size();
    const auto path = tree.leaf_path(leaf);
    const double dt = tree.dt();

    PathwiseSolution out;
    out.leaf = leaf;
    out.nx = nx;
    out.values.assign((tree.steps() + 1) * nx, 0.0);
    detail::NodeOps ops;
    ShiftedSolver solver;
    std::vector<double> scratch(nx);
    for (std::size_t k = tree.steps(); k-- > 0;) {
        ops.assign(model, k, path[k]);
        solver.factor(ops.stencil, model.theta * dt, ShiftedSolver::Side::direct);
        std::span<const double> prev(out.values.data() + (k + 1) * nx, nx);
        std::span<double> uk(out.values.data() + k * nx, nx);
        explicit_part(ops, (1.0 - model.theta) * dt, prev, uk, scratch);
        detail::axpy(dt, g.slice(k, path[k]), uk);
        solver.solve(uk);
    }
    return out;
}

BackwardSolution solve_backward(const SpaceTimeField& g, const Model& model,
                                BackwardRoute route) {
    require_layout(g, model);
    if (route == BackwardRoute::pathwise_average) return pathwise_route(g, model);

    const std::size_t d = model.tree->dim();
    BackwardSolution out{SpaceTimeField(model.grid, model.tree, Regularity::h1), {}};
    for (std::size_t j = 0; j < d; ++j) out.chi.emplace_back(model.grid, model.tree);
    induct(g, model,
           [&](std::size_t k, std::size_t i, std::span<const double> v,
               std::span<const std::span<const double>> chi, const detail::NodeOps&) {
               std::copy(v.begin(), v.end(), out.v.slice(k, i).begin());
               for (std::size_t j = 0; j < d; ++j)
                   std::copy(chi[j].begin(), chi[j].end(), out.chi[j].slice(k, i).begin());
           });
    return out;
}

SpaceTimeField op_T(const SpaceTimeField& g, const Model& model, BackwardRoute route) {
    return std::move(solve_backward(g, model, route).v);
}

std::vector<SpaceTimeField> op_G(const SpaceTimeField& g, const Model& model,
                                 BackwardRoute route) {
    return std::move(solve_backward(g, model, route).chi);
}

namespace {

// out <- B g, reusing the storage of out when its layout already fits.
void apply_B(const SpaceTimeField& g, const Model& model, SpaceTimeField& out) {
    const std::size_t nx = model.grid->size();
    const std::size_t d = model.tree->dim();
    if (out.empty() || !out.compatible(g))
        out = SpaceTimeField(model.grid, model.tree, Regularity::h_minus1);
    else
        out.fill(0.0);
    std::vector<double> grad(nx);
    induct(g, model,
           [&](std::size_t k, std::size_t i, std::span<const double>,
               std::span<const std::span<const double>> chi, const detail::NodeOps& ops) {
               auto row = out.slice(k, i);
               for (std::size_t j = 0; j < d; ++j) {
                   centered_gradient(*model.grid, chi[j], grad);
                   const auto beta = ops.coeffs.beta_column(j);
                   for (std::size_t x = 0; x < nx; ++x) row[x] -= beta[x] * grad[x];
               }
           });
}

}  // namespace

SpaceTimeField op_B(const SpaceTimeField& g, const Model& model) {
    require_layout(g, model);
    SpaceTimeField out;
    apply_B(g, model, out);
    return out;
}

RSolveResult solve_R(const SpaceTimeField& phi, const Model& model, const RSolveOptions& options) {
    require_layout(phi, model);
    if (!(options.alpha > 0.0 && options.alpha <= 1.0))
        throw InvalidArgument("damping alpha must lie in (0, 1]");
    if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be positive");

    RSolveResult r;
    if (options.initial_field) {
        require_layout(*options.initial_field, model);
        r.g = *options.initial_field;
    } else if (options.initial == InitialIterate::phi) {
        r.g = phi;
    } else {
        r.g = SpaceTimeField(model.grid, model.tree);
    }
    const double phi_norm = norm_X0(phi);
    if (phi_norm == 0.0) {
        r.g.fill(0.0);
        return r;
    }

    const double a = options.alpha;
    SpaceTimeField res;
    for (;;) {
        apply_B(r.g, model, res);
        ++r.iterations;
        // res <- g + B g - phi
        res += r.g;
        res -= phi;
        r.relative_residual = norm_X0(res) / phi_norm;
        r.history.push_back(r.relative_residual);
        if (!std::isfinite(r.relative_residual))
            throw NumericalError("R iteration produced non-finite values");
        if (r.relative_residual <= options.tol) return r;
        if (r.iterations >= options.max_iter)
            throw ConvergenceError("R iteration did not reach tolerance", r.iterations,
                                   r.relative_residual);
        // g <- g - a (g + B g - phi)
        r.g.axpy(-a, res);
    }
}

LSolution op_L(const SpaceTimeField& phi, const Model& model, const RSolveOptions& options) {
    RSolveResult r = solve_R(phi, model, options);
    BackwardSolution s = solve_backward(r.g, model);
    return {std::move(s), std::move(r)};
}

double residual_bspde(const BackwardSolution& solution, const SpaceTimeField& g,
                      const Model& model) {
    require_layout(g, model);
    g.require_compatible(solution.v);
    const ScenarioTree& tree = *model.tree;
    const std::size_t d = tree.dim();
    if (solution.chi.size() != d) throw InvalidArgument("expected one kernel per tree component");
    const std::size_t nx = model.grid->size();
    const std::size_t kb = tree.branching();
    const double dt = tree.dt();

    // a_self(k, i) = A_k v_k and a_next(k + 1, child) = A_k v_{k+1}(child).
    SpaceTimeField a_self(model.grid, model.tree);
    SpaceTimeField a_next(model.grid, model.tree);
    detail::NodeOps ops;
    for (std::size_t k = 0; k < tree.steps(); ++k) {
        for (std::size_t i = 0; i < tree.level_size(k); ++i) {
            ops.assign(model, k, i);
            ops.stencil.apply(solution.v.slice(k, i), a_self.slice(k, i));
            for (std::size_t c = 0; c < kb; ++c) {
                const std::size_t ch = tree.child(i, c);
                ops.stencil.apply(solution.v.slice(k + 1, ch), a_next.slice(k + 1, ch));
            }
        }
    }

    std::vector<double> tail(nx);
    double total = 0.0;
    for (std::size_t leaf = 0; leaf < tree.leaf_count(); ++leaf) {
        std::fill(tail.begin(), tail.end(), 0.0);
        double leaf_sum = 0.0;
        for (std::size_t k = tree.steps(); k-- > 0;) {
            const std::size_t node = tree.ancestor(leaf, k);
            const std::size_t ch = tree.ancestor(leaf, k + 1);
            const std::size_t c = ch % kb;
            const auto as = a_self.slice(k, node);
            const auto an = a_next.slice(k + 1, ch);
            const auto gk = g.slice(k, node);
            for (std::size_t x = 0; x < nx; ++x)
                tail[x] += dt * (0.5 * (as[x] + an[x]) + gk[x]);
            for (std::size_t j = 0; j < d; ++j)
                detail::axpy(-tree.child_increment(c, j), solution.chi[j].slice(k, node), tail);
            const auto vk = solution.v.slice(k, node);
            // Boundary nodes carry no equation.
            double s = 0.0;
            for (std::size_t x = 1; x + 1 < nx; ++x) {
                const double r = vk[x] - tail[x];
                s += r * r;
            }
            leaf_sum += s;
        }
        total += leaf_sum;
    }
    const double p_leaf = tree.probability(tree.steps());
    return std::sqrt(total * p_leaf * dt * model.grid->dx());
}

}  // namespace spdelab
