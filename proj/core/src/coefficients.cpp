#include "spdelab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spdelab/errors.hpp"

namespace spdelab {

namespace {

constexpr double kParamBound = 1e3;

void require_bounded(double v, const char* name) {
    if (!std::isfinite(v) || std::abs(v) > kParamBound)
        throw InvalidArgument(std::string("coefficient parameter '") + name +
                              "' must be finite with magnitude <= 1e3");
}

}  // namespace

std::string_view family_name(Family family) noexcept {
    switch (family) {
        case Family::constant: return "constant";
        case Family::drift_random: return "drift-random";
        case Family::space_smooth: return "space-smooth";
    }
    return "constant";
}

Family parse_family(std::string_view name) {
    if (name == "constant") return Family::constant;
    if (name == "drift-random") return Family::drift_random;
    if (name == "space-smooth") return Family::space_smooth;
    throw InvalidArgument("unknown coefficient family '" + std::string(name) + "'");
}

CoefficientSet::CoefficientSet(Family family, FamilyParams params)
    : family_(family), params_(std::move(params)) {
    if (params_.d < 1 || params_.d > kMaxTreeDim)
        throw InvalidArgument("tree dimension d must be 1 or 2");
    if (params_.sigma.empty()) throw InvalidArgument("sigma must list at least one component");
    if (params_.sigma.size() < params_.d) throw InvalidArgument("d0 must be >= d");
    if (family_ == Family::drift_random && params_.sigma.size() <= params_.d)
        throw InvalidArgument("drift-random family requires d < d0");
    for (double s : params_.sigma) require_bounded(s, "sigma");
    require_bounded(params_.f0, "f0");
    require_bounded(params_.kappa, "kappa");
    require_bounded(params_.amplitude, "amplitude");
    require_bounded(params_.epsilon, "epsilon");
}

bool CoefficientSet::nonrandom() const noexcept {
    switch (family_) {
        case Family::constant: return true;
        case Family::drift_random: return params_.kappa == 0.0;
        case Family::space_smooth: return params_.amplitude == 0.0 || params_.epsilon == 0.0;
    }
    return true;
}

double CoefficientSet::drift(double x, const PathState& state) const noexcept {
    switch (family_) {
        case Family::constant: return params_.f0;
        case Family::drift_random: return params_.kappa * std::tanh(state.omega[0]);
        case Family::space_smooth:
            return params_.amplitude * std::sin(std::numbers::pi * x) *
                   (1.0 + params_.epsilon * std::tanh(state.omega[0]));
    }
    return 0.0;
}

double CoefficientSet::beta(std::size_t j, double, const PathState&) const noexcept {
    return params_.sigma[j];
}

void CoefficientSet::sample(std::span<const double> x, const PathState& state,
                            NodeCoefficients& out) const {
    const std::size_t nx = x.size();
    const std::size_t d0 = noise_dim();
    out.nx = nx;
    out.d0 = d0;
    out.f.resize(nx);
    out.b.resize(nx);
    out.beta.resize(nx * d0);
    // Every builtin beta is constant in x; only f may vary along the grid.
    double b = 0.0;
    for (std::size_t j = 0; j < d0; ++j) {
        const double bj = params_.sigma[j];
        std::fill(out.beta.begin() + static_cast<std::ptrdiff_t>(j * nx),
                  out.beta.begin() + static_cast<std::ptrdiff_t>((j + 1) * nx), bj);
        b += bj * bj;
    }
    std::fill(out.b.begin(), out.b.end(), b);
    switch (family_) {
        case Family::constant:
            std::fill(out.f.begin(), out.f.end(), params_.f0);
            break;
        case Family::drift_random:
            std::fill(out.f.begin(), out.f.end(), drift(0.0, state));
            break;
        case Family::space_smooth: {
            const double scale =
                params_.amplitude * (1.0 + params_.epsilon * std::tanh(state.omega[0]));
            for (std::size_t i = 0; i < nx; ++i) out.f[i] = scale * std::sin(std::numbers::pi * x[i]);
            break;
        }
    }
}

CoefficientSet make_family(Family family, FamilyParams params) {
    return CoefficientSet(family, std::move(params));
}

CoefficientSet make_family(std::string_view name, FamilyParams params) {
    return CoefficientSet(parse_family(name), std::move(params));
}

ValidationReport validate(const CoefficientSet& coeffs, const Grid& grid,
                          const ScenarioTree& tree, bool superparabolic_required) {
    ValidationReport r;
    r.superparabolic_required = superparabolic_required;
    r.delta = std::numeric_limits<double>::infinity();
    r.delta_b = std::numeric_limits<double>::infinity();
    const std::size_t d = coeffs.tree_dim();
    const std::size_t d0 = coeffs.noise_dim();
    const double dx = grid.dx();
    bool finite = true;

    NodeCoefficients nc;
    for (std::size_t k = 0; k <= tree.steps(); ++k) {
        for (std::size_t i = 0; i < tree.level_size(k); ++i) {
            coeffs.sample(grid.nodes(), tree.state(k, i), nc);
            for (std::size_t x = 0; x < grid.size(); ++x) {
                // n = 1: b and the tail block are scalars.
                double tail = 0.0;
                double frob = 0.0;
                for (std::size_t j = 0; j < d0; ++j) {
                    const double bj = nc.beta[j * grid.size() + x];
                    frob += bj * bj;
                    if (j >= d) tail += bj * bj;
                }
                finite = finite && std::isfinite(nc.f[x]) && std::isfinite(frob);
                r.delta_b = std::min(r.delta_b, nc.b[x]);
                r.delta = std::min(r.delta, d0 > d ? tail : 0.0);
                r.k1 = std::max(r.k1, std::abs(nc.f[x]));
                r.k2 = std::max(r.k2, std::sqrt(frob));
                if (x + 1 < grid.size()) {
                    r.lipschitz_f = std::max(r.lipschitz_f, std::abs(nc.f[x + 1] - nc.f[x]) / dx);
                    for (std::size_t j = 0; j < d0; ++j) {
                        const double db = nc.beta[j * grid.size() + x + 1] -
                                          nc.beta[j * grid.size() + x];
                        r.k3 = std::max(r.k3, std::abs(db) / dx);
                    }
                }
            }
        }
    }

    if (!finite) r.failures.emplace_back("non-finite coefficient values");
    if (!(r.delta_b >= kDegeneracyThreshold)) r.failures.emplace_back("beta beta^T degenerate");
    if (superparabolic_required && !(r.delta >= kDegeneracyThreshold))
        r.failures.emplace_back("tilde-beta degenerate");
    return r;
}

}  // namespace spdelab
