#include "spdelab/lambda_transform.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "spdelab/errors.hpp"

namespace spdelab {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

LambdaTransform::LambdaTransform(std::shared_ptr<const Grid> grid) : grid_(std::move(grid)) {
    if (!grid_) throw InvalidArgument("lambda transform needs a grid");
    const std::size_t m = grid_->interior_size();
    const double h2 = grid_->dx() * grid_->dx();
    eigenvalues_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double theta = std::numbers::pi * static_cast<double>(k + 1) /
                             static_cast<double>(m + 1);
        eigenvalues_[k] = (2.0 - 2.0 * std::cos(theta)) / h2;
    }
    std::vector<double> in(m), out(m);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_r2r_1d(static_cast<int>(m), in.data(), out.data(), FFTW_RODFT00,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw NumericalError("failed to plan the sine transform");
}

LambdaTransform::~LambdaTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void LambdaTransform::apply(std::span<const double> u, int k, std::span<double> out) const {
    const std::size_t n = grid_->size();
    if (u.size() != n || out.size() != n) throw InvalidArgument("lambda transform size mismatch");
    if (k < -1 || k > 1) throw InvalidArgument("lambda power must be -1, 0 or 1");
    const std::size_t m = n - 2;
    out[0] = 0.0;
    out[n - 1] = 0.0;
    if (k == 0) {
        for (std::size_t i = 1; i + 1 < n; ++i) out[i] = u[i];
        return;
    }
    std::vector<double> in(u.begin() + 1, u.end() - 1);
    std::vector<double> coef(m);
    auto plan = static_cast<fftw_plan>(plan_);
    fftw_execute_r2r(plan, in.data(), coef.data());
    // DST-I applied twice is 2(m+1) times the identity.
    const double scale = 1.0 / (2.0 * static_cast<double>(m + 1));
    for (std::size_t j = 0; j < m; ++j) {
        const double mu = std::sqrt(1.0 + eigenvalues_[j]);
        coef[j] *= scale * (k > 0 ? mu : 1.0 / mu);
    }
    fftw_execute_r2r(plan, coef.data(), out.data() + 1);
}

double LambdaTransform::norm(std::span<const double> u, int k) const {
    std::vector<double> out(u.size());
    apply(u, k, out);
    return norm_H0(*grid_, out);
}

GridFunction lambda_pow(const LambdaTransform& lambda, const GridFunction& u, int k) {
    if (!u.grid().same_layout(lambda.grid())) throw InvalidArgument("lambda grid mismatch");
    GridFunction out(u.grid_ptr());
    lambda.apply(u.values(), k, out.values());
    return out;
}

}  // namespace spdelab
