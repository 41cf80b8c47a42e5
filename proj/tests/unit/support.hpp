#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/model.hpp"

namespace testing_support {

/// Seeded source of random test inputs.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    std::vector<double> vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(n);
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }
    /// Random vector that vanishes at both ends.
    std::vector<double> interior_vec(std::size_t n) {
        auto v = vec(n);
        v.front() = 0.0;
        v.back() = 0.0;
        return v;
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

using Matrix = std::vector<std::vector<double>>;

inline Matrix zeros(std::size_t n) { return Matrix(n, std::vector<double>(n, 0.0)); }

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t = zeros(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) t[j][i] = a[i][j];
    return t;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Interior block of A = f d/dx + (1/2) b d^2/dx^2 by centred differences, with the
/// boundary rows and columns of an nx-node grid left as zero.
inline Matrix generator_matrix(const std::vector<double>& f, const std::vector<double>& b, double dx) {
    const std::size_t n = f.size();
    Matrix a = zeros(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double diff = 0.5 * b[i] / (dx * dx);
        const double conv = f[i] / (2.0 * dx);
        if (i > 1) a[i][i - 1] = diff - conv;
        a[i][i] = -2.0 * diff;
        if (i + 2 < n) a[i][i + 1] = diff + conv;
    }
    return a;
}

/// (I - c M) restricted to interior nodes; boundary rows are the identity.
inline Matrix shifted(const Matrix& m, double c) {
    Matrix s = zeros(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) s[i][j] = -c * m[i][j];
    for (std::size_t i = 0; i < m.size(); ++i) s[i][i] += 1.0;
    return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline spdelab::FamilyParams drift_random_params(double kappa = 0.25) {
    spdelab::FamilyParams p;
    p.d = 1;
    p.sigma = {0.6, 0.8};
    p.kappa = kappa;
    return p;
}

inline spdelab::FamilyParams constant_params(std::vector<double> sigma = {1.0}, double f0 = 0.0) {
    spdelab::FamilyParams p;
    p.d = 1;
    p.sigma = std::move(sigma);
    p.f0 = f0;
    return p;
}

inline spdelab::Model model(spdelab::Family family, spdelab::FamilyParams params, std::size_t nx,
                            std::size_t steps, double T = 0.5, double a = 0.0, double b = 1.0,
                            double theta = 1.0) {
    auto dom = spdelab::DomainSpec::interval(a, b, T);
    spdelab::Model m{spdelab::build_grid(dom, nx), spdelab::build_tree(params.d, steps, T),
                     std::make_shared<spdelab::CoefficientSet>(family, params), theta};
    return m;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testing_support
