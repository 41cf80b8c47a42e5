#include "spdelab/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spdelab/errors.hpp"

namespace spdelab {

SpaceTimeField random_smooth_field(std::shared_ptr<const Grid> grid,
                                   std::shared_ptr<const ScenarioTree> tree, std::uint64_t seed,
                                   std::size_t modes, bool random_in_omega) {
    if (modes == 0) throw InvalidArgument("random field needs at least one mode");
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    constexpr std::size_t kTerms = 4;  // 1, t, tanh(w1), tanh(w2)
    std::vector<double> amp(modes);
    std::vector<double> c(modes * kTerms);
    for (std::size_t m = 0; m < modes; ++m) {
        amp[m] = u(engine);
        for (std::size_t q = 0; q < kTerms; ++q) c[m * kTerms + q] = u(engine);
    }
    const double a = grid->domain().a;
    const double len = grid->domain().b - a;
    const std::size_t d = tree->dim();
    return SpaceTimeField::sample(
        std::move(grid), std::move(tree), [&](double x, const PathState& s) {
            const double w1 = random_in_omega ? std::tanh(s.omega[0]) : 0.0;
            const double w2 = random_in_omega && d > 1 ? std::tanh(s.omega[1]) : 0.0;
            double v = 0.0;
            for (std::size_t m = 0; m < modes; ++m) {
                const double* cm = c.data() + m * kTerms;
                const double temporal = cm[0] + cm[1] * s.t + cm[2] * w1 + cm[3] * w2;
                v += amp[m] * std::sin(static_cast<double>(m + 1) * std::numbers::pi * (x - a) / len) *
                     temporal;
            }
            return v;
        });
}

}  // namespace spdelab
