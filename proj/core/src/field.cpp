#include "spdelab/field.hpp"

#include <algorithm>
#include <cmath>

#include "spdelab/errors.hpp"

namespace spdelab {

SpaceTimeField::SpaceTimeField(std::shared_ptr<const Grid> grid,
                               std::shared_ptr<const ScenarioTree> tree, Regularity regularity)
    : grid_(std::move(grid)), tree_(std::move(tree)), regularity_(regularity) {
    if (!grid_ || !tree_) throw InvalidArgument("space-time field needs a grid and a tree");
    nx_ = grid_->size();
    data_.assign(tree_->node_count() * nx_, 0.0);
}

SpaceTimeField SpaceTimeField::sample(std::shared_ptr<const Grid> grid,
                                      std::shared_ptr<const ScenarioTree> tree,
                                      const std::function<double(double, const PathState&)>& fn) {
    SpaceTimeField out(std::move(grid), std::move(tree));
    const ScenarioTree& t = *out.tree_;
    for (std::size_t k = 0; k <= t.steps(); ++k) {
        for (std::size_t i = 0; i < t.level_size(k); ++i) {
            const PathState s = t.state(k, i);
            auto row = out.slice(k, i);
            for (std::size_t x = 0; x < out.nx_; ++x) row[x] = fn(out.grid_->x(x), s);
        }
    }
    return out;
}

bool SpaceTimeField::compatible(const SpaceTimeField& other) const noexcept {
    if (!grid_ || !other.grid_ || !tree_ || !other.tree_) return false;
    return grid_->same_layout(*other.grid_) && tree_->dim() == other.tree_->dim() &&
           tree_->steps() == other.tree_->steps() &&
           tree_->horizon() == other.tree_->horizon();
}

void SpaceTimeField::require_compatible(const SpaceTimeField& other) const {
    if (!compatible(other)) throw InvalidArgument("space-time fields live on different layouts");
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& other) {
    return axpy(1.0, other);
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& other) {
    return axpy(-1.0, other);
}

SpaceTimeField& SpaceTimeField::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

SpaceTimeField& SpaceTimeField::axpy(double s, const SpaceTimeField& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
    return *this;
}

void SpaceTimeField::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

double SpaceTimeField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
SpaceTimeField operator*(double s, SpaceTimeField a) { return a *= s; }

double inner_X0(const SpaceTimeField& f, const SpaceTimeField& g) {
    f.require_compatible(g);
    const ScenarioTree& tree = f.tree();
    const std::size_t nx = f.grid().size();
    const auto fd = f.data();
    const auto gd = g.data();
    double total = 0.0;
    for (std::size_t k = 0; k < tree.steps(); ++k) {
        const std::size_t begin = tree.level_offset(k) * nx;
        const std::size_t end = tree.level_offset(k + 1) * nx;
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += fd[i] * gd[i];
        total += s * tree.probability(k);
    }
    return total * tree.dt() * f.grid().dx();
}

double norm_X0(const SpaceTimeField& f) { return std::sqrt(inner_X0(f, f)); }

double norm_X(const SpaceTimeField& f, int k, const LambdaTransform& lambda) {
    if (!f.grid().same_layout(lambda.grid())) throw InvalidArgument("lambda grid mismatch");
    const ScenarioTree& tree = f.tree();
    std::vector<double> buf(f.grid().size());
    double total = 0.0;
    for (std::size_t lvl = 0; lvl < tree.steps(); ++lvl) {
        double s = 0.0;
        for (std::size_t i = 0; i < tree.level_size(lvl); ++i) {
            lambda.apply(f.slice(lvl, i), k, buf);
            for (double v : buf) s += v * v;
        }
        total += s * tree.probability(lvl);
    }
    return std::sqrt(total * tree.dt() * f.grid().dx());
}

double norm_C0(const SpaceTimeField& f) {
    const ScenarioTree& tree = f.tree();
    double best = 0.0;
    for (std::size_t k = 0; k <= tree.steps(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < tree.level_size(k); ++i)
            for (double v : f.slice(k, i)) s += v * v;
        best = std::max(best, s * tree.probability(k) * f.grid().dx());
    }
    return std::sqrt(best);
}

std::vector<double> level_mean(const SpaceTimeField& f, std::size_t level) {
    const ScenarioTree& tree = f.tree();
    if (level > tree.steps()) throw InvalidArgument("level out of range");
    std::vector<double> out(f.grid().size(), 0.0);
    for (std::size_t i = 0; i < tree.level_size(level); ++i) {
        const auto row = f.slice(level, i);
        for (std::size_t x = 0; x < out.size(); ++x) out[x] += row[x];
    }
    for (double& v : out) v *= tree.probability(level);
    return out;
}

}  // namespace spdelab
