#include "spdelab/paths.hpp"

#include <algorithm>
#include <cmath>

#include "spdelab/errors.hpp"

namespace spdelab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ path) ^ (stream + 0x5851f42d4c957f2dULL));
}

PathBundle::PathBundle(std::shared_ptr<const ScenarioTree> tree, PathLaw law, std::size_t paths,
                       std::size_t d0, double dt_mc, std::uint64_t seed, std::size_t leaf)
    : tree_(std::move(tree)), law_(law), paths_(paths), d0_(d0), dt_mc_(dt_mc), seed_(seed),
      leaf_(leaf) {
    if (!tree_) throw InvalidArgument("path bundle needs a tree");
    if (paths_ == 0) throw InvalidArgument("path bundle needs at least one path");
    if (d0_ < tree_->dim()) throw InvalidArgument("d0 must be >= the tree dimension");
    if (!(dt_mc_ > 0.0)) throw InvalidArgument("fine step must be positive");
    const double ratio = tree_->dt() / dt_mc_;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
        throw InvalidArgument("the fine step must divide the tree step");
    substeps_ = static_cast<std::size_t>(rounded);
    if (law_ == PathLaw::fixed_leaf && leaf_ >= tree_->leaf_count())
        throw InvalidArgument("leaf out of range");
}

std::mt19937_64 PathBundle::auxiliary_engine(std::size_t path) const {
    return std::mt19937_64(stream_seed(seed_, path, 1));
}

PathBundle::Cursor::Cursor(const PathBundle& bundle, std::size_t path)
    : bundle_(&bundle), d_(bundle.tree().dim()) {
    if (path >= bundle.size()) throw InvalidArgument("path index out of range");
    engine_.seed(stream_seed(bundle.seed_, path, 0));
    const ScenarioTree& tree = bundle.tree();
    block_.resize(bundle.substeps_ * bundle.d0_);
    omega_.assign((tree.steps() + 1) * d_, 0.0);
    if (bundle.law_ == PathLaw::sampled_leaf) {
        std::uniform_int_distribution<std::size_t> pick(0, tree.leaf_count() - 1);
        leaf_ = pick(engine_);
    } else if (bundle.law_ == PathLaw::fixed_leaf) {
        leaf_ = bundle.leaf_;
    }
}

void PathBundle::Cursor::advance() {
    const PathBundle& b = *bundle_;
    const ScenarioTree& tree = b.tree();
    const std::size_t k = loaded_;
    if (k >= tree.steps()) throw InvalidArgument("path already fully drawn");
    const std::size_t s = b.substeps_;
    const std::size_t d0 = b.d0_;
    const double sq = std::sqrt(b.dt_mc_);
    for (double& v : block_) v = sq * normal_(engine_);

    if (b.law_ == PathLaw::free) {
        for (std::size_t j = 0; j < d_; ++j) {
            double w = omega_[k * d_ + j];
            for (std::size_t q = 0; q < s; ++q) w += block_[q * d0 + j];
            omega_[(k + 1) * d_ + j] = w;
        }
    } else {
        // Bridge: shift the free increments so they sum to the edge increment.
        const std::size_t c = tree.ancestor(leaf_, k + 1) % tree.branching();
        const double inv_s = 1.0 / static_cast<double>(s);
        for (std::size_t j = 0; j < d_; ++j) {
            const double target = tree.child_increment(c, j);
            double sum = 0.0;
            for (std::size_t q = 0; q < s; ++q) sum += block_[q * d0 + j];
            const double shift = (sum - target) * inv_s;
            for (std::size_t q = 0; q < s; ++q) block_[q * d0 + j] -= shift;
            omega_[(k + 1) * d_ + j] = omega_[k * d_ + j] + target;
        }
    }
    ++loaded_;
}

void PathBundle::generate(std::size_t path, Realization& out) const {
    Cursor cursor(*this, path);
    const std::size_t block = substeps_ * d0_;
    out.increments.resize(fine_steps() * d0_);
    for (std::size_t k = 0; k < tree_->steps(); ++k) {
        cursor.advance();
        std::copy(cursor.block().begin(), cursor.block().end(),
                  out.increments.begin() + static_cast<std::ptrdiff_t>(k * block));
    }
    out.leaf = cursor.leaf();
    out.omega = cursor.omega_all();
}

PathBundle bridge_paths(std::shared_ptr<const ScenarioTree> tree,
                        std::span<const std::size_t> leaf_path, std::size_t paths, std::size_t d0,
                        double dt_mc, std::uint64_t seed) {
    if (!tree) throw InvalidArgument("path bundle needs a tree");
    if (leaf_path.size() != tree->steps() + 1) throw InvalidArgument("leaf path has the wrong length");
    for (std::size_t k = 1; k < leaf_path.size(); ++k)
        if (leaf_path[k] / tree->branching() != leaf_path[k - 1])
            throw InvalidArgument("leaf path is not a chain of parent and child");
    if (leaf_path[0] != 0) throw InvalidArgument("leaf path must start at the root");
    return PathBundle(std::move(tree), PathLaw::fixed_leaf, paths, d0, dt_mc, seed,
                      leaf_path.back());
}

}  // namespace spdelab
