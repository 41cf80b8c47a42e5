#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "spdelab/tree.hpp"

namespace spdelab {

/// splitmix64 finaliser applied to (seed, path, stream): the seed of the generator that
/// owns one stream of one path. Streams: 0 Wiener increments, 1 initial draws.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) noexcept;

enum class PathLaw {
    fixed_leaf,    ///< tree components bridged through one designated leaf path
    sampled_leaf,  ///< a uniformly drawn leaf per realisation, then bridged
    free,          ///< every component free; the coarse driving state is read off the path
};

/// M fine-mesh realisations of a d0-dimensional Wiener path on [0, T]. Realisations are
/// produced on demand from (seed, index), so a bundle costs no memory per path.
class PathBundle {
public:
    struct Realization {
        std::size_t leaf = 0;
        std::vector<double> omega;       ///< (steps + 1) x d: driving state at tree times
        std::vector<double> increments;  ///< fine_steps x d0, row per fine step
    };

    PathBundle(std::shared_ptr<const ScenarioTree> tree, PathLaw law, std::size_t paths,
               std::size_t d0, double dt_mc, std::uint64_t seed, std::size_t leaf = 0);

    const ScenarioTree& tree() const noexcept { return *tree_; }
    PathLaw law() const noexcept { return law_; }
    std::size_t size() const noexcept { return paths_; }
    std::size_t noise_dim() const noexcept { return d0_; }
    double dt_mc() const noexcept { return dt_mc_; }
    std::size_t substeps() const noexcept { return substeps_; }
    std::size_t fine_steps() const noexcept { return substeps_ * tree_->steps(); }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t leaf() const noexcept { return leaf_; }

    /// Draws one realisation coarse step by coarse step. Draws happen in the same order as
    /// generate(), so a path abandoned early shares its prefix with the full realisation.
    class Cursor {
    public:
        Cursor(const PathBundle& bundle, std::size_t path);

        std::size_t leaf() const noexcept { return leaf_; }
        /// Tree steps drawn so far.
        std::size_t loaded() const noexcept { return loaded_; }
        /// Draws tree step `loaded()`: its fine increments and omega at its right end.
        void advance();
        /// Fine increments of the most recently drawn tree step, substeps x d0.
        std::span<const double> block() const noexcept { return block_; }
        /// Driving state at tree level k <= loaded().
        std::span<const double> omega(std::size_t k) const noexcept {
            return {omega_.data() + k * d_, d_};
        }
        const std::vector<double>& omega_all() const noexcept { return omega_; }

    private:
        const PathBundle* bundle_;
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_;
        std::size_t d_;
        std::size_t leaf_ = 0;
        std::size_t loaded_ = 0;
        std::vector<double> block_;
        std::vector<double> omega_;
    };

    void generate(std::size_t path, Realization& out) const;
    /// Generator for the non-Wiener randomness of a path (initial draws).
    std::mt19937_64 auxiliary_engine(std::size_t path) const;

private:
    std::shared_ptr<const ScenarioTree> tree_;
    PathLaw law_;
    std::size_t paths_;
    std::size_t d0_;
    double dt_mc_;
    std::size_t substeps_;
    std::uint64_t seed_;
    std::size_t leaf_;
};

/// Bundle whose tree components pass through the given leaf path (node indices per level,
/// as returned by ScenarioTree::leaf_path).
PathBundle bridge_paths(std::shared_ptr<const ScenarioTree> tree,
                        std::span<const std::size_t> leaf_path, std::size_t paths,
                        std::size_t d0, double dt_mc, std::uint64_t seed);

}  // namespace spdelab
