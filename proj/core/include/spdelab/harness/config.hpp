#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"

namespace spdelab::harness {

/// One rung of a refinement ladder: grid nodes and tree steps.
struct Level {
    std::size_t nx = 101;
    std::size_t steps = 8;
};

struct ExperimentConfig {
    std::string experiment;
    Family family = Family::constant;
    FamilyParams params;
    DomainSpec domain;
    std::vector<Level> levels;    ///< first entry is the base discretisation
    std::size_t paths = 10000;
    double dt_mc = 1e-3;
    std::uint64_t seed = 0;
    double theta = 1.0;
    double tol = 1e-10;
    std::size_t max_iter = 400;
    double alpha = 0.8;
    std::size_t workers = 1;
    std::filesystem::path output_dir = "out";
    nlohmann::json options = nlohmann::json::object();  ///< experiment-specific knobs

    std::size_t d0() const noexcept { return params.sigma.size(); }
};

/// Throws InvalidArgument with a field path on malformed input.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace spdelab::harness
