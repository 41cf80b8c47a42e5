#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spdelab/harness/config.hpp"
#include "spdelab/harness/report.hpp"

namespace spdelab::harness {

const std::vector<std::string>& experiment_names();
bool known_experiment(std::string_view name);

/// Runs the named experiment. Solver failures become failed rows; configuration errors throw.
ExperimentReport run(const ExperimentConfig& config);

}  // namespace spdelab::harness
