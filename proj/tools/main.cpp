#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spdelab/errors.hpp"
#include "spdelab/harness/config.hpp"
#include "spdelab/harness/experiments.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

int run_experiment(const std::string& path, std::optional<std::uint64_t> seed,
                   std::optional<std::string> out_dir, std::optional<std::size_t> workers) {
    auto config = spdelab::harness::load_config(path);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (workers) {
        if (*workers == 0) throw spdelab::InvalidArgument("--workers must be positive");
        config.workers = *workers;
    }

    const auto report = spdelab::harness::run(config);
    report.write(config.output_dir);

    for (const auto& row : report.rows()) {
        std::printf("%-4s %-48s lhs=% .6e rhs=% .6e tol=%.3e\n", row.pass ? "PASS" : "FAIL",
                    row.check.c_str(), row.lhs, row.rhs, row.tol);
    }
    for (const auto& n : report.notes()) std::printf("note: %s\n", n.c_str());
    std::printf("%s: %s (report in %s)\n", config.experiment.c_str(),
                report.passed() ? "passed" : "FAILED", config.output_dir.string().c_str());
    return report.passed() ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification experiments for backward SPDE representations of diffusion functionals"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> workers;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Path to the config file")->required();
    run->add_option("--seed", seed, "Override mc.seed");
    run->add_option("--out-dir", out_dir, "Override output_dir");
    run->add_option("--workers", workers, "Override the worker count");

    auto* list = app.add_subcommand("list-experiments", "Print the known experiment names");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate-config", "Parse and check a config without running it");
    validate->add_option("path", validate_path, "Path to the config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }

    try {
        if (list->parsed()) {
            for (const auto& name : spdelab::harness::experiment_names()) std::cout << name << '\n';
            return kPass;
        }
        if (validate->parsed()) {
            const auto config = spdelab::harness::load_config(validate_path);
            std::cout << spdelab::harness::to_json(config).dump(2) << '\n';
            return kPass;
        }
        return run_experiment(config_path, seed, out_dir, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}
