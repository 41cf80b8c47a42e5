#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spdelab::harness {

struct CheckRow {
    std::string experiment;
    std::string check;
    std::string anchor;  ///< identity under test
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tol = 0.0;
    bool pass = false;
};

class ExperimentReport {
public:
    explicit ExperimentReport(std::string experiment, nlohmann::json config = {});

    const std::string& experiment() const noexcept { return experiment_; }
    const std::vector<CheckRow>& rows() const noexcept { return rows_; }
    bool passed() const noexcept;

    /// Row passing when abs_err <= tol.
    void add_abs(std::string check, std::string anchor, double lhs, double rhs, double tol);
    /// Row passing when rel_err <= tol.
    void add_rel(std::string check, std::string anchor, double lhs, double rhs, double tol);
    /// Row with a caller-decided verdict.
    void add(CheckRow row);
    void add_failure(std::string check, std::string anchor, const std::string& message);
    void note(std::string text) { notes_.push_back(std::move(text)); }
    const std::vector<std::string>& notes() const noexcept { return notes_; }

    std::string csv() const;
    nlohmann::json summary() const;
    /// Writes report.csv and summary.json (deterministic) and meta.json (timestamps).
    void write(const std::filesystem::path& dir) const;

private:
    std::string experiment_;
    nlohmann::json config_;
    std::vector<CheckRow> rows_;
    std::vector<std::string> notes_;
};

}  // namespace spdelab::harness
