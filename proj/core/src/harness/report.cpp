#include "spdelab/harness/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "spdelab/errors.hpp"

namespace spdelab::harness {

namespace {

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return number(v);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << text;
}

}  // namespace

ExperimentReport::ExperimentReport(std::string experiment, nlohmann::json config)
    : experiment_(std::move(experiment)), config_(std::move(config)) {}

bool ExperimentReport::passed() const noexcept {
    if (rows_.empty()) return false;
    for (const auto& r : rows_)
        if (!r.pass) return false;
    return true;
}

void ExperimentReport::add_abs(std::string check, std::string anchor, double lhs, double rhs,
                               double tol) {
    CheckRow r{experiment_, std::move(check), std::move(anchor), lhs, rhs, 0.0, 0.0, tol, false};
    r.abs_err = std::abs(lhs - rhs);
    r.rel_err = r.abs_err / std::max(std::abs(rhs), std::numeric_limits<double>::min());
    r.pass = r.abs_err <= tol;
    rows_.push_back(std::move(r));
}

void ExperimentReport::add_rel(std::string check, std::string anchor, double lhs, double rhs,
                               double tol) {
    CheckRow r{experiment_, std::move(check), std::move(anchor), lhs, rhs, 0.0, 0.0, tol, false};
    r.abs_err = std::abs(lhs - rhs);
    r.rel_err = r.abs_err / std::max(std::abs(rhs), std::numeric_limits<double>::min());
    r.pass = r.rel_err <= tol;
    rows_.push_back(std::move(r));
}

void ExperimentReport::add(CheckRow row) {
    row.experiment = experiment_;
    rows_.push_back(std::move(row));
}

void ExperimentReport::add_failure(std::string check, std::string anchor,
                                   const std::string& message) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rows_.push_back({experiment_, check, std::move(anchor), nan, nan, nan, nan, nan, false});
    notes_.push_back(check + ": " + message);
}

std::string ExperimentReport::csv() const {
    std::ostringstream out;
    out << "experiment,check,paper_anchor,lhs,rhs,abs_err,rel_err,tol,pass\n";
    for (const auto& r : rows_) {
        out << field(r.experiment) << ',' << field(r.check) << ',' << field(r.anchor) << ','
            << number(r.lhs) << ',' << number(r.rhs) << ',' << number(r.abs_err) << ','
            << number(r.rel_err) << ',' << number(r.tol) << ',' << (r.pass ? "true" : "false")
            << '\n';
    }
    return out.str();
}

nlohmann::json ExperimentReport::summary() const {
    nlohmann::json rows = nlohmann::json::array();
    std::size_t failed = 0;
    for (const auto& r : rows_) {
        if (!r.pass) ++failed;
        rows.push_back({{"check", r.check},
                        {"paper_anchor", r.anchor},
                        {"lhs", json_number(r.lhs)},
                        {"rhs", json_number(r.rhs)},
                        {"abs_err", json_number(r.abs_err)},
                        {"rel_err", json_number(r.rel_err)},
                        {"tol", json_number(r.tol)},
                        {"pass", r.pass}});
    }
    return {{"experiment", experiment_},
            {"passed", passed()},
            {"checks", rows_.size()},
            {"failed", failed},
            {"rows", rows},
            {"notes", notes_},
            {"config", config_}};
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    write_file(dir / "report.csv", csv());
    write_file(dir / "summary.json", summary().dump(2) + "\n");

    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    nlohmann::json meta = {{"experiment", experiment_},
                           {"written_at", stamp},
                           {"library_version", "0.1.0"},
#if defined(__clang__)
                           {"compiler", "clang " __clang_version__},
#elif defined(__GNUC__)
                           {"compiler", "gcc " __VERSION__},
#else
                           {"compiler", "unknown"},
#endif
                           {"cxx_standard", static_cast<long>(__cplusplus)}};
    write_file(dir / "meta.json", meta.dump(2) + "\n");
}

}  // namespace spdelab::harness
