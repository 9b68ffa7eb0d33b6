#pragma once

// Manifest-driven front end shared by tools/polyjet and the acceptance suite.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyjet/error.hpp"
#include "polyjet/hamilton.hpp"

namespace polyjet::cli {

inline constexpr int kReportSchema = 1;

struct Tolerances {
    double equiv = kDefaultEquivTolerance;
    double law = kDefaultLawTolerance;
    double regularity = kDefaultRegularityTolerance;
};

/// Adds `delta` to N2^(a)_(i)j of every chart-A connection before checking.
/// Indices are 0-based here and 1-based in the manifest.
struct Fault {
    std::size_t a = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    double delta = 0.0;
};

/// Command-line values that take precedence over the manifest.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

struct Manifest {
    JetChart chart;
    std::optional<Metric> h;
    std::optional<Metric> phi;
    std::optional<HamiltonSpace> hamiltonian;
    std::optional<TransitionMap> transition;
    SampleDomain domain;
    Tolerances tol;
    JetPoint point;
    std::optional<Fault> fault;
    std::string digest;
};

/// Throws ConfigError for structural problems and the parser's errors for bad
/// expressions; metrics and the transition are validated on the domain.
Manifest load_manifest(const nlohmann::json& j, const Overrides& overrides = {});
Manifest load_manifest_file(const std::string& path, const Overrides& overrides = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

struct Check {
    VerificationReport result;
    /// Category reported when this check fails.
    ErrorCategory category = ErrorCategory::residual_too_large;
};

struct Report {
    std::string command;
    std::string inputs_digest;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    nlohmann::json objects = nlohmann::json::object();
    std::vector<std::string> notes;
    double wall_time_ms = 0.0;

    bool passed() const;
    /// 0 when every check passed, else the code of the first failing check.
    int exit_code() const;
};

int exit_code(ErrorCategory category);

Report cmd_christoffel(const Manifest& m);
Report cmd_connection(const Manifest& m);
Report cmd_verify(const Manifest& m);
Report cmd_regularity(const Manifest& m);

/// Dispatches on "christoffel", "connection", "verify" or "regularity" and
/// fills wall_time_ms. Throws ConfigError for an unknown command.
Report run_command(const std::string& name, const Manifest& m);

nlohmann::json to_json(const Report& r);
std::string render_table(const Report& r);

}  // namespace polyjet::cli
