#pragma once

// Configuration documents, the built-in example corpus, plan execution and
// canonical JSON reports.

#include "dualpair/diagnostics.hpp"
#include "dualpair/funcspace.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualpair {

using json = nlohmann::json;

inline constexpr int config_version = 1;
inline constexpr std::string_view tool_version = "0.1.0";

/// Truncation for one chart: uniform K and D, optional total-degree cap and
/// per-coordinate overrides (K for periodic, D for other coordinates).
struct Truncation {
    int frequency = 0;
    int degree = 0;
    std::optional<int> total_degree;
    std::map<std::string, int, std::less<>> overrides;

    BasisSpec resolve(const Chart& chart) const;
    bool operator==(const Truncation&) const = default;
};

struct PushforwardPlan {
    std::vector<std::string> legs{"left", "right"};
    PushforwardOptions options;
};

struct HowePlan {
    Truncation space;
    Truncation left_target;
    Truncation right_target;
    std::optional<double> kernel_tol;
    /// When set, the check runs on the localized diagram over this window.
    std::optional<std::map<std::string, std::pair<double, double>, std::less<>>> local_window;
};

struct LeafPlan {
    /// Number of grid points examined (evenly strided); 0 means all.
    std::size_t points = 0;
};

struct FlowPlan {
    std::string hamiltonian;  ///< name of a map with one-dimensional target
    Vector start;
    double T = 0.0;
    double dt = 0.0;
    std::vector<std::string> fiber;
    std::size_t resolution = 10;
    std::optional<double> min_covered;
};

struct AnalysisPlan {
    GridSpec grid;
    double rank_tol = 1e-9;
    double angle_tol = 1e-7;
    double poisson_tol = 1e-9;
    std::vector<std::string> checks;  ///< in execution order
    std::optional<PushforwardPlan> pushforward;
    std::optional<HowePlan> howe;
    std::optional<LeafPlan> leaf;
    std::optional<FlowPlan> flow_probe;

    bool enabled(std::string_view check) const;
};

struct Config {
    int version = config_version;
    std::vector<std::pair<std::string, std::string>> parameter_sources;  ///< name, expression text
    Environment parameters;
    std::vector<Chart> charts;
    std::vector<BivectorField> bivectors;
    std::vector<SmoothMap> maps;
    DualPairDiagram diagram;
    AnalysisPlan plan;

    const SmoothMap& map(std::string_view name) const;
};

/// Names of the checks in execution order.
const std::vector<std::string>& check_names();

/// Throws ConfigError (with a path to the offending field) on any schema,
/// expression or invariant violation.
Config parse_config(const json& doc);
Config parse_config_text(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Canonical document for `c`; parse_config(serialize(c)) rebuilds it.
json serialize(const Config& c);

const std::vector<std::string>& corpus_names();
/// Embedded config text. Throws ConfigError listing the available names.
std::string corpus_get(std::string_view name);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    /// Overrides the rank and kernel tolerances of the plan.
    std::optional<double> tol;
};

json run_plan(const Config& c, const RunOptions& options = {});

/// Sorted keys, two-space indent, doubles as %.17g, no trailing spaces.
std::string canonical_dump(const json& j);

std::string sha256_hex(std::string_view data);

}  // namespace dualpair
