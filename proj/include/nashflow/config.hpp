#pragma once

// Experiment configuration: a small TOML subset (tables, key = value,
// strings, numbers, booleans, single-line numeric arrays, '#' comments).
// The accepted grammar and every key are documented in docs/config.md.

#include "nashflow/dynamics.hpp"
#include "nashflow/game.hpp"
#include "nashflow/graph.hpp"
#include "nashflow/integrate.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nashflow {

/// Syntax or type error at a specific line (0 when not tied to a line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message);
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

using ConfigScalar = std::variant<double, bool, std::string>;
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

struct ConfigEntry {
    ConfigValue value;
    int line = 0;
};

/// Flat key/value view of a config file; keys are "table.key" ("key" at top level).
class ConfigDocument {
public:
    [[nodiscard]] static ConfigDocument parse(std::string_view text);

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
    [[nodiscard]] const ConfigEntry* find(const std::string& key) const;
    [[nodiscard]] const std::map<std::string, ConfigEntry>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, ConfigEntry> entries_;
};

enum class GraphKind { Path, Cycle, Complete, Random, EdgeList };

struct GameConfig {
    std::string kind = "example1";  ///< example1 | example2 | example3 | custom-quadratic
    std::optional<int> n_players;
    std::optional<Vector> cost_coeffs;
    std::optional<double> cost_base;
    std::optional<double> cost_step;
    std::optional<double> demand_intercept;
    std::optional<DemandKind> demand;
};

struct GraphConfig {
    GraphKind kind = GraphKind::Cycle;
    double edge_prob = 0.3;
    std::uint64_t seed = 1;
    std::filesystem::path file;
};

struct ConstraintConfig {
    /// Unset means unbounded. Per-player bounds override the shared omega.
    std::optional<std::pair<double, double>> omega;
    std::optional<Vector> lo;
    std::optional<Vector> hi;
};

struct InitialConfig {
    std::pair<double, double> actions{0.0, 20.0};
    /// Defaults to the action range.
    std::optional<std::pair<double, double>> estimates;
    std::uint64_t seed = 1;
};

struct OutputConfig {
    std::string csv = "trajectory.csv";
    std::string summary = "summary.json";
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::string description;
    GameConfig game;
    GraphConfig graph;
    Variant variant = Variant::Augmented;
    double eps_inv = 1.0;
    std::optional<ActionGain> action_gain;
    ConstraintConfig constraints;
    IntegratorConfig integrator;
    std::optional<double> stop_residual;
    InitialConfig initial;
    OutputConfig output;

    /// Directory relative paths (the edge-list file) are resolved against.
    std::filesystem::path base_dir;
    /// Source line of each key that was set, for diagnostics.
    std::map<std::string, int> lines;

    [[nodiscard]] int line_of(const std::string& key) const;
};

/// Throws ConfigError on syntax errors, unknown keys and mistyped values.
[[nodiscard]] ExperimentConfig parse_experiment(std::string_view text, std::filesystem::path base_dir = {});
[[nodiscard]] ExperimentConfig load_experiment(const std::filesystem::path& path);

struct ConfigDiagnostic {
    int line = 0;
    std::string field;
    std::string message;

    [[nodiscard]] std::string to_string() const;
};

// Builders from a parsed config to domain objects. Each throws ConfigError
// pointing at the offending key.

/// Game kinds: example1, example2, example3 (the bundled Cournot games, whose
/// parameters may be overridden) and custom-quadratic.
[[nodiscard]] Game build_game(const ExperimentConfig& cfg);
[[nodiscard]] CommGraph build_graph(const ExperimentConfig& cfg, int n_players);
/// nullopt when no bound is configured.
[[nodiscard]] std::optional<BoxSet> build_box(const ExperimentConfig& cfg, int n_players);

/// Semantic checks (ranges, dimensions, variant/box compatibility, scheme).
/// An empty result means the config can be run.
[[nodiscard]] std::vector<ConfigDiagnostic> validate_experiment(const ExperimentConfig& cfg);

[[nodiscard]] std::string_view to_string(GraphKind k) noexcept;

}  // namespace nashflow
