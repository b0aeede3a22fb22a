#pragma once

// Experiment assembly and execution: config -> game, graph, dynamics, initial
// state and NE oracle -> integrated trajectory, CSV and JSON summary.

#include "nashflow/analysis.hpp"
#include "nashflow/config.hpp"
#include "nashflow/dynamics.hpp"
#include "nashflow/integrate.hpp"
#include "nashflow/solve.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nashflow {

/// Process exit statuses of a run.
enum ExitCode : int {
    kExitOk = 0,           ///< finished (and met stop_residual when one was set)
    kExitConfigError = 1,  ///< unreadable or invalid config
    kExitDiverged = 2,
    kExitThresholdMissed = 3,  ///< reached t_end without meeting stop_residual
};

struct Experiment {
    ExperimentConfig config;
    DynamicsSpec spec;
    std::optional<CommGraph> graph;
    Vector x0;
    NESolution oracle;
    /// Constants of F and of the extended F, each labelled with how it was obtained.
    double mu_f = 0.0;
    double theta_f = 0.0;
    std::string f_constants_source;
    double mu_extended = 0.0;
    double theta_extended = 0.0;
    std::string extended_constants_source;  ///< "jacobian" for affine fields, else "sampled"
    /// Inputs to the bound report (mu of F, theta of the extended F).
    GameConstants constants;
    std::optional<BoundReport> bounds;
    std::string bounds_note;  ///< why the bounds are missing, when they are
};

/// Throws ConfigError listing every validation diagnostic.
[[nodiscard]] Experiment build_experiment(const ExperimentConfig& cfg);

/// Initial state drawn uniformly from the configured ranges (estimates use
/// their own range when set). Augmented states are filled block by block.
[[nodiscard]] Vector initial_state(const ExperimentConfig& cfg, const Game& game);

/// Reference NE: closed form for linear demand without bounds, the projection
/// iteration otherwise (started from the initial-range midpoint).
[[nodiscard]] NESolution reference_equilibrium(const ExperimentConfig& cfg, const Game& game,
                                               const std::optional<BoxSet>& box);

struct RunResult {
    int exit_code = kExitOk;
    Trajectory trajectory;
    ConvergenceSummary summary;
    /// Largest one-step increase of ½‖x - 1⊗x*‖² over every accepted step.
    double storage_step_increase = 0.0;
    std::filesystem::path csv_path;
    std::filesystem::path summary_path;
};

/// Integrates and, when out_dir is set, writes the CSV and JSON summary there.
[[nodiscard]] RunResult run_experiment(const Experiment& experiment,
                                       const std::optional<std::filesystem::path>& out_dir);
[[nodiscard]] RunResult run_experiment(const ExperimentConfig& cfg,
                                       const std::optional<std::filesystem::path>& out_dir);

/// Header: t, x_1_1 .. x_N_n, consensus_err, ne_dist, storage (augmented) or
/// t, x_1 .. x_n, ne_dist, storage (perfect information).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const DynamicsSpec& spec);
[[nodiscard]] std::string summary_json(const Experiment& experiment, const RunResult& result);

struct ExampleEntry {
    std::string name;
    std::string description;
    std::filesystem::path path;
};

/// Bundled configs, sorted by name.
[[nodiscard]] std::vector<ExampleEntry> list_examples(const std::filesystem::path& dir = NASHFLOW_CONFIG_DIR);
/// An existing file path, or the name of a bundled config (with or without .toml).
[[nodiscard]] std::optional<std::filesystem::path> resolve_config(const std::string& name_or_path,
                                                                  const std::filesystem::path& dir = NASHFLOW_CONFIG_DIR);

}  // namespace nashflow
