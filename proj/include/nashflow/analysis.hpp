#pragma once

// Convergence diagnostics and the connectivity / gain bounds.

#include "nashflow/game.hpp"
#include "nashflow/geometry.hpp"
#include "nashflow/graph.hpp"
#include "nashflow/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nashflow {

struct ConsensusError {
    double norm = 0.0;                 ///< ‖(L ⊗ I_n) x‖₂
    double max_block_deviation = 0.0;  ///< max_i ‖x^i - mean_j x^j‖∞
};

[[nodiscard]] ConsensusError consensus_error(const Vector& x_aug, const LaplacianInfo& L, Index block);

/// ‖F(x)‖∞ without a box; ‖x - P_Ω(x - F(x))‖∞ with one.
[[nodiscard]] double ne_residual(const Game& game, const std::optional<BoxSet>& box, const Vector& x);

/// ½‖state - 1⊗x*‖². `state` is either a profile (size n) or an augmented
/// state (size k n), in which case x* is replicated k times.
[[nodiscard]] double storage_value(const Vector& state, const Vector& x_star);
[[nodiscard]] std::vector<double> storage_series(const Trajectory& traj, const Vector& x_star);

/// Largest one-record increase of the series, 0 if it never increases.
[[nodiscard]] double max_increase(const std::vector<double>& series);

/// Monotonicity / Lipschitz constants fed to the bound report, with a label
/// naming the map they were measured on (F or the extended F).
struct GameConstants {
    double mu = 0.0;
    double theta = 0.0;
    std::string source;
};

struct BoundReport {
    double lambda2 = 0.0;
    double lambdaN = 0.0;
    double mu = 0.0;
    double theta = 0.0;
    int n_players = 0;
    int d_star = 0;
    double eps_inv = 1.0;
    double eps = 1.0;
    std::string constants_source;

    /// λ₂ > θ²/μ + θ: asymptotic convergence, single timescale.
    double asymptotic_threshold = 0.0;
    bool asymptotic_met = false;
    /// λ₂ > Nθ²/μ + θ: exponential convergence.
    double exponential_threshold = 0.0;
    bool exponential_met = false;
    /// λ₂ > ε(θ²/μ + θ): gain on both rows of the projected system.
    double eps_scaled_threshold = 0.0;
    bool eps_scaled_met = false;

    /// ε* = λ₂μ / (N√N (θ+μ)(θ+λ_N)) and its degree-based lower bound (λ_N → 2d*).
    double eps_star = 0.0;
    double eps_star_degree = 0.0;
    bool eps_below_eps_star = false;

    /// Two-timescale λ₂ thresholds in two forms that differ by a factor N.
    /// Both are kept, labelled.
    double two_timescale_threshold_statement = 0.0;  ///< ε√N(θ/μ+1)(θ+2d*)
    bool two_timescale_statement_met = false;
    double two_timescale_threshold_proof = 0.0;  ///< εN√N(θ/μ+1)(θ+2d*)
    bool two_timescale_proof_met = false;
};

/// Throws std::invalid_argument unless mu, theta, eps_inv > 0 and n_players >= 1.
[[nodiscard]] BoundReport bound_report(const GameConstants& constants, const LaplacianInfo& L, int n_players,
                                       double eps_inv = 1.0);

struct RateFit {
    double rate = 0.0;       ///< -d/dt log V over the fitted window
    double r_squared = 0.0;
    bool accepted = false;   ///< R² >= kMinRateR2
};

inline constexpr double kMinRateR2 = 0.95;

struct ConvergenceSummary {
    Termination termination = Termination::ReachedEnd;
    bool diverged = false;
    double final_time = 0.0;
    double final_ne_distance = 0.0;
    double final_consensus_error = 0.0;  ///< NaN for perfect-information runs
    double final_residual = 0.0;          ///< NaN when no diagnostics were recorded
    double storage_max_increase = 0.0;
    std::optional<RateFit> rate;           ///< present only when V decreases over the window
};

/// Least-squares fit of log V over the last half of the records; nullopt when
/// V is not positive and decreasing there.
[[nodiscard]] std::optional<RateFit> fit_storage_rate(const std::vector<double>& times,
                                                      const std::vector<double>& storage);

/// `layout` marks augmented trajectories (actions are extracted from each state).
[[nodiscard]] ConvergenceSummary convergence_summary(const Trajectory& traj, const Vector& x_star,
                                                     const std::optional<SelectionOps>& layout = std::nullopt);

}  // namespace nashflow
