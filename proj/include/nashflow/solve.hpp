#pragma once

// Reference NE oracles: an exact linear solve for affine pseudo-gradients and
// the projection fixed-point iteration x <- P_Ω(x - γ F(x)).

#include "nashflow/game.hpp"
#include "nashflow/geometry.hpp"

#include <optional>
#include <string_view>

namespace nashflow {

enum class SolveMethod { Linear, FixedPoint };

[[nodiscard]] constexpr std::string_view to_string(SolveMethod m) noexcept {
    return m == SolveMethod::Linear ? "linear" : "fixed-point";
}

struct NESolution {
    Vector x_star;
    /// ‖F(x*)‖∞ for the linear solve; natural-map residual ‖x* - P_Ω(x* - F(x*))‖∞ otherwise.
    double residual = 0.0;
    double tolerance = 0.0;
    SolveMethod method = SolveMethod::Linear;
    bool converged = true;
    long long iterations = 0;
};

/// F(x) = (I + 1 1ᵀ) x + (a - D) for linear-demand aggregative games; solved
/// in closed form. Throws std::invalid_argument for any other game.
[[nodiscard]] NESolution solve_ne_linear(const Game& game);

struct ProjectionSolveOptions {
    /// Step γ; defaults to default_projection_step(game, box, start).
    std::optional<double> gamma;
    double tol = 1e-10;
    long long max_iter = 1'000'000;
    /// Starting point; the box center when unset.
    std::optional<Vector> start;
};

/// 1 / θ̂ with θ̂ the sampled Lipschitz constant of F over the box (or over a
/// unit box around `start` when the box is unbounded).
[[nodiscard]] double default_projection_step(const Game& game, const BoxSet& box,
                                             const std::optional<Vector>& start = std::nullopt);

/// Iterates until both the step and the natural-map residual are ≤ tol. On
/// max_iter exhaustion returns the lowest-residual iterate with converged = false.
[[nodiscard]] NESolution solve_ne_projected(const Game& game, const BoxSet& box,
                                            const ProjectionSolveOptions& options = {});

[[nodiscard]] inline NESolution solve_ne_projected(const Game& game, const BoxSet& box, double gamma, double tol,
                                                   long long max_iter) {
    ProjectionSolveOptions o;
    o.gamma = gamma;
    o.tol = tol;
    o.max_iter = max_iter;
    return solve_ne_projected(game, box, o);
}

}  // namespace nashflow
