#include "nashflow/solve.hpp"

#include "nashflow/analysis.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace nashflow {

NESolution solve_ne_linear(const Game& game) {
    const auto& agg = game.aggregative();
    if (!agg || agg->demand != DemandKind::LinearSum) {
        throw std::invalid_argument("solve_ne_linear: needs an aggregative game with linear demand");
    }
    // (I + 1 1ᵀ)^{-1} = I - 1 1ᵀ / (N + 1); the denominator never vanishes.
    const double n = agg->n_players();
    assert(n + 1.0 != 0.0);
    const Vector b = agg->cost_coeffs.array() - agg->demand_intercept;
    NESolution sol;
    sol.x_star = -(b.array() - b.sum() / (n + 1.0)).matrix();
    sol.residual = pseudo_gradient(game, sol.x_star).lpNorm<Eigen::Infinity>();
    sol.tolerance = 1e-10 * std::max(1.0, b.lpNorm<Eigen::Infinity>());
    sol.method = SolveMethod::Linear;
    sol.converged = sol.residual <= sol.tolerance;
    return sol;
}

double default_projection_step(const Game& game, const BoxSet& box, const std::optional<Vector>& start) {
    require_dim(box.dim(), game.total_dim(), "default_projection_step");
    BoxSet sample_box = box;
    if (!box.is_bounded()) {
        const Vector c = start ? *start : box.center();
        sample_box = BoxSet(c.array() - 1.0, c.array() + 1.0);
    }
    const VectorField f = [&game](const Vector& x) { return pseudo_gradient(game, x); };
    const double theta = estimate_lipschitz(f, sample_box);
    if (!(theta > 0.0)) throw std::runtime_error("default_projection_step: pseudo-gradient looks constant");
    return 1.0 / theta;
}

NESolution solve_ne_projected(const Game& game, const BoxSet& box, const ProjectionSolveOptions& options) {
    require_dim(box.dim(), game.total_dim(), "solve_ne_projected");
    if (!(options.tol > 0.0)) throw std::invalid_argument("solve_ne_projected: tol must be > 0");
    if (options.max_iter < 1) throw std::invalid_argument("solve_ne_projected: max_iter must be >= 1");
    const double gamma = options.gamma ? *options.gamma : default_projection_step(game, box, options.start);
    if (!(gamma > 0.0)) throw std::invalid_argument("solve_ne_projected: gamma must be > 0");

    Vector x = project_point(box, options.start ? *options.start : box.center());
    NESolution best;
    best.method = SolveMethod::FixedPoint;
    best.tolerance = options.tol;
    best.converged = false;
    best.x_star = x;
    best.residual = ne_residual(game, box, x);

    for (long long k = 1; k <= options.max_iter; ++k) {
        const Vector next = project_point(box, x - gamma * pseudo_gradient(game, x));
        if (!next.allFinite()) break;
        const double step = (next - x).lpNorm<Eigen::Infinity>();
        x = next;
        const double res = ne_residual(game, box, x);
        if (res < best.residual) {
            best.x_star = x;
            best.residual = res;
            best.iterations = k;
        }
        if (step <= options.tol && res <= options.tol) {
            best.x_star = x;
            best.residual = res;
            best.iterations = k;
            best.converged = true;
            return best;
        }
    }
    return best;
}

}  // namespace nashflow
