#include "nashflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nashflow {

ConsensusError consensus_error(const Vector& x_aug, const LaplacianInfo& L, Index block) {
    ConsensusError err;
    err.norm = augmented_laplacian_apply(L, x_aug, block).norm();
    const Index n_blocks = L.n_nodes();
    Vector mean = Vector::Zero(block);
    for (Index i = 0; i < n_blocks; ++i) mean += x_aug.segment(i * block, block);
    mean /= static_cast<double>(n_blocks);
    for (Index i = 0; i < n_blocks; ++i) {
        err.max_block_deviation =
            std::max(err.max_block_deviation, (x_aug.segment(i * block, block) - mean).lpNorm<Eigen::Infinity>());
    }
    return err;
}

double ne_residual(const Game& game, const std::optional<BoxSet>& box, const Vector& x) {
    const Vector f = pseudo_gradient(game, x);
    if (!box) return f.lpNorm<Eigen::Infinity>();
    return (x - project_point(*box, x - f)).lpNorm<Eigen::Infinity>();
}

double storage_value(const Vector& state, const Vector& x_star) {
    const Index n = x_star.size();
    if (n == 0 || state.size() % n != 0) {
        throw DimensionError("storage_value: state size is not a multiple of the profile size");
    }
    double v = 0.0;
    for (Index b = 0; b < state.size() / n; ++b) v += (state.segment(b * n, n) - x_star).squaredNorm();
    return 0.5 * v;
}

std::vector<double> storage_series(const Trajectory& traj, const Vector& x_star) {
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) out.push_back(storage_value(s, x_star));
    return out;
}

double max_increase(const std::vector<double>& series) {
    double worst = 0.0;
    for (std::size_t k = 1; k < series.size(); ++k) worst = std::max(worst, series[k] - series[k - 1]);
    return worst;
}

BoundReport bound_report(const GameConstants& constants, const LaplacianInfo& L, int n_players, double eps_inv) {
    const double mu = constants.mu;
    const double theta = constants.theta;
    if (!(mu > 0.0) || !(theta > 0.0)) throw std::invalid_argument("bound_report: mu and theta must be > 0");
    if (!(eps_inv > 0.0)) throw std::invalid_argument("bound_report: eps_inv must be > 0");
    if (n_players < 1) throw std::invalid_argument("bound_report: need at least one player");

    BoundReport r;
    r.lambda2 = L.lambda2;
    r.lambdaN = L.lambdaN;
    r.mu = mu;
    r.theta = theta;
    r.n_players = n_players;
    r.d_star = L.d_star;
    r.eps_inv = eps_inv;
    r.eps = 1.0 / eps_inv;
    r.constants_source = constants.source;

    const double n = n_players;
    const double sqrt_n = std::sqrt(n);

    r.asymptotic_threshold = theta * theta / mu + theta;
    r.asymptotic_met = r.lambda2 > r.asymptotic_threshold;
    r.exponential_threshold = n * theta * theta / mu + theta;
    r.exponential_met = r.lambda2 > r.exponential_threshold;
    r.eps_scaled_threshold = r.eps * r.asymptotic_threshold;
    r.eps_scaled_met = r.lambda2 > r.eps_scaled_threshold;

    r.eps_star = r.lambda2 * mu / (n * sqrt_n * (theta + mu) * (theta + r.lambdaN));
    r.eps_star_degree = r.lambda2 * mu / (n * sqrt_n * (theta + mu) * (theta + 2.0 * r.d_star));
    r.eps_below_eps_star = r.eps < r.eps_star;

    const double shape = (theta / mu + 1.0) * (theta + 2.0 * r.d_star);
    r.two_timescale_threshold_statement = r.eps * sqrt_n * shape;
    r.two_timescale_statement_met = r.lambda2 > r.two_timescale_threshold_statement;
    r.two_timescale_threshold_proof = r.eps * n * sqrt_n * shape;
    r.two_timescale_proof_met = r.lambda2 > r.two_timescale_threshold_proof;
    return r;
}

std::optional<RateFit> fit_storage_rate(const std::vector<double>& times, const std::vector<double>& storage) {
    if (times.size() != storage.size()) throw DimensionError("fit_storage_rate: series lengths differ");
    const std::size_t m = storage.size();
    const std::size_t first = m / 2;
    if (m - first < 3) return std::nullopt;
    for (std::size_t k = first; k < m; ++k) {
        if (!(storage[k] > 0.0) || !std::isfinite(storage[k])) return std::nullopt;
    }
    if (!(storage.back() < storage[first])) return std::nullopt;

    const double count = static_cast<double>(m - first);
    double st = 0.0, sy = 0.0;
    for (std::size_t k = first; k < m; ++k) {
        st += times[k];
        sy += std::log(storage[k]);
    }
    const double tbar = st / count;
    const double ybar = sy / count;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t k = first; k < m; ++k) {
        const double dt = times[k] - tbar;
        const double dy = std::log(storage[k]) - ybar;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (stt == 0.0) return std::nullopt;
    RateFit fit;
    const double slope = sty / stt;
    fit.rate = -slope;
    fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
    fit.accepted = fit.r_squared >= kMinRateR2;
    return fit;
}

ConvergenceSummary convergence_summary(const Trajectory& traj, const Vector& x_star,
                                       const std::optional<SelectionOps>& layout) {
    if (traj.empty()) throw std::invalid_argument("convergence_summary: empty trajectory");
    ConvergenceSummary s;
    s.termination = traj.termination;
    s.diverged = traj.diverged();
    s.final_time = traj.times.back();

    const Vector& last = traj.final_state();
    const Vector actions = layout ? layout->extract_actions(last) : last;
    s.final_ne_distance = (actions - x_star).lpNorm<Eigen::Infinity>();

    s.final_consensus_error = std::numeric_limits<double>::quiet_NaN();
    s.final_residual = std::numeric_limits<double>::quiet_NaN();
    if (!traj.diagnostics.empty()) {
        s.final_consensus_error = traj.diagnostics.back().consensus_error;
        s.final_residual = traj.diagnostics.back().ne_residual;
    }

    const auto series = storage_series(traj, x_star);
    s.storage_max_increase = max_increase(series);
    if (!s.diverged) s.rate = fit_storage_rate(traj.times, series);
    return s;
}

}  // namespace nashflow
