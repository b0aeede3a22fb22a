#include "nashflow/game.hpp"

#include "nashflow/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nashflow {

Game::Game(std::vector<Index> dims, CostFn cost, PartialGradientFn gradient)
    : dims_(std::move(dims)), cost_(std::move(cost)), gradient_(std::move(gradient)) {
    if (dims_.empty()) throw std::invalid_argument("Game: need at least one player");
    if (!cost_) throw std::invalid_argument("Game: cost evaluator is required");
    offsets_.reserve(dims_.size());
    for (Index d : dims_) {
        if (d <= 0) throw std::invalid_argument("Game: action dimensions must be positive");
        offsets_.push_back(total_dim_);
        total_dim_ += d;
    }
}

double Game::cost(int player, const Vector& profile) const {
    require_dim(profile.size(), total_dim_, "Game::cost");
    return cost_(player, profile);
}

Vector Game::partial_gradient(int player, const Vector& profile) const {
    require_dim(profile.size(), total_dim_, "Game::partial_gradient");
    const Index ni = dim(player);
    if (gradient_) {
        Vector g = gradient_(player, profile);
        require_dim(g.size(), ni, "partial gradient evaluator output");
        return g;
    }
    const double h = 1e-6 * std::max(1.0, profile.norm());
    Vector g(ni);
    Vector probe = profile;
    const Index off = offset(player);
    for (Index k = 0; k < ni; ++k) {
        const double saved = probe(off + k);
        probe(off + k) = saved + h;
        const double up = cost_(player, probe);
        probe(off + k) = saved - h;
        const double down = cost_(player, probe);
        probe(off + k) = saved;
        g(k) = (up - down) / (2.0 * h);
    }
    return g;
}

Game make_aggregative_game(AggregativeSpec spec) {
    const int n = spec.n_players();
    if (n < 1) throw std::invalid_argument("aggregative game: need at least one player");
    const Vector a = spec.cost_coeffs;
    const double d = spec.demand_intercept;

    auto demand = [d, kind = spec.demand](const Vector& x) {
        return kind == DemandKind::LinearSum ? d - x.sum() : d - x.squaredNorm();
    };
    CostFn cost = [a, demand](int i, const Vector& x) { return a(i) * x(i) - x(i) * demand(x); };
    PartialGradientFn grad;
    if (spec.demand == DemandKind::LinearSum) {
        grad = [a, demand](int i, const Vector& x) { return Vector::Constant(1, a(i) - demand(x) + x(i)); };
    } else {
        grad = [a, demand](int i, const Vector& x) {
            return Vector::Constant(1, a(i) - demand(x) + 2.0 * x(i) * x(i));
        };
    }

    Game game(std::vector<Index>(static_cast<std::size_t>(n), 1), std::move(cost), std::move(grad));
    game.aggregative_ = std::move(spec);
    return game;
}

Vector arithmetic_costs(int n, double base, double step) {
    Vector a(n);
    for (int i = 0; i < n; ++i) a(i) = base + step * i;
    return a;
}

AggregativeSpec example1_spec(int n_players) {
    return {arithmetic_costs(n_players, 20.0, 10.0), 2200.0, DemandKind::LinearSum};
}

AggregativeSpec example2_spec(int n_players) {
    return {arithmetic_costs(n_players, 10.0, 4.0), 600.0, DemandKind::SquareSum};
}

AggregativeSpec example3_spec(int n_players) {
    return {arithmetic_costs(n_players, 20.0, 40.0), 1200.0, DemandKind::LinearSum};
}

Vector pseudo_gradient(const Game& game, const Vector& x) {
    require_dim(x.size(), game.total_dim(), "pseudo_gradient");
    Vector f(game.total_dim());
    for (int i = 0; i < game.n_players(); ++i) {
        f.segment(game.offset(i), game.dim(i)) = game.partial_gradient(i, x);
    }
    return f;
}

SelectionOps::SelectionOps(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("SelectionOps: need at least one player");
    for (Index d : dims_) {
        if (d <= 0) throw std::invalid_argument("SelectionOps: action dimensions must be positive");
        action_dim_ += d;
    }
    const Index n = action_dim_;
    action_idx_.reserve(static_cast<std::size_t>(n));
    estimate_idx_.reserve(static_cast<std::size_t>(estimate_dim()));
    Index offset = 0;
    for (int i = 0; i < n_players(); ++i) {
        const Index di = dims_[static_cast<std::size_t>(i)];
        for (Index k = 0; k < n; ++k) {
            const Index pos = i * n + k;
            if (k >= offset && k < offset + di) {
                action_idx_.push_back(pos);
            } else {
                estimate_idx_.push_back(pos);
            }
        }
        offset += di;
    }
}

Vector SelectionOps::extract_actions(const Vector& x_aug) const {
    require_dim(x_aug.size(), augmented_dim(), "extract_actions");
    return x_aug(action_idx_);
}

Vector SelectionOps::extract_estimates(const Vector& x_aug) const {
    require_dim(x_aug.size(), augmented_dim(), "extract_estimates");
    return x_aug(estimate_idx_);
}

Vector SelectionOps::embed_actions(const Vector& x) const {
    require_dim(x.size(), action_dim_, "embed_actions");
    Vector out = Vector::Zero(augmented_dim());
    out(action_idx_) = x;
    return out;
}

Vector SelectionOps::embed_estimates(const Vector& z) const {
    require_dim(z.size(), estimate_dim(), "embed_estimates");
    Vector out = Vector::Zero(augmented_dim());
    out(estimate_idx_) = z;
    return out;
}

Vector SelectionOps::assemble(const Vector& x, const Vector& z) const {
    require_dim(x.size(), action_dim_, "assemble (actions)");
    require_dim(z.size(), estimate_dim(), "assemble (estimates)");
    Vector out(augmented_dim());
    out(action_idx_) = x;
    out(estimate_idx_) = z;
    return out;
}

Vector SelectionOps::consensus(const Vector& x) const {
    require_dim(x.size(), action_dim_, "consensus");
    return x.replicate(n_players(), 1);
}

Vector extended_pseudo_gradient(const Game& game, const Vector& x_aug) {
    const Index n = game.total_dim();
    require_dim(x_aug.size(), n * game.n_players(), "extended_pseudo_gradient");
    Vector f(n);
    Vector estimate(n);
    for (int i = 0; i < game.n_players(); ++i) {
        estimate = x_aug.segment(i * n, n);
        f.segment(game.offset(i), game.dim(i)) = game.partial_gradient(i, estimate);
    }
    return f;
}

namespace {

void require_sampling_box(const BoxSet& domain, int n_samples, const char* who) {
    if (n_samples < 2) throw std::invalid_argument(std::string(who) + ": need at least 2 sample pairs");
    if (!domain.is_bounded()) throw std::invalid_argument(std::string(who) + ": sampling box must be bounded");
    if (!((domain.hi() - domain.lo()).array() > 0.0).any()) {
        throw std::invalid_argument(std::string(who) + ": sampling box is degenerate");
    }
}

Vector sample_point(Rng& rng, const BoxSet& box) {
    Vector x(box.dim());
    for (Index k = 0; k < x.size(); ++k) x(k) = uniform(rng, box.lo()(k), box.hi()(k));
    return x;
}

template <class PairFn>
void for_each_pair(const VectorField& field, const BoxSet& domain, int n_samples, std::uint64_t seed,
                   PairFn&& visit) {
    Rng rng(seed);
    for (int s = 0; s < n_samples; ++s) {
        const Vector x = sample_point(rng, domain);
        const Vector y = sample_point(rng, domain);
        const Vector dx = x - y;
        const double dx2 = dx.squaredNorm();
        if (dx2 == 0.0) continue;
        visit(dx, dx2, Vector(field(x) - field(y)));
    }
}

}  // namespace

double estimate_monotonicity(const VectorField& field, const BoxSet& domain, int n_samples, std::uint64_t seed) {
    require_sampling_box(domain, n_samples, "estimate_monotonicity");
    double mu = std::numeric_limits<double>::infinity();
    for_each_pair(field, domain, n_samples, seed, [&](const Vector& dx, double dx2, const Vector& df) {
        require_dim(df.size(), dx.size(), "estimate_monotonicity (field must map the box's space into itself)");
        mu = std::min(mu, dx.dot(df) / dx2);
    });
    return mu;
}

double estimate_lipschitz(const VectorField& field, const BoxSet& domain, int n_samples, std::uint64_t seed) {
    require_sampling_box(domain, n_samples, "estimate_lipschitz");
    double theta = 0.0;
    for_each_pair(field, domain, n_samples, seed, [&](const Vector&, double dx2, const Vector& df) {
        theta = std::max(theta, df.norm() / std::sqrt(dx2));
    });
    return theta;
}

}  // namespace nashflow
