#pragma once

// Games in strategic form, their pseudo-gradients, and the selection
// operators that split an augmented state into actions and estimates.

#include "nashflow/geometry.hpp"
#include "nashflow/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace nashflow {

/// J_i(x) over the full profile x.
using CostFn = std::function<double(int player, const Vector& profile)>;
/// ∇_i J_i(x), the gradient in player i's own action block (length n_i).
using PartialGradientFn = std::function<Vector(int player, const Vector& profile)>;

enum class DemandKind {
    LinearSum,  ///< f(x) = D - Σ x_j
    SquareSum,  ///< f(x) = D - Σ x_j²
};

/// Cournot-style game with J_i(x) = a_i x_i - x_i f(x), scalar actions.
struct AggregativeSpec {
    Vector cost_coeffs;  ///< a_i
    double demand_intercept = 0.0;
    DemandKind demand = DemandKind::LinearSum;

    [[nodiscard]] int n_players() const noexcept { return static_cast<int>(cost_coeffs.size()); }
};

class Game {
public:
    /// An empty `gradient` selects the central finite-difference fallback.
    Game(std::vector<Index> dims, CostFn cost, PartialGradientFn gradient = {});

    [[nodiscard]] int n_players() const noexcept { return static_cast<int>(dims_.size()); }
    [[nodiscard]] Index total_dim() const noexcept { return total_dim_; }
    [[nodiscard]] Index dim(int player) const { return dims_.at(static_cast<std::size_t>(player)); }
    [[nodiscard]] Index offset(int player) const { return offsets_.at(static_cast<std::size_t>(player)); }
    [[nodiscard]] const std::vector<Index>& dims() const noexcept { return dims_; }

    [[nodiscard]] double cost(int player, const Vector& profile) const;
    [[nodiscard]] Vector partial_gradient(int player, const Vector& profile) const;
    [[nodiscard]] bool has_analytic_gradient() const noexcept { return static_cast<bool>(gradient_); }

    /// Set for games built by make_aggregative_game.
    [[nodiscard]] const std::optional<AggregativeSpec>& aggregative() const noexcept { return aggregative_; }

private:
    friend Game make_aggregative_game(AggregativeSpec spec);

    std::vector<Index> dims_;
    std::vector<Index> offsets_;
    Index total_dim_ = 0;
    CostFn cost_;
    PartialGradientFn gradient_;
    std::optional<AggregativeSpec> aggregative_;
};

[[nodiscard]] Game make_aggregative_game(AggregativeSpec spec);

/// a_i = base + step (i - 1) for i = 1..n.
[[nodiscard]] Vector arithmetic_costs(int n, double base, double step);

[[nodiscard]] AggregativeSpec example1_spec(int n_players = 20);
[[nodiscard]] AggregativeSpec example2_spec(int n_players = 8);
[[nodiscard]] AggregativeSpec example3_spec(int n_players = 20);

/// F(x) = (∇_1 J_1(x), ..., ∇_N J_N(x)).
[[nodiscard]] Vector pseudo_gradient(const Game& game, const Vector& x);

/// Layout of the augmented state: N blocks x^i ∈ R^n, block i holding
/// player i's estimate of the whole profile with its own action in slot i.
/// R extracts the actions x^i_i, S the remaining estimates; both are index maps.
class SelectionOps {
public:
    explicit SelectionOps(std::vector<Index> dims);
    explicit SelectionOps(const Game& game) : SelectionOps(game.dims()) {}

    [[nodiscard]] int n_players() const noexcept { return static_cast<int>(dims_.size()); }
    [[nodiscard]] Index action_dim() const noexcept { return action_dim_; }
    [[nodiscard]] Index augmented_dim() const noexcept { return action_dim_ * n_players(); }
    [[nodiscard]] Index estimate_dim() const noexcept { return augmented_dim() - action_dim_; }

    /// Positions of the action coordinates inside the augmented vector.
    [[nodiscard]] const std::vector<Index>& action_indices() const noexcept { return action_idx_; }
    [[nodiscard]] const std::vector<Index>& estimate_indices() const noexcept { return estimate_idx_; }

    [[nodiscard]] Vector extract_actions(const Vector& x_aug) const;    ///< R x
    [[nodiscard]] Vector extract_estimates(const Vector& x_aug) const;  ///< S x
    [[nodiscard]] Vector embed_actions(const Vector& x) const;          ///< Rᵀ x
    [[nodiscard]] Vector embed_estimates(const Vector& z) const;        ///< Sᵀ z
    [[nodiscard]] Vector assemble(const Vector& x, const Vector& z) const;

    /// 1_N ⊗ x.
    [[nodiscard]] Vector consensus(const Vector& x) const;
    [[nodiscard]] auto block(const Vector& x_aug, int player) const {
        return x_aug.segment(player * action_dim_, action_dim_);
    }
    [[nodiscard]] auto block(Vector& x_aug, int player) const {
        return x_aug.segment(player * action_dim_, action_dim_);
    }

private:
    std::vector<Index> dims_;
    Index action_dim_ = 0;
    std::vector<Index> action_idx_;
    std::vector<Index> estimate_idx_;
};

/// (∇_1 J_1(x^1), ..., ∇_N J_N(x^N)): each partial gradient on that player's own estimate block.
[[nodiscard]] Vector extended_pseudo_gradient(const Game& game, const Vector& x_aug);

inline constexpr int kDefaultSamplePairs = 2000;

/// Sampled min of (x-y)ᵀ(Φ(x)-Φ(y))/‖x-y‖² over uniform pairs in a bounded box.
/// A sample estimate, so it can only overstate the true monotonicity constant.
/// The field must map the box's space into itself (DimensionError otherwise).
[[nodiscard]] double estimate_monotonicity(const VectorField& field, const BoxSet& domain,
                                           int n_samples = kDefaultSamplePairs, std::uint64_t seed = 1);

/// Sampled max of ‖Φ(x)-Φ(y)‖/‖x-y‖; can only understate the true Lipschitz constant.
[[nodiscard]] double estimate_lipschitz(const VectorField& field, const BoxSet& domain,
                                        int n_samples = kDefaultSamplePairs, std::uint64_t seed = 1);

}  // namespace nashflow
