#pragma once

// Vector fields of the NE-seeking dynamics. Perfect-information fields act on
// the action profile x ∈ R^n; augmented fields act on the stacked estimates
// x_aug ∈ R^{Nn}.

#include "nashflow/game.hpp"
#include "nashflow/geometry.hpp"
#include "nashflow/graph.hpp"
#include "nashflow/types.hpp"

#include <optional>
#include <string_view>

namespace nashflow {

enum class Variant {
    PerfectInfo,
    Augmented,
    AugmentedEps,
    ProjectedPerfect,
    ProjectedAugmented,
    ProjectedAugmentedEps,
};

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
/// Accepts the kebab-case names ("perfect-info", "projected-augmented-eps", ...).
[[nodiscard]] std::optional<Variant> parse_variant(std::string_view name) noexcept;

[[nodiscard]] constexpr bool is_augmented(Variant v) noexcept {
    return v != Variant::PerfectInfo && v != Variant::ProjectedPerfect;
}
[[nodiscard]] constexpr bool is_projected(Variant v) noexcept {
    return v == Variant::ProjectedPerfect || v == Variant::ProjectedAugmented || v == Variant::ProjectedAugmentedEps;
}

/// Where the 1/ε gain enters the action row. The unprojected two-timescale
/// system scales only the estimate rows; the projected one also scales the
/// Laplacian correction inside the action projection.
enum class ActionGain {
    Unit,    ///< ẋ_i = -∇_i J_i - R_i Σ(x^i - x^j)
    Scaled,  ///< ẋ_i = -∇_i J_i - (1/ε) R_i Σ(x^i - x^j)
};

[[nodiscard]] std::string_view to_string(ActionGain g) noexcept;
[[nodiscard]] std::optional<ActionGain> parse_action_gain(std::string_view name) noexcept;

struct DynamicsSpec {
    Variant variant = Variant::PerfectInfo;
    Game game;
    std::optional<LaplacianInfo> laplacian;  ///< required for augmented variants
    std::optional<BoxSet> box;               ///< action-space box, required for projected variants
    double eps_inv = 1.0;                    ///< the gain 1/ε
    /// Defaults by variant when unset: Unit for AugmentedEps, Scaled for ProjectedAugmentedEps.
    std::optional<ActionGain> action_gain;

    /// Throws std::invalid_argument on missing graph/box, bad gain or size mismatch.
    void validate() const;
    [[nodiscard]] ActionGain effective_action_gain() const noexcept;
    [[nodiscard]] double effective_eps_inv() const noexcept;
    /// Dimension of the state the field acts on.
    [[nodiscard]] Index state_dim() const noexcept;
};

/// -F(x).
[[nodiscard]] Vector field_perfect(const Game& game, const Vector& x);

/// -Rᵀ F(x_aug) - (L ⊗ I_n) x_aug, stacked form.
[[nodiscard]] Vector field_augmented(const Game& game, const LaplacianInfo& L, const Vector& x_aug);

/// Same field assembled per player from the action/estimate split:
/// ẋ_i = -∇_i J_i(x^i) - R_i Σ_j (x^i - x^j),  ẋ^i_{-i} = -S_i Σ_j (x^i - x^j).
[[nodiscard]] Vector field_augmented_split(const Game& game, const LaplacianInfo& L, const Vector& x_aug);

/// Estimate rows scaled by eps_inv; the action row per `gain`.
[[nodiscard]] Vector field_augmented_eps(const Game& game, const LaplacianInfo& L, const Vector& x_aug,
                                         double eps_inv, ActionGain gain = ActionGain::Unit);

/// Π_Ω(x, -F(x)).
[[nodiscard]] Vector field_projected_perfect(const Game& game, const BoxSet& box, const Vector& x);

/// ẋ_i = Π_{Ω_i}(x_i, -∇_i J_i(x^i) - g R_i Σ_j (x^i - x^j)) with g = eps_inv (Scaled) or 1 (Unit);
/// ẋ^i_{-i} = -eps_inv S_i Σ_j (x^i - x^j). `box` covers the action profile.
[[nodiscard]] Vector field_projected_augmented(const Game& game, const LaplacianInfo& L, const BoxSet& box,
                                               const Vector& x_aug, double eps_inv = 1.0,
                                               ActionGain gain = ActionGain::Scaled);

/// Dispatch on spec.variant.
[[nodiscard]] Vector evaluate_field(const DynamicsSpec& spec, const Vector& state);

/// The field as a closure over a copy of the spec.
[[nodiscard]] VectorField make_field(DynamicsSpec spec);

}  // namespace nashflow
