#include "nashflow/dynamics.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

namespace nashflow {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 6> kVariantNames{{
    {Variant::PerfectInfo, "perfect-info"},
    {Variant::Augmented, "augmented"},
    {Variant::AugmentedEps, "augmented-eps"},
    {Variant::ProjectedPerfect, "projected-perfect"},
    {Variant::ProjectedAugmented, "projected-augmented"},
    {Variant::ProjectedAugmentedEps, "projected-augmented-eps"},
}};

void require_graph_matches(const Game& game, const LaplacianInfo& L, const char* who) {
    if (L.n_nodes() != game.n_players()) {
        throw DimensionError(std::string(who) + ": graph has " + std::to_string(L.n_nodes()) + " nodes but the game has " +
                             std::to_string(game.n_players()) + " players");
    }
}

void require_positive_gain(double eps_inv, const char* who) {
    if (!(eps_inv > 0.0)) throw std::invalid_argument(std::string(who) + ": eps_inv must be > 0");
}

/// Sum over neighbours of (x^i - x^j) for one block.
Vector neighbour_disagreement(const LaplacianInfo& L, const Vector& x_aug, int i, Index n) {
    const auto xi = x_aug.segment(i * n, n);
    Vector c = Vector::Zero(n);
    for (int j : L.neighbors[static_cast<std::size_t>(i)]) c += xi - x_aug.segment(j * n, n);
    return c;
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
    for (const auto& [variant, name] : kVariantNames)
        if (variant == v) return name;
    return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
    for (const auto& [variant, label] : kVariantNames)
        if (label == name) return variant;
    return std::nullopt;
}

std::string_view to_string(ActionGain g) noexcept { return g == ActionGain::Unit ? "unit" : "scaled"; }

std::optional<ActionGain> parse_action_gain(std::string_view name) noexcept {
    if (name == "unit") return ActionGain::Unit;
    if (name == "scaled") return ActionGain::Scaled;
    return std::nullopt;
}

void DynamicsSpec::validate() const {
    require_positive_gain(eps_inv, "DynamicsSpec");
    if (is_augmented(variant)) {
        if (!laplacian) throw std::invalid_argument("DynamicsSpec: variant " + std::string(to_string(variant)) + " needs a graph");
        require_graph_matches(game, *laplacian, "DynamicsSpec");
    }
    if (is_projected(variant)) {
        if (!box || !box->is_bounded()) {
            throw std::invalid_argument("DynamicsSpec: variant " + std::string(to_string(variant)) +
                                        " needs a bounded action box");
        }
        require_dim(box->dim(), game.total_dim(), "DynamicsSpec box");
    }
}

ActionGain DynamicsSpec::effective_action_gain() const noexcept {
    if (action_gain) return *action_gain;
    return variant == Variant::ProjectedAugmentedEps ? ActionGain::Scaled : ActionGain::Unit;
}

double DynamicsSpec::effective_eps_inv() const noexcept {
    return (variant == Variant::AugmentedEps || variant == Variant::ProjectedAugmentedEps) ? eps_inv : 1.0;
}

Index DynamicsSpec::state_dim() const noexcept {
    const Index n = game.total_dim();
    return is_augmented(variant) ? n * game.n_players() : n;
}

Vector field_perfect(const Game& game, const Vector& x) { return -pseudo_gradient(game, x); }

Vector field_augmented(const Game& game, const LaplacianInfo& L, const Vector& x_aug) {
    require_graph_matches(game, L, "field_augmented");
    const SelectionOps sel(game);
    Vector dx = -augmented_laplacian_apply(L, x_aug, game.total_dim());
    dx(sel.action_indices()) -= extended_pseudo_gradient(game, x_aug);
    return dx;
}

Vector field_augmented_split(const Game& game, const LaplacianInfo& L, const Vector& x_aug) {
    require_graph_matches(game, L, "field_augmented_split");
    const Index n = game.total_dim();
    require_dim(x_aug.size(), n * game.n_players(), "field_augmented_split");
    Vector dx(x_aug.size());
    for (int i = 0; i < game.n_players(); ++i) {
        const Vector c = neighbour_disagreement(L, x_aug, i, n);
        auto out = dx.segment(i * n, n);
        out = -c;  // estimate rows: -S_i Σ(x^i - x^j)
        const Vector xi = x_aug.segment(i * n, n);
        out.segment(game.offset(i), game.dim(i)) -= game.partial_gradient(i, xi);
    }
    return dx;
}

Vector field_augmented_eps(const Game& game, const LaplacianInfo& L, const Vector& x_aug, double eps_inv,
                           ActionGain gain) {
    require_positive_gain(eps_inv, "field_augmented_eps");
    require_graph_matches(game, L, "field_augmented_eps");
    const SelectionOps sel(game);
    const Vector lap = augmented_laplacian_apply(L, x_aug, game.total_dim());
    Vector dx = -eps_inv * lap;
    const double action_gain = gain == ActionGain::Scaled ? eps_inv : 1.0;
    dx(sel.action_indices()) = -extended_pseudo_gradient(game, x_aug) - action_gain * lap(sel.action_indices());
    return dx;
}

Vector field_projected_perfect(const Game& game, const BoxSet& box, const Vector& x) {
    return tangent_projection(box, x, field_perfect(game, x));
}

Vector field_projected_augmented(const Game& game, const LaplacianInfo& L, const BoxSet& box, const Vector& x_aug,
                                 double eps_inv, ActionGain gain) {
    require_dim(box.dim(), game.total_dim(), "field_projected_augmented box");
    const SelectionOps sel(game);
    const Vector actions = sel.extract_actions(x_aug);
    if (!box.contains(actions)) {
        throw std::domain_error("field_projected_augmented: action components outside the box");
    }
    Vector dx = field_augmented_eps(game, L, x_aug, eps_inv, gain);
    dx(sel.action_indices()) = tangent_projection(box, actions, dx(sel.action_indices()));
    return dx;
}

Vector evaluate_field(const DynamicsSpec& spec, const Vector& state) {
    switch (spec.variant) {
        case Variant::PerfectInfo:
            return field_perfect(spec.game, state);
        case Variant::Augmented:
            return field_augmented(spec.game, *spec.laplacian, state);
        case Variant::AugmentedEps:
            return field_augmented_eps(spec.game, *spec.laplacian, state, spec.eps_inv, spec.effective_action_gain());
        case Variant::ProjectedPerfect:
            return field_projected_perfect(spec.game, *spec.box, state);
        case Variant::ProjectedAugmented:
            return field_projected_augmented(spec.game, *spec.laplacian, *spec.box, state, 1.0);
        case Variant::ProjectedAugmentedEps:
            return field_projected_augmented(spec.game, *spec.laplacian, *spec.box, state, spec.eps_inv,
                                             spec.effective_action_gain());
    }
    throw std::logic_error("evaluate_field: unknown variant");
}

VectorField make_field(DynamicsSpec spec) {
    spec.validate();
    return [spec = std::move(spec)](const Vector& state) { return evaluate_field(spec, state); };
}

}  // namespace nashflow
