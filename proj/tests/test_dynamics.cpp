#include "nashflow/dynamics.hpp"
#include "nashflow/solve.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace nashflow;

namespace {

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

/// -Rᵀ F_ext(x) - (L ⊗ I) x with dense matrices.
Vector dense_augmented(const Game& g, const LaplacianInfo& L, const Vector& x) {
    const int n = g.n_players();
    return -oracle::selection_R(n).transpose() * extended_pseudo_gradient(g, x) - oracle::kron_identity(L.matrix, n) * x;
}

}  // namespace

TEST_CASE("variant names round-trip") {
    for (Variant v : {Variant::PerfectInfo, Variant::Augmented, Variant::AugmentedEps, Variant::ProjectedPerfect,
                      Variant::ProjectedAugmented, Variant::ProjectedAugmentedEps}) {
        CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK_FALSE(parse_variant("gradient"));
    CHECK(parse_action_gain("scaled") == ActionGain::Scaled);
    CHECK_FALSE(parse_action_gain("double"));
}

TEST_CASE("stacked, split and dense augmented fields agree") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + trial % 8;
        const Game g = make_aggregative_game(trial % 2 ? example1_spec(n) : example2_spec(n));
        const LaplacianInfo L = build_laplacian(make_random_connected(n, 0.5, static_cast<std::uint64_t>(trial + 1)));
        const Vector x = oracle::random_vector(rng, n * n, -20, 20);
        const Vector stacked = field_augmented(g, L, x);
        const double scale = std::max(1.0, max_abs(stacked));
        CHECK(max_abs(stacked - field_augmented_split(g, L, x)) <= 1e-12 * scale);
        CHECK(max_abs(stacked - dense_augmented(g, L, x)) <= 1e-12 * scale);
    }
}

TEST_CASE("two-timescale field scales the estimate rows") {
    std::mt19937_64 rng(9);
    const int n = 6;
    const Game g = make_aggregative_game(example2_spec(n));
    const LaplacianInfo L = build_laplacian(make_cycle(n));
    const SelectionOps ops(g);
    const Vector lx_dummy = Vector::Zero(n * n);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = oracle::random_vector(rng, n * n, 0, 15);
        const double k = 200.0;
        const Vector base = field_augmented(g, L, x);
        const Vector lap = augmented_laplacian_apply(L, x, n);
        const Vector unit = field_augmented_eps(g, L, x, k, ActionGain::Unit);
        const Vector scaled = field_augmented_eps(g, L, x, k, ActionGain::Scaled);
        const double tol = 1e-12 * std::max(1.0, k * max_abs(base));
        CHECK(max_abs(ops.extract_estimates(unit) - k * ops.extract_estimates(base)) <= tol);
        CHECK(max_abs(ops.extract_actions(unit) - ops.extract_actions(base)) <= tol);
        CHECK(max_abs(ops.extract_estimates(scaled) - k * ops.extract_estimates(base)) <= tol);
        const Vector expected_actions = -extended_pseudo_gradient(g, x) - k * ops.extract_actions(lap);
        CHECK(max_abs(ops.extract_actions(scaled) - expected_actions) <= tol);
        CHECK(max_abs(field_augmented_eps(g, L, x, 1.0) - base) == 0.0);
    }
    CHECK_THROWS(field_augmented_eps(g, L, lx_dummy, 0.0));
}

TEST_CASE("augmented fields vanish at 1 ⊗ x* for the unconstrained examples") {
    const Game g1 = make_aggregative_game(example1_spec());
    const SelectionOps ops1(g1);
    const Vector x1 = oracle::example1_ne();
    for (const CommGraph& graph : {make_cycle(20), make_random_connected(20, 0.3, 7)}) {
        const LaplacianInfo L = build_laplacian(graph);
        CHECK(max_abs(field_augmented(g1, L, ops1.consensus(x1))) <= 1e-9);
        CHECK(max_abs(field_augmented_eps(g1, L, ops1.consensus(x1), 200.0)) <= 1e-9);
    }
    const AggregativeSpec s2 = example2_spec();
    const Game g2 = make_aggregative_game(s2);
    const Vector x2 = oracle::square_sum_ne(s2.cost_coeffs, s2.demand_intercept);
    const LaplacianInfo L8 = build_laplacian(make_cycle(8));
    CHECK(max_abs(field_perfect(g2, x2)) <= 1e-9);
    CHECK(max_abs(field_augmented(g2, L8, SelectionOps(g2).consensus(x2))) <= 1e-9);
}

TEST_CASE("projected fields vanish at the boundary NE of Example 3") {
    const Game g = make_aggregative_game(example3_spec());
    const BoxSet box = BoxSet::uniform(20, 0.0, 200.0);
    const NESolution ne = solve_ne_projected(g, box);
    REQUIRE(ne.converged);
    const Vector x_aug = SelectionOps(g).consensus(ne.x_star);
    CHECK(max_abs(field_projected_perfect(g, box, ne.x_star)) <= 1e-9);
    for (const CommGraph& graph : {make_cycle(20), make_random_connected(20, 0.3, 7)}) {
        const LaplacianInfo L = build_laplacian(graph);
        CHECK(max_abs(field_projected_augmented(g, L, box, x_aug)) <= 1e-9);
        CHECK(max_abs(field_projected_augmented(g, L, box, x_aug, 200.0)) <= 1e-9);
    }
    // The unprojected field does not vanish there: the bounds are active.
    CHECK(max_abs(field_augmented(g, build_laplacian(make_cycle(20)), x_aug)) > 1.0);
}

TEST_CASE("projected fields reduce to the smooth ones in the interior") {
    std::mt19937_64 rng(12);
    const int n = 5;
    const Game g = make_aggregative_game(example1_spec(n));
    const LaplacianInfo L = build_laplacian(make_cycle(n));
    const BoxSet box = BoxSet::uniform(n, -1e6, 1e6);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = oracle::random_vector(rng, n * n, 0, 100);
        CHECK(max_abs(field_projected_augmented(g, L, box, x) - field_augmented(g, L, x)) == 0.0);
        CHECK(max_abs(field_projected_augmented(g, L, box, x, 7.0, ActionGain::Scaled) -
                      field_augmented_eps(g, L, x, 7.0, ActionGain::Scaled)) <= 1e-12 * max_abs(field_augmented_eps(g, L, x, 7.0, ActionGain::Scaled)));
        const Vector a = x.head(n);
        CHECK(max_abs(field_projected_perfect(g, box, a) - field_perfect(g, a)) == 0.0);
    }
    const Vector outside = Vector::Constant(n * n, 2e6);
    CHECK_THROWS_AS(field_projected_augmented(g, L, box, outside), std::domain_error);
}

TEST_CASE("projected augmented field keeps feasible directions at active bounds") {
    const Game g = make_aggregative_game(AggregativeSpec{Vector{{20.0, 1500.0}}, 1200.0, DemandKind::LinearSum});
    const LaplacianInfo L = build_laplacian(make_path(2));
    const BoxSet box = BoxSet::uniform(2, 0.0, 200.0);
    const SelectionOps ops(g);
    const Vector x = ops.consensus(Vector{{200.0, 0.0}});
    const Vector actions = ops.extract_actions(field_projected_augmented(g, L, box, x));
    // F_1 = 20 - 1200 + 400 < 0 pushes player 1 above its upper bound: blocked.
    CHECK(actions(0) == 0.0);
    // F_2 = 1500 - 1200 + 200 > 0 pushes player 2 below zero: blocked.
    CHECK(actions(1) == 0.0);
    // Moving the estimates off consensus lets the Laplacian term act on the free side.
    Vector y = x;
    y(ops.action_indices()[1]) = 50.0;
    CHECK(ops.extract_actions(field_projected_augmented(g, L, box, y))(1) < 0.0);
}

TEST_CASE("DynamicsSpec validation and dispatch") {
    const Game g = make_aggregative_game(example1_spec(4));
    DynamicsSpec spec{Variant::Augmented, g, std::nullopt, std::nullopt, 1.0, std::nullopt};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.laplacian = build_laplacian(make_cycle(5));
    CHECK_THROWS_AS(spec.validate(), DimensionError);
    spec.laplacian = build_laplacian(make_cycle(4));
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.state_dim() == 16);

    spec.variant = Variant::ProjectedAugmented;
    spec.box = BoxSet::unbounded(4);
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.box = BoxSet::uniform(4, 0, 200);
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.effective_eps_inv() == 1.0);

    spec.variant = Variant::ProjectedAugmentedEps;
    spec.eps_inv = 50.0;
    CHECK(spec.effective_action_gain() == ActionGain::Scaled);
    spec.variant = Variant::AugmentedEps;
    CHECK(spec.effective_action_gain() == ActionGain::Unit);
    spec.eps_inv = -1.0;
    CHECK_THROWS(spec.validate());

    spec.eps_inv = 3.0;
    const Vector x = Vector::LinSpaced(16, 0, 15);
    CHECK(evaluate_field(spec, x) == field_augmented_eps(g, *spec.laplacian, x, 3.0));
    CHECK(make_field(spec)(x) == evaluate_field(spec, x));
    const DynamicsSpec perfect{Variant::PerfectInfo, g, std::nullopt, std::nullopt, 1.0, std::nullopt};
    CHECK(perfect.state_dim() == 4);
    CHECK(evaluate_field(perfect, x.head(4)) == field_perfect(g, x.head(4)));
}
