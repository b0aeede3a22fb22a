// Acceptance suite. `acceptance` runs every criterion; `acceptance 3 5` runs a
// subset. Prints one PASS/FAIL line per criterion followed by indented
// details, and exits non-zero if any selected criterion fails.

#include "nashflow/experiment.hpp"
#include "oracles.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace nashflow;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, std::string what) {
        pass = pass && ok;
        details.push_back(fmt::format("[{}] {}", ok ? "ok" : "FAILED", what));
    }
};

struct BundledRun {
    Experiment experiment;
    RunResult result;
    double seconds = 0.0;
};

/// Bundled runs are shared between criteria; each is integrated once.
const BundledRun& bundled(const std::string& name) {
    static std::map<std::string, BundledRun> cache;
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    const auto path = resolve_config(name);
    if (!path) throw std::runtime_error("missing bundled config " + name);
    const auto start = std::chrono::steady_clock::now();
    Experiment ex = build_experiment(load_experiment(*path));
    RunResult r = run_experiment(ex, std::nullopt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cache.emplace(name, BundledRun{std::move(ex), std::move(r), secs}).first->second;
}

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Vector final_actions(const BundledRun& run) {
    const Vector& last = run.result.trajectory.final_state();
    return run.experiment.graph ? SelectionOps(run.experiment.spec.game).extract_actions(last) : last;
}

double final_residual(const BundledRun& run) {
    const Vector actions = final_actions(run);
    const auto& spec = run.experiment.spec;
    std::optional<BoxSet> box;
    if (is_projected(spec.variant)) box = spec.box;
    return ne_residual(spec.game, box, actions);
}

/// Example 2 reference: the limit of perfect-information gradient play.
Vector example2_gradient_play_limit() {
    const Game g = make_aggregative_game(example2_spec());
    const DynamicsSpec perfect{Variant::PerfectInfo, g, std::nullopt, std::nullopt, 1.0, std::nullopt};
    const Trajectory t = integrate_until(perfect, Vector::Constant(8, 7.5), IntegratorConfig{Scheme::Rk4, 1e-3, 100.0, 10},
                                         1e-12);
    return t.final_state();
}

// 1. Example 1 converges over a random graph and the cycle.
Outcome criterion1() {
    Outcome o;
    const Vector x_star = oracle::example1_ne();
    for (const char* name : {"example1_random", "example1_cycle"}) {
        const BundledRun& run = bundled(name);
        const auto& s = run.result.summary;
        const double oracle_gap = max_abs(run.experiment.oracle.x_star - x_star);
        const double dist = max_abs(final_actions(run) - x_star);
        o.check(oracle_gap <= 1e-9, fmt::format("{}: linear-solve NE vs closed form {:.2e} <= 1e-9", name, oracle_gap));
        o.check(!s.diverged, fmt::format("{}: termination {}", name, to_string(s.termination)));
        o.check(dist <= 1e-3, fmt::format("{}: |x(T) - x*|inf = {:.3e} <= 1e-3", name, dist));
        o.check(s.final_consensus_error <= 1e-3,
                fmt::format("{}: consensus error {:.3e} <= 1e-3", name, s.final_consensus_error));
        o.check(run.seconds <= 10.0, fmt::format("{}: runtime {:.2f} s <= 10 s", name, run.seconds));
    }
    return o;
}

// 2. Example 2: random graph converges, cycle with unit gain does not, cycle with 1/eps = 200 does.
Outcome criterion2() {
    Outcome o;
    const Vector limit = example2_gradient_play_limit();
    const Game g = make_aggregative_game(example2_spec());
    ProjectionSolveOptions opts;
    opts.start = Vector::Constant(8, 7.5);
    opts.gamma = default_projection_step(g, BoxSet::uniform(8, 0.0, 20.0));
    const NESolution huge_box = solve_ne_projected(g, BoxSet::uniform(8, -1e6, 1e6), opts);
    const double cross = max_abs(limit - huge_box.x_star);
    o.check(huge_box.converged && cross <= 1e-8,
            fmt::format("gradient-play limit vs projection iteration on [-1e6, 1e6]: {:.2e} <= 1e-8", cross));

    for (const char* name : {"example2_random", "example2_cycle_eps200"}) {
        const BundledRun& run = bundled(name);
        const double res = final_residual(run);
        const double dist = max_abs(final_actions(run) - limit);
        o.check(!run.result.summary.diverged && res <= 1e-3,
                fmt::format("{}: {} with NE residual {:.3e} <= 1e-3", name, to_string(run.result.summary.termination), res));
        o.check(dist <= 1e-3, fmt::format("{}: |x(T) - gradient-play limit|inf = {:.3e} <= 1e-3", name, dist));
    }
    const BundledRun& cycle = bundled("example2_cycle");
    const auto& s = cycle.result.summary;
    const bool failed = s.diverged || !(final_residual(cycle) <= 1e-3);
    o.check(failed, fmt::format("example2_cycle (1/eps = 1): {} at t = {:.3g}, flagged as non-convergent",
                                to_string(s.termination),
                                s.diverged ? cycle.result.trajectory.divergence_time : s.final_time));
    o.check(cycle.result.exit_code == kExitDiverged || cycle.result.exit_code == kExitThresholdMissed,
            fmt::format("example2_cycle: exit code {}", cycle.result.exit_code));
    return o;
}

// 3. Example 3 reaches the boundary NE.
Outcome criterion3() {
    Outcome o;
    const Game g = make_aggregative_game(example3_spec());
    const NESolution ne = solve_ne_projected(g, BoxSet::uniform(20, 0.0, 200.0));
    o.check(ne.converged, fmt::format("projection-iteration oracle converged (residual {:.2e})", ne.residual));
    const auto tabulated = oracle::example3_tabulated();
    for (const char* name : {"example3_random", "example3_cycle"}) {
        const BundledRun& run = bundled(name);
        const Vector x = final_actions(run);
        double head = 0.0;
        for (int i = 0; i < 8; ++i) head = std::max(head, std::abs(x(i) - tabulated[static_cast<std::size_t>(i)]));
        const double tail = x.tail(12).maxCoeff();
        const double gap = max_abs(x - ne.x_star);
        o.check(!run.result.summary.diverged, fmt::format("{}: termination {}", name, to_string(run.result.summary.termination)));
        o.check(head <= 0.1, fmt::format("{}: first eight vs tabulated values, max gap {:.3e} <= 0.1", name, head));
        o.check(tail <= 0.1, fmt::format("{}: players 9..20 max {:.3e} <= 0.1", name, tail));
        o.check(gap <= 1e-6, fmt::format("{}: |x(T) - oracle|inf = {:.3e} <= 1e-6", name, gap));
    }
    return o;
}

// 4. The fields vanish at 1 ⊗ x*.
Outcome criterion4() {
    Outcome o;
    const std::vector<std::pair<std::string, CommGraph>> graphs20 = {{"cycle", make_cycle(20)},
                                                                     {"random", make_random_connected(20, 0.3, 7)}};
    const Game g1 = make_aggregative_game(example1_spec());
    const Vector x1 = SelectionOps(g1).consensus(oracle::example1_ne());
    for (const auto& [label, graph] : graphs20) {
        const double v = max_abs(field_augmented(g1, build_laplacian(graph), x1));
        o.check(v <= 1e-9, fmt::format("example 1, {}: |field_augmented(1 x x*)|inf = {:.2e}", label, v));
    }
    const AggregativeSpec s2 = example2_spec();
    const Game g2 = make_aggregative_game(s2);
    const Vector x2 = SelectionOps(g2).consensus(oracle::square_sum_ne(s2.cost_coeffs, s2.demand_intercept));
    for (const auto& [label, graph] : std::vector<std::pair<std::string, CommGraph>>{
             {"cycle", make_cycle(8)}, {"random", make_random_connected(8, 0.8, 1)}}) {
        const LaplacianInfo L = build_laplacian(graph);
        const double v = max_abs(field_augmented(g2, L, x2));
        const double w = max_abs(field_augmented_eps(g2, L, x2, 200.0));
        o.check(v <= 1e-9 && w <= 1e-9,
                fmt::format("example 2, {}: |field_augmented| = {:.2e}, |eps field, 1/eps = 200| = {:.2e}", label, v, w));
    }
    const Game g3 = make_aggregative_game(example3_spec());
    const BoxSet box = BoxSet::uniform(20, 0.0, 200.0);
    const Vector x3 = SelectionOps(g3).consensus(solve_ne_projected(g3, box).x_star);
    for (const auto& [label, graph] : graphs20) {
        const double v = max_abs(field_projected_augmented(g3, build_laplacian(graph), box, x3));
        o.check(v <= 1e-9, fmt::format("example 3, {}: |field_projected_augmented(1 x x*)|inf = {:.2e}", label, v));
    }
    return o;
}

// 5. V(t) = ½|x - 1 ⊗ x*|² never increases by more than 1e-9 per accepted step.
Outcome criterion5() {
    Outcome o;
    for (const char* name : {"example1_random", "example1_cycle", "example2_random", "example2_cycle_eps200",
                             "example3_random", "example3_cycle"}) {
        const BundledRun& run = bundled(name);
        if (run.result.summary.diverged) {
            o.check(false, fmt::format("{}: expected a converging run", name));
            continue;
        }
        const double inc = run.result.storage_step_increase;
        o.check(inc <= 1e-9, fmt::format("{}: largest one-step increase of V = {:.3e} (slack 1e-9) over {} steps", name,
                                         inc, run.result.trajectory.steps));
    }
    return o;
}

// 6. Operator identities, 200+ random cases each at 1e-12.
Outcome criterion6() {
    Outcome o;
    std::mt19937_64 rng(2024);
    constexpr int kCases = 250;
    constexpr double kTol = 1e-12;

    double rs_worst = 0.0;
    for (int c = 0; c < kCases; ++c) {
        const int n = 2 + c % 12;
        const SelectionOps ops(std::vector<Index>(static_cast<std::size_t>(n), 1));
        const Matrix R = oracle::selection_R(n), S = oracle::selection_S(n);
        const Vector x = oracle::random_vector(rng, n * n, -1, 1);
        const Vector a = oracle::random_vector(rng, n, -1, 1);
        const Vector z = oracle::random_vector(rng, n * (n - 1), -1, 1);
        rs_worst = std::max({rs_worst, max_abs(ops.extract_actions(x) - R * x), max_abs(ops.extract_estimates(x) - S * x),
                             max_abs(ops.extract_actions(ops.embed_actions(a)) - a),
                             max_abs(ops.extract_estimates(ops.embed_estimates(z)) - z),
                             max_abs(ops.extract_actions(ops.embed_estimates(z))),
                             max_abs(ops.embed_actions(ops.extract_actions(x)) +
                                     ops.embed_estimates(ops.extract_estimates(x)) - x)});
    }
    o.check(rs_worst <= kTol, fmt::format("R/S identities vs dense R, S over {} cases: worst {:.2e}", kCases, rs_worst));

    double moreau_worst = 0.0;
    for (int c = 0; c < kCases; ++c) {
        const Index n = 1 + c % 10;
        const BoxSet box = BoxSet::uniform(n, -1.0, 1.0);
        Vector x = oracle::random_vector(rng, n, -1.5, 1.5);
        x = project_point(box, x);
        const Vector v = oracle::random_vector(rng, n, -1, 1);
        const MoreauSplit s = moreau_split(box, x, v);
        moreau_worst = std::max({moreau_worst, std::abs(s.tangent.dot(s.normal)), max_abs(s.tangent + s.normal - v),
                                 max_abs(s.tangent - oracle::tangent_projection_enumerated(box, x, v)),
                                 in_normal_cone(box, x, s.normal) ? 0.0 : 1.0});
    }
    o.check(moreau_worst <= kTol, fmt::format("Moreau split orthogonal, exact, cone-valued over {} cases: worst {:.2e}",
                                              kCases, moreau_worst));

    double lap_worst = 0.0;
    for (int c = 0; c < kCases; ++c) {
        const int n = 3 + c % 15;
        const CommGraph graph = make_random_connected(n, 0.35, static_cast<std::uint64_t>(c + 1));
        const LaplacianInfo L = build_laplacian(graph);
        const Matrix dense = oracle::dense_laplacian(n, graph.edges());
        const Vector eig = oracle::eigen_spectrum(dense);
        const Vector x = oracle::random_vector(rng, n, -1, 1);
        const Vector perp = x.array() - x.mean();
        const double q = x.dot(dense * x);
        const double scale = std::max(1.0, eig(n - 1) * perp.squaredNorm());
        const double below = (eig(1) * perp.squaredNorm() - q) / scale;
        const double above = (q - eig(n - 1) * perp.squaredNorm()) / scale;
        lap_worst = std::max({lap_worst, max_abs(L.matrix - dense), max_abs(dense * Vector::Ones(n)), below, above});
    }
    o.check(lap_worst <= kTol,
            fmt::format("Laplacian L1 = 0 and lambda2|x_perp|^2 <= x'Lx <= lambdaN|x_perp|^2 over {} cases: worst {:.2e}",
                        kCases, lap_worst));

    double ext_worst = 0.0;
    for (int c = 0; c < kCases; ++c) {
        const int n = 2 + c % 10;
        const Game g = make_aggregative_game(c % 3 == 0   ? example1_spec(n)
                                             : c % 3 == 1 ? example2_spec(n)
                                                          : example3_spec(n));
        const Vector x = oracle::random_vector(rng, n, 0, 20);
        const Vector f = pseudo_gradient(g, x);
        const Vector ext = extended_pseudo_gradient(g, SelectionOps(g).consensus(x));
        ext_worst = std::max(ext_worst, max_abs(ext - f) / std::max(1.0, max_abs(f)));
    }
    o.check(ext_worst <= kTol,
            fmt::format("extended F(1 x x) = F(x) over {} cases: worst relative gap {:.2e}", kCases, ext_worst));
    return o;
}

// 7. Step-halving orders on Example 1 gradient play.
Outcome criterion7() {
    Outcome o;
    const Game g = make_aggregative_game(example1_spec());
    const VectorField f = [&g](const Vector& x) { return field_perfect(g, x); };
    const Vector x0 = Vector::LinSpaced(20, 0.0, 19.0);
    auto solve = [&](Scheme s, double dt) {
        return integrate(f, x0, IntegratorConfig{s, dt, 0.5, 1 << 30}).final_state();
    };
    auto order = [&](Scheme s, double dt) {
        const Vector a = solve(s, dt), b = solve(s, dt / 2), c = solve(s, dt / 4);
        return std::log2((a - b).norm() / (b - c).norm());
    };
    const double euler = order(Scheme::Euler, 0.004);
    const double rk4 = order(Scheme::Rk4, 0.02);
    o.check(euler >= 0.9, fmt::format("euler observed order {:.3f} >= 0.9", euler));
    o.check(rk4 >= 3.5, fmt::format("rk4 observed order {:.3f} >= 3.5", rk4));
    return o;
}

// 8. Bound formulas and the two labelled two-timescale thresholds.
Outcome criterion8() {
    Outcome o;
    LaplacianInfo unit;
    unit.lambda2 = 1.0;
    unit.lambdaN = 1.0;
    unit.d_star = 1;
    const BoundReport r1 = bound_report({1.0, 1.0, "unit"}, unit, 1);
    o.check(r1.eps_star == 0.25, fmt::format("eps* at mu = theta = lambda2 = lambdaN = N = 1: {} == 0.25", r1.eps_star));

    const LaplacianInfo cycle = build_laplacian(make_cycle(20));
    const BoundReport r2 = bound_report({1.0, 21.0, "F analytic"}, cycle, 20);
    o.check(r2.asymptotic_threshold == 462.0 && !r2.asymptotic_met,
            fmt::format("example 1 base constants, 20-cycle: threshold {} == 462, lambda2 = {:.4f} not above it",
                        r2.asymptotic_threshold, r2.lambda2));
    o.check(r2.exponential_threshold == 20.0 * 441.0 + 21.0,
            fmt::format("exponential threshold {} == N theta^2/mu + theta = 8841", r2.exponential_threshold));

    LaplacianInfo edge = unit;
    edge.lambda2 = 2.0;
    const BoundReport r3 = bound_report({1.0, 1.0, ""}, edge, 1);
    o.check(!r3.asymptotic_met, "lambda2 exactly at theta^2/mu + theta leaves the flag false (strict)");

    const BoundReport r4 = bound_report({2.0, 3.0, ""}, cycle, 20, 200.0);
    const double shape = (3.0 / 2.0 + 1.0) * (3.0 + 2.0 * cycle.d_star);
    const double statement = std::sqrt(20.0) * shape / 200.0;
    const double proof = 20.0 * std::sqrt(20.0) * shape / 200.0;
    o.check(std::abs(r4.two_timescale_threshold_statement - statement) <= 1e-15 * statement &&
                std::abs(r4.two_timescale_threshold_proof - proof) <= 1e-15 * proof,
            fmt::format("two-timescale thresholds reported separately: statement form {:.6g}, proof form {:.6g}",
                        r4.two_timescale_threshold_statement, r4.two_timescale_threshold_proof));
    const double eps_star = cycle.lambda2 * 2.0 / (20.0 * std::sqrt(20.0) * 5.0 * (3.0 + cycle.lambdaN));
    o.check(std::abs(r4.eps_star - eps_star) <= 1e-15 * eps_star, fmt::format("eps* = {:.6g}", r4.eps_star));

    const BundledRun& run = bundled("example2_cycle_eps200");
    const std::string json = summary_json(run.experiment, run.result);
    const bool both = json.find("two_timescale_statement_form") != std::string::npos &&
                      json.find("two_timescale_proof_form") != std::string::npos;
    o.check(both, "run summaries carry both labelled two-timescale thresholds");
    return o;
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {1, {"Example 1 converges over random and cycle graphs", criterion1}},
    {2, {"Example 2: random converges, cycle diverges at 1/eps = 1, converges at 1/eps = 200", criterion2}},
    {3, {"Example 3 projected dynamics reach the boundary NE", criterion3}},
    {4, {"fields vanish at the consensus NE", criterion4}},
    {5, {"storage function non-increasing along converging runs", criterion5}},
    {6, {"operator identity property suites", criterion6}},
    {7, {"integrator convergence orders", criterion7}},
    {8, {"bound report formulas", criterion8}},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int k = 1; k < argc; ++k) {
        const int c = std::atoi(argv[k]);
        if (!kCriteria.count(c)) {
            fmt::print(stderr, "unknown criterion '{}' (expected 1..8)\n", argv[k]);
            return 2;
        }
        selected.push_back(c);
    }
    if (selected.empty())
        for (const auto& [c, _] : kCriteria) selected.push_back(c);

    bool all = true;
    for (const int c : selected) {
        const auto& [title, run] = kCriteria.at(c);
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.check(false, fmt::format("exception: {}", e.what()));
        }
        all = all && o.pass;
        fmt::print("criterion {}: {}  {}\n", c, o.pass ? "PASS" : "FAIL", title);
        for (const auto& d : o.details) fmt::print("    {}\n", d);
    }
    return all ? 0 : 1;
}
