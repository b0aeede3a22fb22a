#include "nashflow/experiment.hpp"

#include "nashflow/random.hpp"

#include <fmt/format.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace nashflow {

namespace {

BoxSet range_box(Index dim, std::pair<double, double> r) {
    // Sampling needs a box with volume; widen a degenerate range.
    if (r.first == r.second) {
        r.first -= 1.0;
        r.second += 1.0;
    }
    return BoxSet::uniform(dim, r.first, r.second);
}

/// Region the constants of F are sampled over: the action box when bounded,
/// the initial action range otherwise.
BoxSet action_region(const ExperimentConfig& cfg, Index dim, const std::optional<BoxSet>& box) {
    if (box && box->is_bounded()) return *box;
    return range_box(dim, cfg.initial.actions);
}

BoxSet augmented_region(const ExperimentConfig& cfg, const SelectionOps& layout, const BoxSet& actions) {
    const auto est_range = cfg.initial.estimates.value_or(cfg.initial.actions);
    const BoxSet est = range_box(layout.estimate_dim(), est_range);
    Vector lo = layout.assemble(actions.lo(), est.lo());
    Vector hi = layout.assemble(actions.hi(), est.hi());
    return BoxSet(std::move(lo), std::move(hi));
}

/// Exact constants of an affine field from its Jacobian (columns Φ(e_k) - Φ(0)):
/// mu = λ_min of the symmetric part, theta = the largest singular value.
std::pair<double, double> affine_constants(const VectorField& field, Index dim) {
    const Vector origin = Vector::Zero(dim);
    const Vector f0 = field(origin);
    require_dim(f0.size(), dim, "affine_constants");
    Matrix J(f0.size(), dim);
    Vector e = origin;
    for (Index k = 0; k < dim; ++k) {
        e(k) = 1.0;
        J.col(k) = field(e) - f0;
        e(k) = 0.0;
    }
    const Matrix sym = 0.5 * (J + J.transpose());
    const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const Matrix gram = J.transpose() * J;
    const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    return {mu, std::sqrt(std::max(top, 0.0))};
}

bool linear_demand(const Game& game) {
    return game.aggregative() && game.aggregative()->demand == DemandKind::LinearSum;
}

}  // namespace

Vector initial_state(const ExperimentConfig& cfg, const Game& game) {
    Rng rng(cfg.initial.seed);
    const auto [a_lo, a_hi] = cfg.initial.actions;
    if (!is_augmented(cfg.variant)) {
        Vector x(game.total_dim());
        for (Index k = 0; k < x.size(); ++k) x(k) = uniform(rng, a_lo, a_hi);
        return x;
    }
    const auto [e_lo, e_hi] = cfg.initial.estimates.value_or(cfg.initial.actions);
    const SelectionOps layout(game);
    Vector x(layout.augmented_dim());
    for (int i = 0; i < game.n_players(); ++i) {
        for (Index k = 0; k < layout.action_dim(); ++k) {
            const bool own = k >= game.offset(i) && k < game.offset(i) + game.dim(i);
            x(i * layout.action_dim() + k) = own ? uniform(rng, a_lo, a_hi) : uniform(rng, e_lo, e_hi);
        }
    }
    return x;
}

NESolution reference_equilibrium(const ExperimentConfig& cfg, const Game& game, const std::optional<BoxSet>& box) {
    if (!box && linear_demand(game)) return solve_ne_linear(game);
    ProjectionSolveOptions opts;
    opts.tol = 1e-11;
    const double mid = 0.5 * (cfg.initial.actions.first + cfg.initial.actions.second);
    opts.start = Vector::Constant(game.total_dim(), mid);
    return solve_ne_projected(game, box ? *box : BoxSet::unbounded(game.total_dim()), opts);
}

Experiment build_experiment(const ExperimentConfig& cfg) {
    const auto diagnostics = validate_experiment(cfg);
    if (!diagnostics.empty()) {
        std::string msg = "invalid config";
        for (const auto& d : diagnostics) msg += "\n  " + d.to_string();
        throw ConfigError(diagnostics.front().line, msg);
    }

    Game game = build_game(cfg);
    const int n_players = game.n_players();
    const bool augmented = is_augmented(cfg.variant);
    const std::optional<BoxSet> box = build_box(cfg, n_players);

    std::optional<CommGraph> graph;
    std::optional<LaplacianInfo> laplacian;
    if (augmented) {
        graph = build_graph(cfg, n_players);
        laplacian = build_laplacian(*graph);
    }

    Experiment ex{cfg,
                  DynamicsSpec{cfg.variant, game, laplacian, box, cfg.eps_inv, cfg.action_gain},
                  graph,
                  initial_state(cfg, game),
                  reference_equilibrium(cfg, game, box),
                  0.0, 0.0, "", 0.0, 0.0, "", {}, std::nullopt, ""};
    ex.spec.validate();

    // F of a linear-demand game is x -> (I + 1 1ᵀ) x + (a - D): eigenvalues 1 and N + 1.
    const BoxSet region = action_region(cfg, game.total_dim(), box);
    if (linear_demand(game)) {
        ex.mu_f = 1.0;
        ex.theta_f = n_players + 1.0;
        ex.f_constants_source = "analytic";
    } else {
        const VectorField f = [&game](const Vector& x) { return pseudo_gradient(game, x); };
        ex.mu_f = estimate_monotonicity(f, region);
        ex.theta_f = estimate_lipschitz(f, region);
        ex.f_constants_source = "sampled";
    }

    if (!augmented) {
        ex.bounds_note = "no communication graph (perfect-information variant)";
        return ex;
    }
    const SelectionOps layout(game);
    // Rᵀ F(x_aug): the extended pseudo-gradient placed on the action coordinates.
    const VectorField ext = [&game, &layout](const Vector& x) {
        return layout.embed_actions(extended_pseudo_gradient(game, x));
    };
    if (linear_demand(game)) {
        std::tie(ex.mu_extended, ex.theta_extended) = affine_constants(ext, layout.augmented_dim());
        ex.extended_constants_source = "jacobian";
    } else {
        const BoxSet aug_region = augmented_region(cfg, layout, region);
        ex.mu_extended = estimate_monotonicity(ext, aug_region);
        ex.theta_extended = estimate_lipschitz(ext, aug_region);
        ex.extended_constants_source = "sampled";
    }
    ex.constants = {ex.mu_f, ex.theta_extended,
                    "mu: F (" + ex.f_constants_source + "); theta: extended F (" + ex.extended_constants_source + ")"};
    if (ex.constants.mu > 0.0 && ex.constants.theta > 0.0) {
        ex.bounds = bound_report(ex.constants, *laplacian, n_players, ex.spec.effective_eps_inv());
    } else {
        ex.bounds_note = fmt::format("F is not strongly monotone on the sampled region (mu = {:.6g})", ex.mu_f);
    }
    return ex;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const DynamicsSpec& spec) {
    const bool augmented = is_augmented(spec.variant);
    const Index n = spec.game.total_dim();
    fmt::memory_buffer buf;
    auto out_it = std::back_inserter(buf);
    fmt::format_to(out_it, "t");
    if (augmented) {
        for (int i = 1; i <= spec.game.n_players(); ++i)
            for (Index j = 1; j <= n; ++j) fmt::format_to(out_it, ",x_{}_{}", i, j);
        fmt::format_to(out_it, ",consensus_err");
    } else {
        for (Index j = 1; j <= n; ++j) fmt::format_to(out_it, ",x_{}", j);
    }
    fmt::format_to(out_it, ",ne_dist,storage\n");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t r = 0; r < traj.states.size(); ++r) {
        fmt::format_to(out_it, "{}", traj.times[r]);
        for (const double v : traj.states[r]) fmt::format_to(out_it, ",{}", v);
        const Diagnostics d = r < traj.diagnostics.size() ? traj.diagnostics[r] : Diagnostics{};
        if (augmented) fmt::format_to(out_it, ",{}", d.consensus_error);
        fmt::format_to(out_it, ",{},{}\n", std::isnan(d.ne_distance) ? nan : d.ne_distance, d.storage);
        if (buf.size() > (1u << 20)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace {

nlohmann::json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json to_json(const BoundReport& b) {
    return {
        {"lambda2", b.lambda2},
        {"lambdaN", b.lambdaN},
        {"mu", b.mu},
        {"theta", b.theta},
        {"constants_source", b.constants_source},
        {"n_players", b.n_players},
        {"d_star", b.d_star},
        {"eps_inv", b.eps_inv},
        {"asymptotic", {{"threshold", b.asymptotic_threshold}, {"met", b.asymptotic_met}}},
        {"exponential", {{"threshold", b.exponential_threshold}, {"met", b.exponential_met}}},
        {"eps_scaled", {{"threshold", b.eps_scaled_threshold}, {"met", b.eps_scaled_met}}},
        {"eps_star", b.eps_star},
        {"eps_star_degree_bound", b.eps_star_degree},
        {"eps_below_eps_star", b.eps_below_eps_star},
        {"two_timescale_statement_form",
         {{"threshold", b.two_timescale_threshold_statement}, {"met", b.two_timescale_statement_met}}},
        {"two_timescale_proof_form",
         {{"threshold", b.two_timescale_threshold_proof}, {"met", b.two_timescale_proof_met}}},
    };
}

}  // namespace

std::string summary_json(const Experiment& ex, const RunResult& result) {
    using nlohmann::json;
    const auto& cfg = ex.config;
    const auto& game = ex.spec.game;
    const auto& agg = game.aggregative();

    json j;
    j["name"] = cfg.name;
    j["description"] = cfg.description;
    j["variant"] = std::string(to_string(cfg.variant));
    j["eps_inv"] = ex.spec.effective_eps_inv();
    if (cfg.variant == Variant::AugmentedEps || cfg.variant == Variant::ProjectedAugmentedEps) {
        j["action_gain"] = std::string(to_string(ex.spec.effective_action_gain()));
    }
    j["game"] = {{"kind", cfg.game.kind}, {"n_players", game.n_players()}};
    if (agg) {
        j["game"]["cost_coeffs"] = to_json(agg->cost_coeffs);
        j["game"]["demand_intercept"] = agg->demand_intercept;
        j["game"]["demand"] = agg->demand == DemandKind::LinearSum ? "linear" : "square-sum";
    }
    if (ex.spec.box) j["constraints"] = {{"lo", to_json(ex.spec.box->lo())}, {"hi", to_json(ex.spec.box->hi())}};
    if (ex.graph) {
        const auto& L = *ex.spec.laplacian;
        j["graph"] = {{"kind", std::string(to_string(cfg.graph.kind))},
                      {"n_edges", ex.graph->edges().size()},
                      {"lambda2", L.lambda2},
                      {"lambdaN", L.lambdaN},
                      {"d_star", L.d_star}};
        if (cfg.graph.kind == GraphKind::Random) {
            j["graph"]["edge_prob"] = cfg.graph.edge_prob;
            j["graph"]["seed"] = cfg.graph.seed;
        }
    }
    j["integrator"] = {{"scheme", std::string(to_string(cfg.integrator.scheme))},
                       {"dt", cfg.integrator.dt},
                       {"t_end", cfg.integrator.t_end},
                       {"record_every", cfg.integrator.record_every}};
    j["oracle"] = {{"method", std::string(to_string(ex.oracle.method))},
                   {"x_star", to_json(ex.oracle.x_star)},
                   {"residual", ex.oracle.residual},
                   {"tolerance", ex.oracle.tolerance},
                   {"converged", ex.oracle.converged},
                   {"iterations", ex.oracle.iterations}};
    j["constants"] = {{"F", {{"mu", ex.mu_f}, {"theta", ex.theta_f}, {"source", ex.f_constants_source}}}};
    if (ex.graph) {
        j["constants"]["extended_F"] = {{"mu", ex.mu_extended}, {"theta", ex.theta_extended}, {"source", ex.extended_constants_source}};
    }
    if (ex.bounds) {
        j["bounds"] = to_json(*ex.bounds);
    } else {
        j["bounds"] = nullptr;
        j["bounds_note"] = ex.bounds_note;
    }

    const auto& s = result.summary;
    const auto& traj = result.trajectory;
    json r = {{"termination", std::string(to_string(s.termination))},
              {"diverged", s.diverged},
              {"final_time", s.final_time},
              {"steps", traj.steps},
              {"records", traj.states.size()},
              {"final_ne_distance", s.final_ne_distance},
              {"final_residual", s.final_residual},
              {"storage_max_increase_per_record", s.storage_max_increase},
              {"storage_max_increase_per_step", result.storage_step_increase},
              {"exit_code", result.exit_code}};
    if (ex.graph) r["final_consensus_error"] = s.final_consensus_error;
    if (s.diverged) r["divergence_time"] = traj.divergence_time;
    if (cfg.stop_residual) {
        r["stop_residual"] = *cfg.stop_residual;
        r["met_threshold"] = s.termination == Termination::MetThreshold;
    }
    if (s.rate) {
        r["storage_rate"] = {{"rate", s.rate->rate}, {"r_squared", s.rate->r_squared}, {"accepted", s.rate->accepted}};
    }
    const Vector& last = traj.final_state();
    r["final_actions"] = to_json(ex.graph ? SelectionOps(game).extract_actions(last) : last);
    j["result"] = std::move(r);
    return j.dump(2) + "\n";
}

RunResult run_experiment(const Experiment& ex, const std::optional<std::filesystem::path>& out_dir) {
    const auto& cfg = ex.config;
    const Vector& x_star = ex.oracle.x_star;

    RunResult result;
    double prev_storage = storage_value(ex.x0, x_star);
    const StepObserver observer = [&](double, const Vector& x) {
        const double v = storage_value(x, x_star);
        result.storage_step_increase = std::max(result.storage_step_increase, v - prev_storage);
        prev_storage = v;
    };
    const Reference ref{x_star};
    result.trajectory = cfg.stop_residual ? integrate_until(ex.spec, ex.x0, cfg.integrator, *cfg.stop_residual, ref, observer)
                                          : integrate(ex.spec, ex.x0, cfg.integrator, ref, observer);

    std::optional<SelectionOps> layout;
    if (is_augmented(cfg.variant)) layout.emplace(ex.spec.game);
    result.summary = convergence_summary(result.trajectory, x_star, layout);

    if (result.summary.diverged) {
        result.exit_code = kExitDiverged;
    } else if (cfg.stop_residual && result.summary.termination != Termination::MetThreshold) {
        result.exit_code = kExitThresholdMissed;
    } else {
        result.exit_code = kExitOk;
    }

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        result.csv_path = *out_dir / cfg.output.csv;
        result.summary_path = *out_dir / cfg.output.summary;
        std::ofstream csv(result.csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + result.csv_path.string());
        write_trajectory_csv(csv, result.trajectory, ex.spec);
        std::ofstream js(result.summary_path, std::ios::binary);
        if (!js) throw std::runtime_error("cannot write " + result.summary_path.string());
        js << summary_json(ex, result);
    }
    return result;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
    return run_experiment(build_experiment(cfg), out_dir);
}

std::vector<ExampleEntry> list_examples(const std::filesystem::path& dir) {
    std::vector<ExampleEntry> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".toml") continue;
        ExampleEntry e{entry.path().stem().string(), "", entry.path()};
        try {
            e.description = load_experiment(entry.path()).description;
        } catch (const ConfigError& err) {
            e.description = std::string("(unreadable: ") + err.what() + ")";
        }
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

std::optional<std::filesystem::path> resolve_config(const std::string& name_or_path, const std::filesystem::path& dir) {
    const std::filesystem::path p(name_or_path);
    if (std::filesystem::is_regular_file(p)) return p;
    for (const auto& candidate : {dir / name_or_path, dir / (name_or_path + ".toml")}) {
        if (std::filesystem::is_regular_file(candidate)) return candidate;
    }
    return std::nullopt;
}

}  // namespace nashflow
