#include "nashflow/integrate.hpp"

#include "nashflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nashflow {

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::Euler: return "euler";
        case Scheme::Rk4: return "rk4";
        case Scheme::ProjectedEuler: return "projected-euler";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
    if (name == "euler") return Scheme::Euler;
    if (name == "rk4") return Scheme::Rk4;
    if (name == "projected-euler") return Scheme::ProjectedEuler;
    return std::nullopt;
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrator.dt must be a positive number");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("integrator.t_end must be a positive number");
    }
    if (record_every < 1) throw std::invalid_argument("integrator.record_every must be >= 1");
    if (t_end / dt > 1e10) throw std::invalid_argument("integrator.dt too small for t_end (more than 1e10 steps)");
}

long long IntegratorConfig::n_steps() const { return std::max(1LL, std::llround(t_end / dt)); }

namespace {

bool out_of_bounds(const Vector& x) {
    return !x.allFinite() || x.lpNorm<Eigen::Infinity>() > kDivergenceBound;
}

void clamp_in_place(Vector& x, const StateClamp& clamp) {
    const Vector part = x(clamp.coords);
    x(clamp.coords) = project_point(clamp.box, part);
}

}  // namespace

Trajectory integrate(const VectorField& field, const Vector& x0, const IntegratorConfig& cfg,
                     const IntegrateOptions& options) {
    cfg.validate();
    if (cfg.scheme == Scheme::ProjectedEuler && !options.clamp) {
        throw std::invalid_argument("integrate: projected-euler needs a state clamp");
    }
    if (options.clamp) require_dim(options.clamp->box.dim(), static_cast<Index>(options.clamp->coords.size()),
                                   "integrate clamp");
    if (options.stop_residual && !(*options.stop_residual > 0.0)) {
        throw std::invalid_argument("integrate: stop threshold must be > 0");
    }
    if (options.stop_residual && !options.diagnostics) {
        throw std::invalid_argument("integrate: a stop threshold needs a diagnostics hook");
    }

    Vector x = x0;
    if (cfg.scheme == Scheme::ProjectedEuler) {
        const Vector part = x(options.clamp->coords);
        if (!options.clamp->box.contains(part)) {
            throw std::domain_error("integrate: initial state outside the constraint box");
        }
        clamp_in_place(x, *options.clamp);
    }

    Trajectory traj;
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        if (options.diagnostics) {
            traj.diagnostics.push_back(options.diagnostics(x));
            if (options.stop_residual && traj.diagnostics.back().ne_residual < *options.stop_residual) {
                traj.termination = Termination::MetThreshold;
                return true;
            }
        }
        return false;
    };

    if (record(0.0)) return traj;

    const long long n = cfg.n_steps();
    const double dt = cfg.dt;
    Vector k1, k2, k3, k4;
    for (long long step = 1; step <= n; ++step) {
        switch (cfg.scheme) {
            case Scheme::Euler:
                x += dt * field(x);
                break;
            case Scheme::Rk4:
                k1 = field(x);
                k2 = field(x + 0.5 * dt * k1);
                k3 = field(x + 0.5 * dt * k2);
                k4 = field(x + dt * k3);
                x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                break;
            case Scheme::ProjectedEuler:
                x += dt * field(x);
                clamp_in_place(x, *options.clamp);
                break;
        }
        traj.steps = step;
        const double t = static_cast<double>(step) * dt;
        if (out_of_bounds(x)) {
            traj.termination = Termination::Diverged;
            traj.divergence_time = t;
            return traj;
        }
        if (options.observer) options.observer(t, x);
        if (step % cfg.record_every == 0 || step == n) {
            if (record(t)) return traj;
        }
    }
    return traj;
}

DiagnosticsFn standard_diagnostics(const DynamicsSpec& spec, const Reference& ref) {
    const bool augmented = is_augmented(spec.variant);
    std::optional<BoxSet> box;
    if (is_projected(spec.variant)) box = spec.box;
    std::optional<SelectionOps> layout;
    if (augmented) layout.emplace(spec.game);

    return [game = spec.game, laplacian = spec.laplacian, box, layout, x_star = ref.x_star](const Vector& state) {
        Diagnostics d;
        const Vector actions = layout ? layout->extract_actions(state) : state;
        d.ne_residual = ne_residual(game, box, actions);
        if (layout) {
            const auto ce = consensus_error(state, *laplacian, layout->action_dim());
            d.consensus_error = ce.norm;
            // An augmented state is only at the NE once the estimates agree too.
            d.ne_residual = std::max(d.ne_residual, ce.max_block_deviation);
        }
        if (x_star) {
            d.ne_distance = (actions - *x_star).lpNorm<Eigen::Infinity>();
            d.storage = storage_value(state, *x_star);
        }
        return d;
    };
}

namespace {

IntegrateOptions spec_options(const DynamicsSpec& spec, const Vector& x0, const IntegratorConfig& cfg,
                              const Reference& ref) {
    spec.validate();
    cfg.validate();
    require_dim(x0.size(), spec.state_dim(), "integrate initial state");
    if (ref.x_star) require_dim(ref.x_star->size(), spec.game.total_dim(), "integrate reference x*");

    const bool projected = is_projected(spec.variant);
    if (projected && cfg.scheme != Scheme::ProjectedEuler) {
        throw std::invalid_argument("integrate: projected variant " + std::string(to_string(spec.variant)) +
                                    " requires scheme projected-euler");
    }
    if (!projected && cfg.scheme == Scheme::ProjectedEuler) {
        throw std::invalid_argument("integrate: projected-euler is only for projected variants");
    }

    IntegrateOptions opts;
    if (projected) {
        std::vector<Index> coords;
        if (is_augmented(spec.variant)) {
            coords = SelectionOps(spec.game).action_indices();
        } else {
            coords.resize(static_cast<std::size_t>(spec.game.total_dim()));
            std::iota(coords.begin(), coords.end(), Index{0});
        }
        opts.clamp = StateClamp{*spec.box, std::move(coords)};
    }
    opts.diagnostics = standard_diagnostics(spec, ref);
    return opts;
}

}  // namespace

Trajectory integrate(const DynamicsSpec& spec, const Vector& x0, const IntegratorConfig& cfg, const Reference& ref,
                     const StepObserver& observer) {
    IntegrateOptions opts = spec_options(spec, x0, cfg, ref);
    opts.observer = observer;
    return integrate(make_field(spec), x0, cfg, opts);
}

Trajectory integrate_until(const DynamicsSpec& spec, const Vector& x0, const IntegratorConfig& cfg, double threshold,
                           const Reference& ref, const StepObserver& observer) {
    IntegrateOptions opts = spec_options(spec, x0, cfg, ref);
    opts.observer = observer;
    opts.stop_residual = threshold;
    return integrate(make_field(spec), x0, cfg, opts);
}

}  // namespace nashflow
