#pragma once

// Fixed-step explicit integration of the NE-seeking fields.
//
// Projected variants use step-then-clamp (projected Euler): the tangent-cone
// field is discontinuous at the boundary, so higher-order stages buy nothing
// there, and x_{k+1} = P_Ω(x_k + dt f(x_k)) is the standard convergent
// scheme for projected dynamical systems.

#include "nashflow/dynamics.hpp"
#include "nashflow/geometry.hpp"
#include "nashflow/trajectory.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace nashflow {

enum class Scheme { Euler, Rk4, ProjectedEuler };

[[nodiscard]] std::string_view to_string(Scheme s) noexcept;
[[nodiscard]] std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

inline constexpr double kDivergenceBound = 1e12;

struct IntegratorConfig {
    Scheme scheme = Scheme::Rk4;
    double dt = 1e-3;
    double t_end = 20.0;
    int record_every = 1;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    [[nodiscard]] long long n_steps() const;
};

/// Coordinates of the state that projected Euler clamps into `box`
/// (box.dim() == coords.size()). Other coordinates are left free.
struct StateClamp {
    BoxSet box;
    std::vector<Index> coords;
};

/// Computes diagnostics for a recorded state.
using DiagnosticsFn = std::function<Diagnostics(const Vector&)>;

/// Sees every accepted step, recorded or not (t, state after the step).
using StepObserver = std::function<void(double, const Vector&)>;

struct IntegrateOptions {
    std::optional<StateClamp> clamp;  ///< required for ProjectedEuler
    DiagnosticsFn diagnostics;        ///< evaluated at each record
    /// Stop at the first record whose ne_residual is below this value.
    std::optional<double> stop_residual;
    StepObserver observer;
};

/// Low-level driver over an arbitrary field. Records the initial state, every
/// `record_every`-th step and the final state.
[[nodiscard]] Trajectory integrate(const VectorField& field, const Vector& x0, const IntegratorConfig& cfg,
                                   const IntegrateOptions& options = {});

/// Per-run reference for diagnostics; x_star enables NE distance and storage.
struct Reference {
    std::optional<Vector> x_star;
};

/// Integrates a DynamicsSpec with the standard diagnostics (consensus error,
/// NE distance, storage, NE residual). Rejects projected variants unless the
/// scheme is ProjectedEuler, and ProjectedEuler for smooth variants.
[[nodiscard]] Trajectory integrate(const DynamicsSpec& spec, const Vector& x0, const IntegratorConfig& cfg,
                                   const Reference& ref = {}, const StepObserver& observer = {});

/// As integrate, stopping at the first record with NE residual < threshold.
[[nodiscard]] Trajectory integrate_until(const DynamicsSpec& spec, const Vector& x0, const IntegratorConfig& cfg,
                                         double threshold, const Reference& ref = {},
                                         const StepObserver& observer = {});

/// The diagnostics hook `integrate(spec, ...)` installs; exposed for reuse.
[[nodiscard]] DiagnosticsFn standard_diagnostics(const DynamicsSpec& spec, const Reference& ref);

}  // namespace nashflow
