#pragma once

#include "nashflow/types.hpp"

#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

namespace nashflow {

/// Per-record diagnostics. Fields that do not apply to a run are NaN.
struct Diagnostics {
    double consensus_error = std::numeric_limits<double>::quiet_NaN();  ///< ‖(L⊗I)x‖₂
    double ne_distance = std::numeric_limits<double>::quiet_NaN();      ///< ‖actions - x*‖∞
    double storage = std::numeric_limits<double>::quiet_NaN();          ///< ½‖x - 1⊗x*‖²
    double ne_residual = std::numeric_limits<double>::quiet_NaN();
};

enum class Termination {
    ReachedEnd,     ///< integrated to t_end
    MetThreshold,   ///< NE residual fell below the stop threshold
    Diverged,       ///< non-finite or |x_k| > divergence bound
};

[[nodiscard]] constexpr std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::ReachedEnd: return "reached-end";
        case Termination::MetThreshold: return "met-threshold";
        case Termination::Diverged: return "diverged";
    }
    return "unknown";
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Diagnostics> diagnostics;  ///< empty when no diagnostics hook was supplied
    Termination termination = Termination::ReachedEnd;
    /// Time at which divergence was detected (NaN otherwise). The offending
    /// state is not recorded; states.back() is the last finite one.
    double divergence_time = std::numeric_limits<double>::quiet_NaN();
    long long steps = 0;

    [[nodiscard]] bool empty() const noexcept { return states.empty(); }
    [[nodiscard]] bool diverged() const noexcept { return termination == Termination::Diverged; }
    [[nodiscard]] const Vector& final_state() const { return states.back(); }
};

}  // namespace nashflow
