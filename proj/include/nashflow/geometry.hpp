#pragma once

// Box constraint sets and the projections the projected dynamics need:
// the Euclidean projection P_B and the tangent-cone projection Π_B(x, v).

#include "nashflow/types.hpp"

#include <limits>
#include <utility>

namespace nashflow {

/// Active-bound detection tolerance (absolute).
inline constexpr double kBoundaryTolerance = 1e-12;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class BoxSet {
public:
    /// Throws std::invalid_argument unless lo <= hi componentwise (NaN rejected).
    BoxSet(Vector lo, Vector hi);

    [[nodiscard]] static BoxSet unbounded(Index dim);
    [[nodiscard]] static BoxSet uniform(Index dim, double lo, double hi);

    [[nodiscard]] Index dim() const noexcept { return lo_.size(); }
    [[nodiscard]] const Vector& lo() const noexcept { return lo_; }
    [[nodiscard]] const Vector& hi() const noexcept { return hi_; }

    /// Every coordinate has finite lo and hi.
    [[nodiscard]] bool is_bounded() const noexcept;
    /// No finite bound anywhere, i.e. the whole space.
    [[nodiscard]] bool is_unbounded() const noexcept;
    [[nodiscard]] bool contains(const Vector& x, double tol = kBoundaryTolerance) const;

    /// Midpoint per coordinate; the finite bound (or 0) where a side is infinite.
    [[nodiscard]] Vector center() const;

private:
    Vector lo_;
    Vector hi_;
};

/// Componentwise clamp, the Euclidean projection onto the box.
[[nodiscard]] Vector project_point(const BoxSet& box, const Vector& x);

/// Π_B(x, v) = P_{T_B(x)}(v): zero the components of v that point out of an active bound.
/// Throws std::domain_error if x lies outside the box by more than kBoundaryTolerance;
/// points within the tolerance are treated as on the boundary.
[[nodiscard]] Vector tangent_projection(const BoxSet& box, const Vector& x, const Vector& v);

struct MoreauSplit {
    Vector tangent;
    Vector normal;
};

/// v = tangent + normal with tangent in T_B(x), normal in N_B(x), and the two orthogonal.
[[nodiscard]] MoreauSplit moreau_split(const BoxSet& box, const Vector& x, const Vector& v);

/// Normal-cone membership for a box: each nonzero component pushes against an active bound.
[[nodiscard]] bool in_normal_cone(const BoxSet& box, const Vector& x, const Vector& n,
                                  double tol = kBoundaryTolerance);

}  // namespace nashflow
