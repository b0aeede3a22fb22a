#include "nashflow/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nashflow {

BoxSet::BoxSet(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    require_dim(hi_.size(), lo_.size(), "BoxSet bounds");
    for (Index k = 0; k < lo_.size(); ++k) {
        if (!(lo_(k) <= hi_(k))) {
            throw std::invalid_argument("BoxSet: lo > hi at coordinate " + std::to_string(k));
        }
    }
}

BoxSet BoxSet::unbounded(Index dim) { return {Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf)}; }

BoxSet BoxSet::uniform(Index dim, double lo, double hi) {
    return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

bool BoxSet::is_bounded() const noexcept { return lo_.allFinite() && hi_.allFinite(); }

bool BoxSet::is_unbounded() const noexcept {
    for (Index k = 0; k < dim(); ++k) {
        if (std::isfinite(lo_(k)) || std::isfinite(hi_(k))) return false;
    }
    return true;
}

bool BoxSet::contains(const Vector& x, double tol) const {
    require_dim(x.size(), dim(), "BoxSet::contains");
    for (Index k = 0; k < dim(); ++k) {
        if (!(x(k) >= lo_(k) - tol && x(k) <= hi_(k) + tol)) return false;
    }
    return true;
}

Vector BoxSet::center() const {
    Vector c(dim());
    for (Index k = 0; k < dim(); ++k) {
        const bool lo_fin = std::isfinite(lo_(k));
        const bool hi_fin = std::isfinite(hi_(k));
        if (lo_fin && hi_fin) {
            c(k) = 0.5 * (lo_(k) + hi_(k));
        } else if (lo_fin) {
            c(k) = lo_(k);
        } else if (hi_fin) {
            c(k) = hi_(k);
        } else {
            c(k) = 0.0;
        }
    }
    return c;
}

Vector project_point(const BoxSet& box, const Vector& x) {
    require_dim(x.size(), box.dim(), "project_point");
    return x.cwiseMax(box.lo()).cwiseMin(box.hi());
}

Vector tangent_projection(const BoxSet& box, const Vector& x, const Vector& v) {
    require_dim(x.size(), box.dim(), "tangent_projection");
    require_dim(v.size(), box.dim(), "tangent_projection");
    if (!box.contains(x)) {
        throw std::domain_error("tangent_projection: point outside the box");
    }
    Vector out = v;
    for (Index k = 0; k < v.size(); ++k) {
        const bool at_lo = x(k) <= box.lo()(k) + kBoundaryTolerance;
        const bool at_hi = x(k) >= box.hi()(k) - kBoundaryTolerance;
        if ((at_lo && v(k) < 0.0) || (at_hi && v(k) > 0.0)) out(k) = 0.0;
    }
    return out;
}

MoreauSplit moreau_split(const BoxSet& box, const Vector& x, const Vector& v) {
    MoreauSplit split;
    split.tangent = tangent_projection(box, x, v);
    split.normal = v - split.tangent;
    return split;
}

bool in_normal_cone(const BoxSet& box, const Vector& x, const Vector& n, double tol) {
    require_dim(n.size(), box.dim(), "in_normal_cone");
    require_dim(x.size(), box.dim(), "in_normal_cone");
    for (Index k = 0; k < n.size(); ++k) {
        if (std::abs(n(k)) <= tol) continue;
        const bool at_lo = x(k) <= box.lo()(k) + kBoundaryTolerance;
        const bool at_hi = x(k) >= box.hi()(k) - kBoundaryTolerance;
        if (n(k) < 0.0 && !at_lo) return false;
        if (n(k) > 0.0 && !at_hi) return false;
    }
    return true;
}

}  // namespace nashflow
