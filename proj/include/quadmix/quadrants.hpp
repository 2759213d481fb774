#ifndef QUADMIX_QUADRANTS_HPP
#define QUADMIX_QUADRANTS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "quadmix/lp.hpp"
#include "quadmix/types.hpp"

namespace quadmix {

/// Closed affine half-space { x : normal . x >= offset }.
template <typename Scalar>
struct HalfSpace {
    Vec<Scalar> normal;
    Scalar offset;
};

/// Non-empty intersection of finitely many half-spaces. Emptiness is ruled
/// out at construction by a phase-1 feasibility solve, so downstream code can
/// assume a cached feasible point exists.
template <typename Scalar>
class Quadrant {
public:
    Quadrant(Index dimension, std::vector<HalfSpace<Scalar>> halfspaces)
        : dim_(dimension), halfspaces_(std::move(halfspaces)) {
        if (dim_ < 1) throw Error("quadrant dimension must be >= 1");
        if (halfspaces_.empty()) throw Error("quadrant needs at least one half-space");
        for (const auto& h : halfspaces_) {
            require_same_dimension(dim_, h.normal.size(), "quadrant half-space");
            if (h.normal.cwiseAbs().maxCoeff() <= Scalar(1e-12)) {
                throw Error("half-space normal is zero");
            }
        }
        Mat<Scalar> A(static_cast<Index>(halfspaces_.size()), dim_);
        Vec<Scalar> b(static_cast<Index>(halfspaces_.size()));
        for (std::size_t i = 0; i < halfspaces_.size(); ++i) {
            A.row(static_cast<Index>(i)) = halfspaces_[i].normal.transpose();
            b(static_cast<Index>(i)) = halfspaces_[i].offset;
        }
        const auto r = solve_lp<Scalar>(A, b, Vec<Scalar>::Zero(dim_));
        if (r.status != LpStatus::Optimal) throw Error("quadrant is empty");
        feasible_point_ = *r.point;
    }

    /// The one-point quadrant {d}, written as the 2n axis constraints
    /// x_j >= d_j and -x_j >= -d_j.
    static Quadrant singleton(const Vec<Scalar>& point) {
        const Index n = point.size();
        std::vector<HalfSpace<Scalar>> hs;
        hs.reserve(2 * static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j) {
            Vec<Scalar> e = Vec<Scalar>::Zero(n);
            e(j) = Scalar(1);
            hs.push_back({e, point(j)});
            hs.push_back({-e, -point(j)});
        }
        return Quadrant(n, std::move(hs));
    }

    /// Axis-aligned box lo <= x <= hi. Infinite entries drop that side, so
    /// one-sided constraints per axis are expressible too.
    static Quadrant axis_box(const Vec<Scalar>& lo, const Vec<Scalar>& hi) {
        require_same_dimension(lo.size(), hi.size(), "axis_box");
        const Index n = lo.size();
        std::vector<HalfSpace<Scalar>> hs;
        for (Index j = 0; j < n; ++j) {
            if (lo(j) > hi(j)) throw Error("axis_box: lo exceeds hi");
            Vec<Scalar> e = Vec<Scalar>::Zero(n);
            e(j) = Scalar(1);
            if (std::isfinite(static_cast<double>(lo(j)))) hs.push_back({e, lo(j)});
            if (std::isfinite(static_cast<double>(hi(j)))) hs.push_back({-e, -hi(j)});
        }
        if (hs.empty()) throw Error("axis_box: all bounds infinite");
        return Quadrant(n, std::move(hs));
    }

    Index dimension() const { return dim_; }
    const std::vector<HalfSpace<Scalar>>& halfspaces() const { return halfspaces_; }
    const Vec<Scalar>& feasible_point() const { return feasible_point_; }

private:
    Index dim_;
    std::vector<HalfSpace<Scalar>> halfspaces_;
    Vec<Scalar> feasible_point_;
};

template <typename Scalar>
bool contains(const Quadrant<Scalar>& q, const Vec<Scalar>& x, Scalar tol = Scalar(1e-9)) {
    require_same_dimension(q.dimension(), x.size(), "contains");
    for (const auto& h : q.halfspaces()) {
        if (h.normal.dot(x) < h.offset - tol) return false;
    }
    return true;
}

template <typename Scalar>
struct InteriorPointResult {
    Vec<Scalar> point;
    Scalar margin;       // largest t with normal_i . x >= offset_i + t * ||normal_i||
    bool has_interior;   // margin > 1e-9
};

namespace detail {

// Chebyshev-style LP: maximize t subject to normal_i . x - t ||normal_i|| >=
// rhs_i within the box |x_j - center_j| <= half_width. Variables are (x, t).
template <typename Scalar>
LpResult<Scalar> margin_lp(const std::vector<HalfSpace<Scalar>>& halfspaces, Index n,
                           const Vec<Scalar>& rhs, const Vec<Scalar>& center,
                           Scalar half_width) {
    const Index m = static_cast<Index>(halfspaces.size());
    Mat<Scalar> A = Mat<Scalar>::Zero(m + 2 * n, n + 1);
    Vec<Scalar> b(m + 2 * n);
    for (Index i = 0; i < m; ++i) {
        A.row(i).head(n) = halfspaces[static_cast<std::size_t>(i)].normal.transpose();
        A(i, n) = -halfspaces[static_cast<std::size_t>(i)].normal.norm();
        b(i) = rhs(i);
    }
    for (Index j = 0; j < n; ++j) {
        A(m + 2 * j, j) = Scalar(1);
        b(m + 2 * j) = center(j) - half_width;
        A(m + 2 * j + 1, j) = Scalar(-1);
        b(m + 2 * j + 1) = -(center(j) + half_width);
    }
    Vec<Scalar> c = Vec<Scalar>::Zero(n + 1);
    c(n) = Scalar(1);
    return solve_lp(A, b, c);
}

}  // namespace detail

/// Deepest point of the quadrant in the Chebyshev sense, confined to a box of
/// half-width 1e6 so the LP stays bounded. The box only confines the search;
/// its faces do not enter the margin. Degenerate quadrants come back with
/// margin 0 and has_interior false.
template <typename Scalar>
InteriorPointResult<Scalar> interior_point(const Quadrant<Scalar>& q) {
    const Index n = q.dimension();
    Vec<Scalar> rhs(static_cast<Index>(q.halfspaces().size()));
    for (Index i = 0; i < rhs.size(); ++i) {
        rhs(i) = q.halfspaces()[static_cast<std::size_t>(i)].offset;
    }
    const Vec<Scalar> origin = Vec<Scalar>::Zero(n);
    auto r = detail::margin_lp(q.halfspaces(), n, rhs, origin, Scalar(1e6));
    if (r.status != LpStatus::Optimal) {
        // The quadrant lies outside the default box; recenter at the cached
        // feasible point, which makes the LP feasible with t = 0.
        r = detail::margin_lp(q.halfspaces(), n, rhs, q.feasible_point(), Scalar(1e6));
    }
    if (r.status != LpStatus::Optimal) throw Error("interior_point: margin LP failed");
    const Vec<Scalar>& sol = *r.point;
    InteriorPointResult<Scalar> out;
    out.point = sol.head(n);
    out.margin = std::max(Scalar(0), sol(n));
    out.has_interior = sol(n) > Scalar(1e-9);
    return out;
}

/// Positive Lebesgue measure is equivalent to a positive Chebyshev margin.
template <typename Scalar>
bool is_nondegenerate(const Quadrant<Scalar>& q) {
    return interior_point(q).has_interior;
}

/// A quadrant squeezed into some slab a <= lambda . x <= b cannot contain
/// arbitrarily large balls. By the convex dichotomy this happens exactly when
/// the recession cone { x : normal_i . x >= 0 } has empty interior, which the
/// margin LP over the unit box detects.
template <typename Scalar>
bool is_two_sided_constrained(const Quadrant<Scalar>& q) {
    const Index n = q.dimension();
    const Vec<Scalar> rhs = Vec<Scalar>::Zero(static_cast<Index>(q.halfspaces().size()));
    const Vec<Scalar> origin = Vec<Scalar>::Zero(n);
    const auto r = detail::margin_lp(q.halfspaces(), n, rhs, origin, Scalar(1));
    if (r.status != LpStatus::Optimal) throw Error("is_two_sided_constrained: LP failed");
    return (*r.point)(n) <= Scalar(1e-9);
}

/// Center d of a Euclidean ball of the given radius inside the quadrant, or
/// nullopt when no such center exists. Among valid centers the LP picks one
/// of smallest l1 norm, keeping deflections small and reproducible.
template <typename Scalar>
std::optional<Vec<Scalar>> inscribe_ball(const Quadrant<Scalar>& q, Scalar radius) {
    if (radius < Scalar(0)) throw Error("inscribe_ball: negative radius");
    const Index n = q.dimension();
    const Index m = static_cast<Index>(q.halfspaces().size());

    // Variables (d, u) with u_j >= |d_j|; minimize sum u_j. The objective is
    // bounded below by zero, so no search box is needed.
    Mat<Scalar> A = Mat<Scalar>::Zero(m + 2 * n, 2 * n);
    Vec<Scalar> b(m + 2 * n);
    for (Index i = 0; i < m; ++i) {
        const auto& h = q.halfspaces()[static_cast<std::size_t>(i)];
        A.row(i).head(n) = h.normal.transpose();
        b(i) = h.offset + radius * h.normal.norm();
    }
    for (Index j = 0; j < n; ++j) {
        A(m + 2 * j, j) = Scalar(-1);
        A(m + 2 * j, n + j) = Scalar(1);
        b(m + 2 * j) = Scalar(0);
        A(m + 2 * j + 1, j) = Scalar(1);
        A(m + 2 * j + 1, n + j) = Scalar(1);
        b(m + 2 * j + 1) = Scalar(0);
    }
    Vec<Scalar> c = Vec<Scalar>::Zero(2 * n);
    c.tail(n).setConstant(Scalar(-1));

    const auto r = solve_lp(A, b, c);
    if (r.status != LpStatus::Optimal) return std::nullopt;
    Vec<Scalar> d = r.point->head(n);
    for (Index i = 0; i < m; ++i) {
        const auto& h = q.halfspaces()[static_cast<std::size_t>(i)];
        const Scalar need = h.offset + radius * h.normal.norm();
        const Scalar slack_tol = Scalar(1e-9) * (Scalar(1) + std::abs(need));
        if (h.normal.dot(d) < need - slack_tol) return std::nullopt;
    }
    return d;
}

/// Per-axis bounds (lo, hi) with infinities for unconstrained sides, defined
/// only when every normal touches a single axis. Used by the exact
/// Gaussian-box probability path.
template <typename Scalar>
std::optional<std::pair<Vec<Scalar>, Vec<Scalar>>> axis_aligned_bounds(
    const Quadrant<Scalar>& q) {
    const Index n = q.dimension();
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    Vec<Scalar> lo = Vec<Scalar>::Constant(n, -inf);
    Vec<Scalar> hi = Vec<Scalar>::Constant(n, inf);
    for (const auto& h : q.halfspaces()) {
        Index axis = -1;
        for (Index j = 0; j < n; ++j) {
            if (h.normal(j) != Scalar(0)) {
                if (axis >= 0) return std::nullopt;
                axis = j;
            }
        }
        if (axis < 0) return std::nullopt;
        const Scalar bound = h.offset / h.normal(axis);
        if (h.normal(axis) > Scalar(0)) {
            lo(axis) = std::max(lo(axis), bound);
        } else {
            hi(axis) = std::min(hi(axis), bound);
        }
    }
    return std::make_pair(lo, hi);
}

}  // namespace quadmix

#endif  // QUADMIX_QUADRANTS_HPP
