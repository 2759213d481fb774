#ifndef QUADMIX_LP_HPP
#define QUADMIX_LP_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "quadmix/types.hpp"

namespace quadmix {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar>
struct LpResult {
    LpStatus status;
    std::optional<Vec<Scalar>> point;      // set when status == Optimal
    std::optional<Scalar> objective;       // c . point
};

namespace detail {

// Dense simplex tableau with Bland's anti-cycling rule. Rows are constraints,
// columns are variables plus the rightmost b column; the last row holds the
// reduced costs and (negated) objective value.
template <typename Scalar>
struct SimplexTableau {
    Mat<Scalar> t;
    std::vector<Index> basis;  // basis[r] = column basic in row r
    Scalar tol;

    Index rows() const { return t.rows() - 1; }
    Index cols() const { return t.cols() - 1; }

    void pivot(Index pr, Index pc) {
        t.row(pr) /= t(pr, pc);
        for (Index r = 0; r < t.rows(); ++r) {
            if (r == pr) continue;
            const Scalar f = t(r, pc);
            if (f != Scalar(0)) t.row(r) -= f * t.row(pr);
        }
        basis[pr] = pc;
    }

    // Runs the simplex loop on the current cost row, considering only the
    // first `enterable` columns as entering candidates. Returns false if the
    // problem is unbounded in the entering direction.
    bool iterate(long max_iter, Index enterable) {
        const Index m = rows();
        const Index n = cols();
        const Index cost = m;
        for (long it = 0; it < max_iter; ++it) {
            // Bland: entering column is the lowest index with negative reduced cost.
            Index pc = -1;
            for (Index c = 0; c < enterable; ++c) {
                if (t(cost, c) < -tol) {
                    pc = c;
                    break;
                }
            }
            if (pc < 0) return true;  // optimal

            Index pr = -1;
            Scalar best = std::numeric_limits<Scalar>::infinity();
            for (Index r = 0; r < m; ++r) {
                if (t(r, pc) > tol) {
                    const Scalar ratio = t(r, n) / t(r, pc);
                    if (ratio < best - tol ||
                        (ratio < best + tol && (pr < 0 || basis[r] < basis[pr]))) {
                        best = ratio;
                        pr = r;
                    }
                }
            }
            if (pr < 0) return false;  // unbounded
            pivot(pr, pc);
        }
        throw Error("lp: iteration limit exceeded");
    }
};

}  // namespace detail

/// Maximizes c . x subject to A x >= b with x free, via a two-phase dense
/// simplex on the split form x = x+ - x-. Small and deterministic; fine for
/// the constraint systems that arise here (tens of rows and columns).
template <typename Scalar>
LpResult<Scalar> solve_lp(const Mat<Scalar>& A, const Vec<Scalar>& b, const Vec<Scalar>& c,
                          Scalar tol = Scalar(1e-9)) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (b.size() != m) throw DimensionMismatch("solve_lp: b size differs from A rows");
    if (c.size() != n) throw DimensionMismatch("solve_lp: c size differs from A cols");
    if (m == 0) throw Error("solve_lp: no constraints");

    // Standard form: variables [x+ (n), x- (n), s (m), a (m)], constraints
    //   A x+ - A x- - s + sign-fixed a = b with b >= 0 after row flips.
    const Index nv = 2 * n + m;        // structural + slack
    const Index total = nv + m;        // plus artificials
    const long max_iter = 50000;

    detail::SimplexTableau<Scalar> tab;
    tab.tol = tol;
    tab.t = Mat<Scalar>::Zero(m + 1, total + 1);
    tab.basis.assign(static_cast<std::size_t>(m), 0);

    for (Index r = 0; r < m; ++r) {
        const Scalar flip = (b(r) < Scalar(0)) ? Scalar(-1) : Scalar(1);
        for (Index j = 0; j < n; ++j) {
            tab.t(r, j) = flip * A(r, j);
            tab.t(r, n + j) = -flip * A(r, j);
        }
        tab.t(r, 2 * n + r) = -flip;        // surplus for A x >= b
        tab.t(r, nv + r) = Scalar(1);       // artificial
        tab.t(r, total) = flip * b(r);
        tab.basis[r] = nv + r;
    }

    // Phase 1: minimize the artificial sum. Cost row = -(sum of constraint rows)
    // over the non-artificial columns so the artificial basis prices to zero.
    for (Index r = 0; r < m; ++r) {
        for (Index ccol = 0; ccol < nv; ++ccol) tab.t(m, ccol) -= tab.t(r, ccol);
        tab.t(m, total) -= tab.t(r, total);
    }
    if (!tab.iterate(max_iter, total)) throw Error("lp: phase 1 unbounded");
    // The leftover artificial mass is judged relative to the data scale, not
    // absolutely, so well-posed systems with large right-hand sides pass.
    const Scalar b_scale = b.size() > 0 ? b.cwiseAbs().maxCoeff() : Scalar(0);
    if (-tab.t(m, total) > tol * (Scalar(1) + b_scale)) {
        return {LpStatus::Infeasible, std::nullopt, std::nullopt};
    }

    // Drive leftover artificials out of the basis; a row with no structural
    // pivot is redundant and can be neutralized in place.
    for (Index r = 0; r < m; ++r) {
        if (tab.basis[r] >= nv) {
            Index pc = -1;
            for (Index ccol = 0; ccol < nv; ++ccol) {
                if (std::abs(tab.t(r, ccol)) > tol) {
                    pc = ccol;
                    break;
                }
            }
            if (pc >= 0) tab.pivot(r, pc);
        }
    }

    // Phase 2: minimize -c . x on the same tableau. Artificial columns are
    // excluded from the entering scan, so any still basic (redundant rows)
    // stay pinned at value zero.
    for (Index r = 0; r < m; ++r) {
        if (tab.basis[r] >= nv) {
            tab.t.row(r).segment(nv, m).setZero();
        }
    }
    tab.t.row(m).setZero();
    for (Index j = 0; j < n; ++j) {
        tab.t(m, j) = -c(j);
        tab.t(m, n + j) = c(j);
    }
    // Price out the current basis.
    for (Index r = 0; r < m; ++r) {
        const Scalar f = tab.t(m, tab.basis[r]);
        if (f != Scalar(0)) tab.t.row(m) -= f * tab.t.row(r);
    }
    if (!tab.iterate(max_iter, nv)) {
        return {LpStatus::Unbounded, std::nullopt, std::nullopt};
    }

    Vec<Scalar> x = Vec<Scalar>::Zero(n);
    for (Index r = 0; r < m; ++r) {
        const Index col = tab.basis[r];
        if (col < n) {
            x(col) += tab.t(r, total);
        } else if (col < 2 * n) {
            x(col - n) -= tab.t(r, total);
        }
    }
    return {LpStatus::Optimal, x, c.dot(x)};
}

}  // namespace quadmix

#endif  // QUADMIX_LP_HPP
