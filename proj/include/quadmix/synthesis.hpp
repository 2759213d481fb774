#ifndef QUADMIX_SYNTHESIS_HPP
#define QUADMIX_SYNTHESIS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "quadmix/measures.hpp"
#include "quadmix/quadrants.hpp"
#include "quadmix/requirements.hpp"
#include "quadmix/scenarios.hpp"
#include "quadmix/seeding.hpp"
#include "quadmix/stats.hpp"
#include "quadmix/types.hpp"

namespace quadmix {

/// One scenario per requirement, pinned at a deep feasible point of the
/// quadrant with the floor as its probability. Point-mass aggregation of the
/// result then satisfies the requirement set under any base measure: each
/// atom alone carries the floor.
template <typename Scalar>
ScenarioSet<Scalar> scenarios_from_requirements_pointmass(const RequirementSet<Scalar>& rs) {
    std::vector<EnhancedScenario<Scalar>> scenarios;
    scenarios.reserve(rs.size());
    for (const auto& r : rs.requirements()) {
        scenarios.emplace_back(interior_point(r.quadrant).point, r.floor);
    }
    return ScenarioSet<Scalar>(std::move(scenarios));
}

/// One singleton-quadrant requirement per scenario. Point-mass aggregation
/// with the original set satisfies the result for any base measure.
template <typename Scalar>
RequirementSet<Scalar> requirements_from_scenarios(const ScenarioSet<Scalar>& M) {
    std::vector<QuadrantRequirement<Scalar>> reqs;
    reqs.reserve(M.size());
    for (const auto& s : M.scenarios()) {
        reqs.emplace_back(Quadrant<Scalar>::singleton(s.deflection), s.probability);
    }
    return RequirementSet<Scalar>(std::move(reqs));
}

template <typename Scalar>
struct ShiftingSynthesisParams {
    Scalar epsilon;                    // slack split between floor inflation and tail mass
    Scalar radius;                     // ball radius R, skips the doubling search
    std::int64_t tail_budget = 200'000;
};

template <typename Scalar>
struct ShiftingSynthesis {
    ScenarioSet<Scalar> scenarios;
    Scalar epsilon;
    Scalar radius;
    Vec<Scalar> center;  // mean of the base measure; deflections are relative to it
};

namespace detail {

// Upper estimate of P(||x - center|| > R). Exact-order chi-square bound for a
// single Gaussian via its largest covariance eigenvalue, Monte Carlo upper
// confidence bound for everything else.
template <typename Scalar>
Scalar tail_mass_upper_bound(const FiniteMixtureMeasure<Scalar>& P, const Vec<Scalar>& center,
                             Scalar radius, std::int64_t budget, std::uint64_t seed) {
    if (P.components().size() == 1) {
        if (const auto* g = std::get_if<Gaussian<Scalar>>(&P.components().front().component)) {
            Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g->cov);
            const Scalar lam_max = es.eigenvalues().maxCoeff();
            if (lam_max <= Scalar(0)) return Scalar(0);
            const double x = static_cast<double>(radius * radius / lam_max);
            return Scalar(chi_square_tail(x, static_cast<double>(P.dimension())));
        }
        if (std::holds_alternative<PointMass<Scalar>>(P.components().front().component)) {
            const auto& pm = std::get<PointMass<Scalar>>(P.components().front().component);
            return (pm.location - center).norm() > radius ? Scalar(1) : Scalar(0);
        }
    }
    const Mat<Scalar> draws = sample(P, budget, seed);
    std::int64_t outside = 0;
    for (Index i = 0; i < draws.rows(); ++i) {
        if ((draws.row(i).transpose() - center).norm() > radius) ++outside;
    }
    const Scalar phat = Scalar(outside) / Scalar(budget);
    const Scalar se = std::sqrt(phat * (Scalar(1) - phat) / Scalar(budget));
    return phat + Scalar(3) * se;
}

}  // namespace detail

/// Builds a scenario set whose shifting aggregation satisfies the
/// requirement set. Preconditions are those of the underlying theorem: no
/// quadrant may be two-sided constrained and the floors must sum below 1.
///
/// Construction: pick epsilon with p_Q/(1-epsilon) < 1, find R with
/// P(||x - center|| > R) < epsilon/2 where center is the mean of P, center a
/// ball of radius R inside each quadrant, and deflect P onto it. The shifted
/// copy then carries mass at least 1 - epsilon into the quadrant, and the
/// inflated probability floor_i/(1-epsilon) compensates the lost tail.
template <typename Scalar>
ShiftingSynthesis<Scalar> scenarios_from_requirements_shifting(
    const FiniteMixtureMeasure<Scalar>& P, const RequirementSet<Scalar>& rs,
    const std::optional<ShiftingSynthesisParams<Scalar>>& params = std::nullopt,
    std::uint64_t seed = 0) {
    if (!P.is_probability()) {
        throw NonProbabilityMeasure("shifting synthesis: base must be a probability measure");
    }
    for (std::size_t i = 0; i < rs.size(); ++i) {
        require_same_dimension(P.dimension(), rs.requirements()[i].quadrant.dimension(),
                               "shifting synthesis");
        if (is_two_sided_constrained(rs.requirements()[i].quadrant)) {
            throw TwoSidedConstrainedQuadrant(i);
        }
    }
    const Scalar p_total = rs.total_floor();
    if (p_total >= Scalar(1) - Scalar(1e-12)) throw TotalProbabilityOne();

    const Vec<Scalar> center = P.mean();
    Scalar epsilon;
    Scalar radius;
    std::int64_t tail_budget = 200'000;
    if (params) {
        epsilon = params->epsilon;
        radius = params->radius;
        tail_budget = params->tail_budget;
        if (!(epsilon > Scalar(0) && epsilon < Scalar(1))) {
            throw Error("shifting synthesis: epsilon must lie in (0,1)");
        }
        if (!(p_total / (Scalar(1) - epsilon) < Scalar(1))) {
            throw Error("shifting synthesis: epsilon too large for the requirement floors");
        }
        if (!(radius > Scalar(0))) throw Error("shifting synthesis: radius must be positive");
    } else {
        epsilon = (Scalar(1) - p_total) / Scalar(2);
        radius = Scalar(1);
        int step = 0;
        while (detail::tail_mass_upper_bound(P, center, radius, tail_budget,
                                             derive_seed(seed, "tail",
                                                         static_cast<std::uint64_t>(step))) >=
               epsilon / Scalar(2)) {
            radius *= Scalar(2);
            if (++step > 200) throw Error("shifting synthesis: tail radius search diverged");
        }
    }

    std::vector<EnhancedScenario<Scalar>> scenarios;
    scenarios.reserve(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto ball_center = inscribe_ball(rs.requirements()[i].quadrant, radius);
        if (!ball_center) throw BallPlacementFailed(static_cast<double>(radius), i);
        scenarios.emplace_back(*ball_center - center,
                               rs.requirements()[i].floor / (Scalar(1) - epsilon));
    }
    ShiftingSynthesis<Scalar> out{ScenarioSet<Scalar>(std::move(scenarios)), epsilon, radius,
                                  center};
    return out;
}

/// Inverts point-mass aggregation: strips p_S of atom weight at each
/// deflection, most recent components first, then rescales by 1/(1 - p_M).
/// The reverse scan mirrors how aggregation appends, so a round trip
/// restores the base measure component for component.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> recover_base_measure(const FiniteMixtureMeasure<Scalar>& Q,
                                                  const ScenarioSet<Scalar>& M) {
    const Scalar p_total = M.total_probability();
    if (p_total > Scalar(1) - Scalar(1e-12)) {
        throw NotInvertible("recover_base_measure: total scenario probability is 1");
    }
    if (!M.empty()) {
        require_same_dimension(Q.dimension(), M.scenarios().front().deflection.size(),
                               "recover_base_measure");
    }

    std::vector<WeightedComponent<Scalar>> comps(Q.components().begin(), Q.components().end());
    std::vector<bool> dead(comps.size(), false);

    auto matches = [](const MeasureComponent<Scalar>& c, const Vec<Scalar>& d) {
        const auto* pm = std::get_if<PointMass<Scalar>>(&c);
        if (!pm) return false;
        return (pm->location - d).cwiseAbs().maxCoeff() <= Scalar(1e-12);
    };

    for (std::size_t s = M.size(); s-- > 0;) {
        const auto& scenario = M.scenarios()[s];
        Scalar remaining = scenario.probability;
        for (std::size_t k = comps.size(); k-- > 0;) {
            if (dead[k] || !matches(comps[k].component, scenario.deflection)) continue;
            const Scalar take = std::min(comps[k].weight, remaining);
            comps[k].weight -= take;
            remaining -= take;
            if (comps[k].weight <= Scalar(1e-15)) dead[k] = true;
            if (remaining <= Scalar(1e-12)) break;
        }
        if (remaining > Scalar(1e-12)) {
            throw MissingPointMass("recover_base_measure: not enough atom mass for a scenario");
        }
    }

    std::vector<WeightedComponent<Scalar>> kept;
    kept.reserve(comps.size());
    const Scalar scale = Scalar(1) / (Scalar(1) - p_total);
    for (std::size_t k = 0; k < comps.size(); ++k) {
        if (dead[k]) continue;
        kept.push_back({comps[k].weight * scale, comps[k].component});
    }
    return FiniteMixtureMeasure<Scalar>(Q.dimension(), std::move(kept), Q.is_probability());
}

/// Greedy backward elimination toward a smaller scenario set that still
/// makes point-mass aggregation satisfy the requirements. Scans in given
/// order, keeps dropping while the check stays AllSatisfied, and repeats
/// until a full pass drops nothing.
template <typename Scalar>
ScenarioSet<Scalar> sufficient_subset(const ScenarioSet<Scalar>& M,
                                      const RequirementSet<Scalar>& rs,
                                      const FiniteMixtureMeasure<Scalar>& P,
                                      const CheckPolicy<Scalar>& policy = {}) {
    auto build = [&](const std::vector<bool>& alive) {
        std::vector<EnhancedScenario<Scalar>> kept;
        for (std::size_t i = 0; i < M.size(); ++i) {
            if (alive[i]) kept.push_back(M.scenarios()[i]);
        }
        return ScenarioSet<Scalar>(std::move(kept));
    };
    auto satisfied = [&](const ScenarioSet<Scalar>& sub) {
        return check_set(aggregate_point_mass(P, sub), rs, policy).overall ==
               Overall::AllSatisfied;
    };

    std::vector<bool> alive(M.size(), true);
    if (!satisfied(M)) {
        throw NotSufficientInitially("sufficient_subset: full scenario set fails the check");
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < M.size(); ++i) {
            if (!alive[i]) continue;
            alive[i] = false;
            if (satisfied(build(alive))) {
                changed = true;
            } else {
                alive[i] = true;
            }
        }
    }
    return build(alive);
}

/// Closed grid cells over the box [lo, hi] as one requirement each, floored
/// at the measure's own (estimated) cell mass. Monte Carlo floors give away
/// a 3 standard error margin so the emitting measure still passes its own
/// requirements. Floors may add up to more than 1 since closed cells share
/// faces, so the result is a plain list.
template <typename Scalar>
std::vector<QuadrantRequirement<Scalar>> hypercube_requirements(
    const FiniteMixtureMeasure<Scalar>& P, const Vec<Scalar>& lo, const Vec<Scalar>& hi,
    Index cells_per_axis, std::int64_t budget = 1'000'000, std::uint64_t seed = 0) {
    const Index n = P.dimension();
    require_same_dimension(n, lo.size(), "hypercube_requirements");
    require_same_dimension(n, hi.size(), "hypercube_requirements");
    if (cells_per_axis < 1) throw Error("hypercube_requirements: need at least one cell");
    for (Index j = 0; j < n; ++j) {
        if (!(lo(j) < hi(j))) throw Error("hypercube_requirements: lo must be below hi");
    }
    double total_cells = 1;
    for (Index j = 0; j < n; ++j) {
        total_cells *= static_cast<double>(cells_per_axis);
        if (total_cells > 1e6) throw GridTooLarge("hypercube_requirements: too many cells");
    }

    std::vector<QuadrantRequirement<Scalar>> out;
    out.reserve(static_cast<std::size_t>(total_cells));
    std::vector<Index> idx(static_cast<std::size_t>(n), 0);
    const Vec<Scalar> width = (hi - lo) / Scalar(cells_per_axis);
    std::uint64_t linear = 0;
    while (true) {
        Vec<Scalar> cell_lo(n), cell_hi(n);
        for (Index j = 0; j < n; ++j) {
            cell_lo(j) = lo(j) + Scalar(idx[static_cast<std::size_t>(j)]) * width(j);
            cell_hi(j) = cell_lo(j) + width(j);
        }
        Quadrant<Scalar> cell = Quadrant<Scalar>::axis_box(cell_lo, cell_hi);
        const auto est =
            quadrant_probability(P, cell, budget, derive_seed(seed, "cell", linear));
        Scalar floor = est.value;
        if (est.method == Method::MonteCarlo) {
            floor = std::max(Scalar(0), est.value - Scalar(3) * est.std_error);
        }
        out.emplace_back(std::move(cell), floor);

        Index j = 0;
        for (; j < n; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < cells_per_axis) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
        ++linear;
        if (j == n) break;
    }
    return out;
}

}  // namespace quadmix

#endif  // QUADMIX_SYNTHESIS_HPP
