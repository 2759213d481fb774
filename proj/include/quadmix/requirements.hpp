#ifndef QUADMIX_REQUIREMENTS_HPP
#define QUADMIX_REQUIREMENTS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "quadmix/measures.hpp"
#include "quadmix/quadrants.hpp"
#include "quadmix/seeding.hpp"
#include "quadmix/stats.hpp"
#include "quadmix/types.hpp"

namespace quadmix {

/// Requirement P(A) >= floor on a single quadrant A.
template <typename Scalar>
struct QuadrantRequirement {
    QuadrantRequirement(Quadrant<Scalar> q, Scalar f) : quadrant(std::move(q)), floor(f) {
        if (!(floor >= Scalar(0) && floor <= Scalar(1))) {
            throw Error("requirement floor must lie in [0,1]");
        }
    }

    Quadrant<Scalar> quadrant;
    Scalar floor;
};

/// Finite collection of quadrant requirements whose floors sum to at most 1,
/// so the floors can double as scenario probabilities.
template <typename Scalar>
class RequirementSet {
public:
    explicit RequirementSet(std::vector<QuadrantRequirement<Scalar>> requirements)
        : requirements_(std::move(requirements)) {
        Scalar total = Scalar(0);
        for (std::size_t i = 0; i < requirements_.size(); ++i) {
            total += requirements_[i].floor;
            if (i > 0) {
                require_same_dimension(requirements_[0].quadrant.dimension(),
                                       requirements_[i].quadrant.dimension(),
                                       "requirement set");
            }
        }
        if (total > Scalar(1) + Scalar(1e-12)) {
            throw Error("requirement floors sum to more than 1");
        }
        total_ = total;
    }

    const std::vector<QuadrantRequirement<Scalar>>& requirements() const {
        return requirements_;
    }
    Scalar total_floor() const { return total_; }
    bool empty() const { return requirements_.empty(); }
    std::size_t size() const { return requirements_.size(); }

private:
    std::vector<QuadrantRequirement<Scalar>> requirements_;
    Scalar total_ = Scalar(0);
};

/// Condition of the form  integral of sum c_k 1_{A_k} d(mu) >= threshold.
/// The step function is given term by term; overlapping quadrants are fine.
template <typename Scalar>
struct GeneralizedRequirement {
    GeneralizedRequirement(std::vector<std::pair<Scalar, Quadrant<Scalar>>> t, Scalar thr)
        : terms(std::move(t)), threshold(thr) {
        if (terms.empty()) throw Error("generalized requirement needs at least one term");
        for (std::size_t i = 1; i < terms.size(); ++i) {
            require_same_dimension(terms[0].second.dimension(), terms[i].second.dimension(),
                                   "generalized requirement");
        }
    }

    std::vector<std::pair<Scalar, Quadrant<Scalar>>> terms;
    Scalar threshold;
};

enum class Method { Exact, AnalyticGaussian, MonteCarlo };

template <typename Scalar>
struct ProbabilityEstimate {
    Scalar value = Scalar(0);
    Scalar std_error = Scalar(0);  // 0 on exact and analytic paths
    Method method = Method::Exact;
    std::int64_t samples = 0;      // Monte Carlo draws consumed
    std::uint64_t seed = 0;
};

enum class Verdict { Satisfied, Violated, Inconclusive };
enum class Overall { AllSatisfied, SomeViolated, Inconclusive };

template <typename Scalar>
struct CheckPolicy {
    Scalar z = Scalar(3);              // confidence multiplier for MC verdicts
    std::int64_t budget = 1'000'000;   // MC samples per probability query
    std::uint64_t seed = 0;
};

namespace detail {

inline Method worse(Method a, Method b) { return a < b ? b : a; }

template <typename Scalar>
bool is_diagonal(const Mat<Scalar>& cov) {
    const Scalar scale = std::max(Scalar(1), cov.cwiseAbs().maxCoeff());
    for (Index i = 0; i < cov.rows(); ++i) {
        for (Index j = 0; j < cov.cols(); ++j) {
            if (i != j && std::abs(cov(i, j)) > Scalar(1e-14) * scale) return false;
        }
    }
    return true;
}

// Probability that one Gaussian component lands in the quadrant, analytic
// when possible, per-component Monte Carlo otherwise.
template <typename Scalar>
ProbabilityEstimate<Scalar> gaussian_quadrant_probability(const Gaussian<Scalar>& g,
                                                          const Quadrant<Scalar>& q,
                                                          std::int64_t budget,
                                                          std::uint64_t seed) {
    ProbabilityEstimate<Scalar> est;
    if (q.halfspaces().size() == 1) {
        const auto& h = q.halfspaces().front();
        const Scalar var = h.normal.dot(g.cov * h.normal);
        if (var <= Scalar(0)) {
            est.value = (h.normal.dot(g.mean) >= h.offset - Scalar(1e-9)) ? Scalar(1) : Scalar(0);
            est.method = Method::Exact;
        } else {
            est.value = normal_cdf((h.normal.dot(g.mean) - h.offset) / std::sqrt(var));
            est.method = Method::AnalyticGaussian;
        }
        return est;
    }
    if (is_diagonal(g.cov)) {
        if (const auto bounds = axis_aligned_bounds(q)) {
            const auto& [lo, hi] = *bounds;
            Scalar p = Scalar(1);
            for (Index j = 0; j < g.mean.size(); ++j) {
                const Scalar sigma = std::sqrt(std::max(Scalar(0), g.cov(j, j)));
                Scalar factor;
                if (sigma == Scalar(0)) {
                    factor = (g.mean(j) >= lo(j) - Scalar(1e-9) &&
                              g.mean(j) <= hi(j) + Scalar(1e-9))
                                 ? Scalar(1)
                                 : Scalar(0);
                } else {
                    const Scalar upper = std::isinf(static_cast<double>(hi(j)))
                                             ? Scalar(1)
                                             : normal_cdf((hi(j) - g.mean(j)) / sigma);
                    const Scalar lower = std::isinf(static_cast<double>(lo(j)))
                                             ? Scalar(0)
                                             : normal_cdf((lo(j) - g.mean(j)) / sigma);
                    factor = std::max(Scalar(0), upper - lower);
                }
                p *= factor;
            }
            est.value = p;
            est.method = Method::AnalyticGaussian;
            return est;
        }
    }
    // General Gaussian against a general quadrant: sample this component.
    const auto lone = FiniteMixtureMeasure<Scalar>::gaussian(g.mean, g.cov);
    const Mat<Scalar> draws = sample(lone, budget, seed);
    std::int64_t hits = 0;
    Vec<Scalar> x(draws.cols());
    for (Index i = 0; i < draws.rows(); ++i) {
        x = draws.row(i).transpose();
        if (contains(q, x)) ++hits;
    }
    const Scalar phat = Scalar(hits) / Scalar(budget);
    est.value = phat;
    est.std_error = std::sqrt(phat * (Scalar(1) - phat) / Scalar(budget));
    est.method = Method::MonteCarlo;
    est.samples = budget;
    est.seed = seed;
    return est;
}

}  // namespace detail

/// Measure of the quadrant under a finite mixture. Point masses and
/// empirical components are exact, Gaussians are analytic for a single
/// half-space or a diagonal covariance against an axis-aligned quadrant, and
/// everything else falls back to per-component Monte Carlo with the given
/// budget. Standard errors combine in quadrature across components.
template <typename Scalar>
ProbabilityEstimate<Scalar> quadrant_probability(const FiniteMixtureMeasure<Scalar>& P,
                                                 const Quadrant<Scalar>& q,
                                                 std::int64_t budget = 1'000'000,
                                                 std::uint64_t seed = 0) {
    require_same_dimension(P.dimension(), q.dimension(), "quadrant_probability");
    if (budget < 1) throw Error("quadrant_probability: budget must be positive");

    ProbabilityEstimate<Scalar> out;
    out.seed = seed;
    Scalar var_sum = Scalar(0);
    const auto& comps = P.components();
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const auto& wc = comps[k];
        ProbabilityEstimate<Scalar> part = std::visit(
            [&](const auto& c) -> ProbabilityEstimate<Scalar> {
                using T = std::decay_t<decltype(c)>;
                ProbabilityEstimate<Scalar> e;
                if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    e.value = contains(q, c.location) ? Scalar(1) : Scalar(0);
                } else if constexpr (std::is_same_v<T, Empirical<Scalar>>) {
                    std::int64_t hits = 0;
                    Vec<Scalar> x(c.points.cols());
                    for (Index i = 0; i < c.points.rows(); ++i) {
                        x = c.points.row(i).transpose();
                        if (contains(q, x)) ++hits;
                    }
                    e.value = Scalar(hits) / Scalar(c.points.rows());
                } else {
                    e = detail::gaussian_quadrant_probability(
                        c, q, budget, derive_seed(seed, "qprob.comp", k));
                }
                return e;
            },
            wc.component);
        out.value += wc.weight * part.value;
        var_sum += (wc.weight * part.std_error) * (wc.weight * part.std_error);
        out.method = detail::worse(out.method, part.method);
        out.samples += part.samples;
    }
    out.std_error = std::sqrt(var_sum);
    if (P.is_probability()) {
        out.value = std::min(Scalar(1), std::max(Scalar(0), out.value));
    }
    return out;
}

/// Plain Monte Carlo estimate over the whole mixture, bypassing all exact
/// paths. Exists so exact results can be cross-checked against an
/// independent estimator.
template <typename Scalar>
ProbabilityEstimate<Scalar> mc_quadrant_probability(const FiniteMixtureMeasure<Scalar>& P,
                                                    const Quadrant<Scalar>& q,
                                                    std::int64_t budget,
                                                    std::uint64_t seed) {
    require_same_dimension(P.dimension(), q.dimension(), "mc_quadrant_probability");
    if (budget < 1) throw Error("mc_quadrant_probability: budget must be positive");
    const Mat<Scalar> draws = sample(P, budget, seed);
    std::int64_t hits = 0;
    Vec<Scalar> x(draws.cols());
    for (Index i = 0; i < draws.rows(); ++i) {
        x = draws.row(i).transpose();
        if (contains(q, x)) ++hits;
    }
    ProbabilityEstimate<Scalar> est;
    const Scalar phat = Scalar(hits) / Scalar(budget);
    est.value = phat;
    est.std_error = std::sqrt(phat * (Scalar(1) - phat) / Scalar(budget));
    est.method = Method::MonteCarlo;
    est.samples = budget;
    est.seed = seed;
    return est;
}

namespace detail {

template <typename Scalar>
Verdict band_verdict(const ProbabilityEstimate<Scalar>& est, Scalar floor, Scalar z) {
    if (est.method != Method::MonteCarlo) {
        return est.value >= floor - Scalar(1e-12) ? Verdict::Satisfied : Verdict::Violated;
    }
    if (est.value - z * est.std_error >= floor) return Verdict::Satisfied;
    if (est.value + z * est.std_error < floor) return Verdict::Violated;
    return Verdict::Inconclusive;
}

}  // namespace detail

template <typename Scalar>
struct RequirementCheck {
    ProbabilityEstimate<Scalar> estimate;
    Verdict verdict;
};

template <typename Scalar>
RequirementCheck<Scalar> check_requirement(const FiniteMixtureMeasure<Scalar>& P,
                                           const QuadrantRequirement<Scalar>& r,
                                           const CheckPolicy<Scalar>& policy = {}) {
    RequirementCheck<Scalar> out;
    out.estimate = quadrant_probability(P, r.quadrant, policy.budget, policy.seed);
    out.verdict = detail::band_verdict(out.estimate, r.floor, policy.z);
    return out;
}

template <typename Scalar>
struct SetReport {
    std::vector<RequirementCheck<Scalar>> checks;
    Overall overall = Overall::AllSatisfied;
};

/// Runs every requirement with its own derived seed; empty sets pass
/// vacuously. Overall is AllSatisfied only when every verdict is Satisfied,
/// SomeViolated as soon as one is Violated.
template <typename Scalar>
SetReport<Scalar> check_set(const FiniteMixtureMeasure<Scalar>& P,
                            const RequirementSet<Scalar>& rs,
                            const CheckPolicy<Scalar>& policy = {}) {
    SetReport<Scalar> report;
    report.checks.reserve(rs.size());
    bool any_violated = false;
    bool any_inconclusive = false;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        CheckPolicy<Scalar> local = policy;
        local.seed = derive_seed(policy.seed, "req", i);
        report.checks.push_back(check_requirement(P, rs.requirements()[i], local));
        if (report.checks.back().verdict == Verdict::Violated) any_violated = true;
        if (report.checks.back().verdict == Verdict::Inconclusive) any_inconclusive = true;
    }
    report.overall = any_violated ? Overall::SomeViolated
                     : any_inconclusive ? Overall::Inconclusive
                                        : Overall::AllSatisfied;
    return report;
}

template <typename Scalar>
struct GeneralizedEvaluation {
    Scalar value = Scalar(0);
    Scalar std_error = Scalar(0);
    Method method = Method::Exact;
    Verdict verdict = Verdict::Satisfied;
};

/// Integral of the step function against mu, term by term. Signed mixtures
/// are allowed; each component of the mixture is still a distribution, so
/// per-component sampling remains well defined even with negative weights.
template <typename Scalar>
GeneralizedEvaluation<Scalar> evaluate_generalized(const FiniteMixtureMeasure<Scalar>& mu,
                                                   const GeneralizedRequirement<Scalar>& g,
                                                   const CheckPolicy<Scalar>& policy = {}) {
    GeneralizedEvaluation<Scalar> out;
    Scalar var_sum = Scalar(0);
    for (std::size_t k = 0; k < g.terms.size(); ++k) {
        const auto& [coef, quadrant] = g.terms[k];
        const auto est = quadrant_probability(mu, quadrant, policy.budget,
                                              derive_seed(policy.seed, "gen", k));
        out.value += coef * est.value;
        var_sum += (coef * est.std_error) * (coef * est.std_error);
        out.method = detail::worse(out.method, est.method);
    }
    out.std_error = std::sqrt(var_sum);
    if (out.method != Method::MonteCarlo) {
        out.verdict = out.value >= g.threshold - Scalar(1e-12) ? Verdict::Satisfied
                                                               : Verdict::Violated;
    } else if (out.value - policy.z * out.std_error >= g.threshold) {
        out.verdict = Verdict::Satisfied;
    } else if (out.value + policy.z * out.std_error < g.threshold) {
        out.verdict = Verdict::Violated;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

}  // namespace quadmix

#endif  // QUADMIX_REQUIREMENTS_HPP
