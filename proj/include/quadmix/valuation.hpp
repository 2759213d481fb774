#ifndef QUADMIX_VALUATION_HPP
#define QUADMIX_VALUATION_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "quadmix/measures.hpp"
#include "quadmix/scenarios.hpp"
#include "quadmix/seeding.hpp"
#include "quadmix/stats.hpp"
#include "quadmix/types.hpp"

namespace quadmix {

/// V(x) = gradient . x + intercept. A zero gradient is allowed and models a
/// fully hedged book (capital insensitive to the risk factors).
template <typename Scalar>
struct LinearValuation {
    Vec<Scalar> gradient;
    Scalar intercept = Scalar(0);
};

template <typename Scalar>
struct AffinePiece {
    Vec<Scalar> a;
    Scalar b = Scalar(0);
};

enum class PiecewiseSign { Max, Min };

/// V(x) = max (or min) over affine pieces. The smallest family that is
/// closed under twisting, exactly evaluable, and genuinely non-additive,
/// which is what hedged positions need.
template <typename Scalar>
struct MaxAffineValuation {
    std::vector<AffinePiece<Scalar>> pieces;
    PiecewiseSign sign = PiecewiseSign::Max;
};

template <typename Scalar>
using ValuationFunction = std::variant<LinearValuation<Scalar>, MaxAffineValuation<Scalar>>;

template <typename Scalar>
Index valuation_dimension(const ValuationFunction<Scalar>& V) {
    if (const auto* lin = std::get_if<LinearValuation<Scalar>>(&V)) {
        return lin->gradient.size();
    }
    const auto& ma = std::get<MaxAffineValuation<Scalar>>(V);
    if (ma.pieces.empty()) throw Error("piecewise valuation needs at least one piece");
    return ma.pieces.front().a.size();
}

template <typename Scalar>
Scalar evaluate(const ValuationFunction<Scalar>& V, const Vec<Scalar>& x) {
    if (const auto* lin = std::get_if<LinearValuation<Scalar>>(&V)) {
        require_same_dimension(lin->gradient.size(), x.size(), "evaluate");
        return lin->gradient.dot(x) + lin->intercept;
    }
    const auto& ma = std::get<MaxAffineValuation<Scalar>>(V);
    if (ma.pieces.empty()) throw Error("piecewise valuation needs at least one piece");
    Scalar best = Scalar(0);
    for (std::size_t k = 0; k < ma.pieces.size(); ++k) {
        require_same_dimension(ma.pieces[k].a.size(), x.size(), "evaluate");
        const Scalar v = ma.pieces[k].a.dot(x) + ma.pieces[k].b;
        if (k == 0) {
            best = v;
        } else if (ma.sign == PiecewiseSign::Max ? v > best : v < best) {
            best = v;
        }
    }
    return best;
}

/// Capital impact of a scenario, V evaluated at its deflection.
template <typename Scalar>
Scalar impact(const ValuationFunction<Scalar>& V, const EnhancedScenario<Scalar>& s) {
    return evaluate(V, s.deflection);
}

/// Twisted valuation V_d(x) = V(x + d) - V(d). Linear valuations lose their
/// intercept and nothing else; affine pieces absorb the shift into their
/// offsets.
template <typename Scalar>
ValuationFunction<Scalar> twist(const ValuationFunction<Scalar>& V, const Vec<Scalar>& d) {
    if (const auto* lin = std::get_if<LinearValuation<Scalar>>(&V)) {
        require_same_dimension(lin->gradient.size(), d.size(), "twist");
        return LinearValuation<Scalar>{lin->gradient, Scalar(0)};
    }
    const Scalar vd = evaluate(V, d);
    const auto& ma = std::get<MaxAffineValuation<Scalar>>(V);
    MaxAffineValuation<Scalar> out;
    out.sign = ma.sign;
    out.pieces.reserve(ma.pieces.size());
    for (const auto& p : ma.pieces) {
        out.pieces.push_back({p.a, p.b + p.a.dot(d) - vd});
    }
    return out;
}

/// One-dimensional distribution of available capital.
template <typename Scalar>
using CapitalDistribution = FiniteMixtureMeasure<Scalar>;

/// Image of P under V. Gaussian components map exactly through linear
/// valuations and are sampled through piecewise ones; atoms and empirical
/// components evaluate pointwise either way.
template <typename Scalar>
CapitalDistribution<Scalar> pushforward_capital(const ValuationFunction<Scalar>& V,
                                                const FiniteMixtureMeasure<Scalar>& P,
                                                std::int64_t budget = 1'000'000,
                                                std::uint64_t seed = 0) {
    require_same_dimension(valuation_dimension(V), P.dimension(), "pushforward_capital");
    if (budget < 1) throw Error("pushforward_capital: budget must be positive");
    std::vector<WeightedComponent<Scalar>> comps;
    comps.reserve(P.components().size());
    const auto& source = P.components();
    for (std::size_t k = 0; k < source.size(); ++k) {
        const auto& wc = source[k];
        MeasureComponent<Scalar> image = std::visit(
            [&](const auto& c) -> MeasureComponent<Scalar> {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    Vec<Scalar> v(1);
                    v(0) = evaluate(V, c.location);
                    return PointMass<Scalar>{v};
                } else if constexpr (std::is_same_v<T, Empirical<Scalar>>) {
                    Mat<Scalar> vals(c.points.rows(), 1);
                    for (Index i = 0; i < c.points.rows(); ++i) {
                        vals(i, 0) = evaluate(V, Vec<Scalar>(c.points.row(i).transpose()));
                    }
                    return Empirical<Scalar>{std::move(vals)};
                } else {
                    if (const auto* lin = std::get_if<LinearValuation<Scalar>>(&V)) {
                        Vec<Scalar> mu(1);
                        mu(0) = lin->gradient.dot(c.mean) + lin->intercept;
                        Mat<Scalar> var(1, 1);
                        var(0, 0) = lin->gradient.dot(c.cov * lin->gradient);
                        return Gaussian<Scalar>{std::move(mu), std::move(var)};
                    }
                    const auto lone = FiniteMixtureMeasure<Scalar>::gaussian(c.mean, c.cov);
                    const Mat<Scalar> draws =
                        sample(lone, budget, derive_seed(seed, "capital.comp", k));
                    Mat<Scalar> vals(draws.rows(), 1);
                    for (Index i = 0; i < draws.rows(); ++i) {
                        vals(i, 0) = evaluate(V, Vec<Scalar>(draws.row(i).transpose()));
                    }
                    return Empirical<Scalar>{std::move(vals)};
                }
            },
            wc.component);
        comps.push_back({wc.weight, std::move(image)});
    }
    return FiniteMixtureMeasure<Scalar>(1, std::move(comps), P.is_probability());
}

/// Scenario aggregation performed at capital level: mix the capital
/// distribution with copies of itself translated by each scenario impact.
template <typename Scalar>
CapitalDistribution<Scalar> sst_aggregate_capital(
    const CapitalDistribution<Scalar>& PV,
    const std::vector<std::pair<Scalar, Scalar>>& impacts) {
    require_same_dimension(PV.dimension(), 1, "sst_aggregate_capital");
    Scalar p_total = Scalar(0);
    for (const auto& [shift, p] : impacts) {
        (void)shift;
        if (!(p >= Scalar(0) && p <= Scalar(1))) {
            throw Error("sst_aggregate_capital: scenario probability outside [0,1]");
        }
        p_total += p;
    }
    if (p_total > Scalar(1) + Scalar(1e-12)) {
        throw Error("sst_aggregate_capital: probabilities sum to more than 1");
    }
    std::vector<std::pair<Scalar, FiniteMixtureMeasure<Scalar>>> parts;
    parts.reserve(1 + impacts.size());
    parts.emplace_back(Scalar(1) - p_total, PV);
    for (const auto& [shift, p] : impacts) {
        Vec<Scalar> d(1);
        d(0) = shift;
        parts.emplace_back(p, translate(PV, d));
    }
    return mix(parts);
}

/// Right-continuous CDF of a one-dimensional mixture, analytic per
/// component.
template <typename Scalar>
Scalar cdf(const CapitalDistribution<Scalar>& D, Scalar x) {
    require_same_dimension(D.dimension(), 1, "cdf");
    Scalar f = Scalar(0);
    for (const auto& wc : D.components()) {
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                    const Scalar sigma = std::sqrt(std::max(Scalar(0), c.cov(0, 0)));
                    if (sigma == Scalar(0)) {
                        f += c.mean(0) <= x ? wc.weight : Scalar(0);
                    } else {
                        f += wc.weight * normal_cdf((x - c.mean(0)) / sigma);
                    }
                } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    f += c.location(0) <= x ? wc.weight : Scalar(0);
                } else {
                    Index below = 0;
                    for (Index i = 0; i < c.points.rows(); ++i) {
                        if (c.points(i, 0) <= x) ++below;
                    }
                    f += wc.weight * Scalar(below) / Scalar(c.points.rows());
                }
            },
            wc.component);
    }
    return f;
}

namespace detail {

template <typename Scalar>
std::pair<Scalar, Scalar> support_bracket(const CapitalDistribution<Scalar>& D) {
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = -std::numeric_limits<Scalar>::infinity();
    for (const auto& wc : D.components()) {
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                    const Scalar sigma = std::sqrt(std::max(Scalar(0), c.cov(0, 0)));
                    lo = std::min(lo, c.mean(0) - Scalar(40) * sigma - Scalar(1));
                    hi = std::max(hi, c.mean(0) + Scalar(40) * sigma + Scalar(1));
                } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    lo = std::min(lo, c.location(0) - Scalar(1));
                    hi = std::max(hi, c.location(0) + Scalar(1));
                } else {
                    lo = std::min(lo, c.points.col(0).minCoeff() - Scalar(1));
                    hi = std::max(hi, c.points.col(0).maxCoeff() + Scalar(1));
                }
            },
            wc.component);
    }
    return {lo, hi};
}

}  // namespace detail

/// Left-continuous generalized inverse q = inf{ x : F(x) >= alpha }, located
/// by bisection on the analytic CDF to absolute tolerance 1e-10.
template <typename Scalar>
Scalar quantile(const CapitalDistribution<Scalar>& D, Scalar alpha) {
    require_same_dimension(D.dimension(), 1, "quantile");
    if (!(alpha > Scalar(0) && alpha < Scalar(1))) {
        throw AlphaOutOfRange("quantile: alpha must lie in (0,1)");
    }
    if (!D.is_probability()) {
        throw NonProbabilityMeasure("quantile: needs a probability measure");
    }
    auto [lo, hi] = detail::support_bracket(D);
    for (int i = 0; i < 200 && cdf(D, lo) >= alpha; ++i) lo -= std::max(Scalar(1), hi - lo);
    for (int i = 0; i < 200 && cdf(D, hi) < alpha; ++i) hi += std::max(Scalar(1), hi - lo);
    while (hi - lo > Scalar(1e-10)) {
        const Scalar mid = (lo + hi) / Scalar(2);
        if (cdf(D, mid) >= alpha) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

/// Capital requirement at level alpha, the negated lower quantile.
template <typename Scalar>
Scalar value_at_risk(const CapitalDistribution<Scalar>& D, Scalar alpha) {
    return -quantile(D, alpha);
}

/// Average loss in the alpha tail: -(1/alpha) E[X 1{X <= q}], with the atom
/// at q only counted for the mass needed to fill the tail up to alpha.
template <typename Scalar>
Scalar expected_shortfall(const CapitalDistribution<Scalar>& D, Scalar alpha) {
    const Scalar q = quantile(D, alpha);
    const Scalar atol = Scalar(1e-9);

    Scalar mass_below = Scalar(0);
    Scalar e_below = Scalar(0);
    for (const auto& wc : D.components()) {
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                    const Scalar mu = c.mean(0);
                    const Scalar sigma = std::sqrt(std::max(Scalar(0), c.cov(0, 0)));
                    if (sigma == Scalar(0)) {
                        if (mu < q - atol) {
                            mass_below += wc.weight;
                            e_below += wc.weight * mu;
                        }
                    } else {
                        const Scalar z = (q - mu) / sigma;
                        mass_below += wc.weight * normal_cdf(z);
                        e_below += wc.weight * (mu * normal_cdf(z) - sigma * normal_pdf(z));
                    }
                } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    if (c.location(0) < q - atol) {
                        mass_below += wc.weight;
                        e_below += wc.weight * c.location(0);
                    }
                } else {
                    const Scalar rows = Scalar(c.points.rows());
                    for (Index i = 0; i < c.points.rows(); ++i) {
                        if (c.points(i, 0) < q - atol) {
                            mass_below += wc.weight / rows;
                            e_below += wc.weight * c.points(i, 0) / rows;
                        }
                    }
                }
            },
            wc.component);
    }
    const Scalar theta = std::max(Scalar(0), alpha - mass_below);
    return -(e_below + q * theta) / alpha;
}

}  // namespace quadmix

#endif  // QUADMIX_VALUATION_HPP
