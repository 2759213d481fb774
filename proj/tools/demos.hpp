#ifndef QUADMIX_TOOLS_DEMOS_HPP
#define QUADMIX_TOOLS_DEMOS_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <quadmix/quadmix.hpp>

namespace quadmix::demos {

struct DemoResult {
    std::string text;
    io::Json report;
    bool pass = true;
};

inline Vec<double> vec1(double x) {
    Vec<double> v(1);
    v << x;
    return v;
}

inline Vec<double> vec2(double x, double y) {
    Vec<double> v(2);
    v << x, y;
    return v;
}

namespace detail {

inline void note(DemoResult& r, std::ostringstream& os, bool ok, const std::string& what) {
    os << "  [" << (ok ? "PASS" : "FAIL") << "] " << what << "\n";
    r.pass = r.pass && ok;
}

inline io::Json weights_of(const FiniteMixtureMeasure<double>& m) {
    io::Json w = io::Json::array();
    for (const auto& wc : m.components()) w.push_back(wc.weight);
    return w;
}

}  // namespace detail

/// Order sensitivity of successive aggregation: aggregating two scenarios in
/// one step, first-then-second, and second-then-first produces three
/// different mixtures whose weights follow closed forms.
inline DemoResult demo_successive() {
    DemoResult r;
    std::ostringstream os;
    const double p1 = 0.1, p2 = 0.2;
    const Vec<double> d1 = vec1(1.0), d2 = vec1(2.0);
    const auto base = FiniteMixtureMeasure<double>::point_mass(vec1(0.0));
    const ScenarioSet<double> M1({{d1, p1}});
    const ScenarioSet<double> M2({{d2, p2}});
    const ScenarioSet<double> both({{d1, p1}, {d2, p2}});

    const auto one_step = aggregate_point_mass(base, both);
    const auto first_then_second =
        aggregate_successive(base, {M1, M2}, AggregationMethod::PointMass);
    const auto second_then_first =
        aggregate_successive(base, {M2, M1}, AggregationMethod::PointMass);

    auto expect = [&](double w0, double w1, double w2) {
        std::vector<WeightedComponent<double>> comps;
        comps.push_back({w0, PointMass<double>{vec1(0.0)}});
        comps.push_back({w1, PointMass<double>{d1}});
        comps.push_back({w2, PointMass<double>{d2}});
        return FiniteMixtureMeasure<double>(1, std::move(comps));
    };

    os << "Two scenarios (d1=1, p1=0.1) and (d2=2, p2=0.2) on the point mass at 0.\n";
    os << "  one step:            weights " << detail::weights_of(one_step).dump() << "\n";
    os << "  first then second:   weights " << detail::weights_of(first_then_second).dump()
       << "\n";
    os << "  second then first:   weights " << detail::weights_of(second_then_first).dump()
       << "\n";

    detail::note(r, os, canonically_equal(one_step, expect(1 - p1 - p2, p1, p2)),
                 "one-step weights (1-p1-p2, p1, p2)");
    detail::note(r, os,
                 canonically_equal(first_then_second,
                                   expect((1 - p1) * (1 - p2), p1 * (1 - p2), p2)),
                 "successive weights ((1-p1)(1-p2), p1(1-p2), p2)");
    detail::note(r, os,
                 canonically_equal(second_then_first,
                                   expect((1 - p1) * (1 - p2), p1, (1 - p1) * p2)),
                 "reversed weights ((1-p1)(1-p2), p1, (1-p1)p2)");
    detail::note(r, os,
                 !canonically_equal(one_step, first_then_second) &&
                     !canonically_equal(one_step, second_then_first) &&
                     !canonically_equal(first_then_second, second_then_first),
                 "all three results differ pairwise");

    r.report["one_step"] = detail::weights_of(one_step);
    r.report["first_then_second"] = detail::weights_of(first_then_second);
    r.report["second_then_first"] = detail::weights_of(second_then_first);
    r.text = os.str();
    return r;
}

/// Shifting aggregation cannot force mass into a bounded quadrant when no
/// translate of the base measure carries enough: translations preserve the
/// maximal interval mass. Point-mass aggregation fixes the same requirement.
inline DemoResult demo_counterexample(std::uint64_t seed) {
    DemoResult r;
    std::ostringstream os;
    const auto P = FiniteMixtureMeasure<double>::gaussian(vec1(0.0), Mat<double>::Identity(1, 1));
    const auto box = Quadrant<double>::axis_box(vec1(0.0), vec1(1.0));
    const double p_max = 0.5;
    // Largest mass any unit interval can carry under N(0,1): the one
    // centered at the mean, 2 Phi(1/2) - 1.
    const double interval_bound = 2 * normal_cdf(0.5) - 1;

    os << "Requirement P([0,1]) >= " << p_max << " against N(0,1): no unit interval carries\n";
    os << "more than " << interval_bound << ", and shifting only mixes translates.\n";

    const int trials = 50;
    int below = 0;
    bool all_exact = true;
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_rng(derive_seed(seed, "demo.counterexample", t));
        const int k = 1 + static_cast<int>(uniform01(rng) * 3);
        std::vector<EnhancedScenario<double>> scenarios;
        for (int i = 0; i < k; ++i) {
            scenarios.push_back({vec1(-5 + 10 * uniform01(rng)), 0.3 * uniform01(rng)});
        }
        const auto shifted = aggregate_shifting(P, ScenarioSet<double>(std::move(scenarios)));
        const auto est = quadrant_probability(shifted, box);
        all_exact = all_exact && est.method != Method::MonteCarlo;
        worst = std::max(worst, est.value);
        if (est.value < p_max) ++below;
    }
    os << "  " << below << "/" << trials << " random shifting aggregations stay below " << p_max
       << " (max seen " << worst << ")\n";
    detail::note(r, os, below == trials && all_exact,
                 "shifting never reaches the floor, analytically");

    const RequirementSet<double> rs({{box, p_max}});
    const auto M = scenarios_from_requirements_pointmass(rs);
    const auto fixed = aggregate_point_mass(P, M);
    const auto report = check_set(fixed, rs);
    os << "  point-mass synthesis places an atom at "
       << M.scenarios().front().deflection(0) << " and reaches "
       << report.checks.front().estimate.value << "\n";
    detail::note(r, os, report.overall == Overall::AllSatisfied,
                 "point-mass construction satisfies the same requirement");

    r.report["trials"] = trials;
    r.report["below_floor"] = below;
    r.report["max_shifted_mass"] = worst;
    r.report["interval_bound"] = interval_bound;
    r.report["pointmass_value"] = report.checks.front().estimate.value;
    r.text = os.str();
    return r;
}

/// For additive (linear, zero intercept) valuations, aggregating scenarios
/// in risk-factor space by shifting and aggregating their impacts at capital
/// level produce the same capital distribution.
inline DemoResult demo_sst_equivalence() {
    DemoResult r;
    std::ostringstream os;
    Mat<double> cov(2, 2);
    cov << 1.0, 0.3, 0.3, 2.0;
    const auto P = FiniteMixtureMeasure<double>::gaussian(vec2(0.5, -0.25), cov);
    const ScenarioSet<double> M({{vec2(1.5, -2.0), 0.05}, {vec2(-3.0, 1.0), 0.1}});
    const ValuationFunction<double> V = LinearValuation<double>{vec2(2.0, -1.0), 0.0};

    const auto factor_level = pushforward_capital(V, aggregate_shifting(P, M));
    std::vector<std::pair<double, double>> impacts;
    for (const auto& s : M.scenarios()) impacts.emplace_back(impact(V, s), s.probability);
    const auto capital_level = sst_aggregate_capital(pushforward_capital(V, P), impacts);

    os << "Additive valuation V(x) = 2 x1 - x2 over a correlated Gaussian with two scenarios.\n";
    os << "  shifting then valuing:  " << io::measure_to_json(factor_level).dump() << "\n";
    os << "  valuing then shifting:  " << io::measure_to_json(capital_level).dump() << "\n";
    detail::note(r, os, canonically_equal(factor_level, capital_level, 1e-12),
                 "capital distributions agree component for component");

    r.report["factor_level"] = io::measure_to_json(factor_level);
    r.report["capital_level"] = io::measure_to_json(capital_level);
    r.text = os.str();
    return r;
}

/// Point-mass aggregation is injective below total probability one: the base
/// measure can be read back off the aggregate.
inline DemoResult demo_recovery() {
    DemoResult r;
    std::ostringstream os;
    std::vector<WeightedComponent<double>> comps;
    comps.push_back({0.6, Gaussian<double>{vec1(0.0), Mat<double>::Identity(1, 1)}});
    comps.push_back({0.4, PointMass<double>{vec1(3.0)}});
    const FiniteMixtureMeasure<double> P(1, std::move(comps));
    const ScenarioSet<double> M({{vec1(2.0), 0.25}, {vec1(-1.0), 0.05}});

    const auto aggregated = aggregate_point_mass(P, M);
    const auto recovered = recover_base_measure(aggregated, M);
    os << "Base 0.6 N(0,1) + 0.4 delta_3, scenarios (2, 0.25) and (-1, 0.05).\n";
    os << "  aggregated: " << io::measure_to_json(aggregated).dump() << "\n";
    os << "  recovered:  " << io::measure_to_json(recovered).dump() << "\n";
    detail::note(r, os, canonically_equal(recovered, P), "round trip restores the base measure");

    bool threw = false;
    try {
        recover_base_measure(aggregate_point_mass(P, ScenarioSet<double>({{vec1(1.0), 1.0}})),
                             ScenarioSet<double>({{vec1(1.0), 1.0}}));
    } catch (const NotInvertible&) {
        threw = true;
    }
    detail::note(r, os, threw, "total probability one is rejected as non-invertible");

    r.report["aggregated"] = io::measure_to_json(aggregated);
    r.report["recovered"] = io::measure_to_json(recovered);
    r.text = os.str();
    return r;
}

/// A company hedged against a risk factor sees zero impact from scenarios
/// deflecting that factor, and its capital requirement does not move under
/// capital-level aggregation; an exposed company's does.
inline DemoResult demo_hedged_company() {
    DemoResult r;
    std::ostringstream os;
    Mat<double> cov = Mat<double>::Zero(2, 2);
    cov(0, 0) = 0.0075 * 0.0075;  // ten-year rate
    cov(1, 1) = 0.04;             // equity book
    const auto P = FiniteMixtureMeasure<double>::gaussian(vec2(0.015, 0.0), cov);
    const EnhancedScenario<double> rate_crash{vec2(-0.012, 0.0), 0.02};

    const ValuationFunction<double> hedged = LinearValuation<double>{vec2(0.0, 1.0), 0.0};
    const ValuationFunction<double> exposed = LinearValuation<double>{vec2(200.0, 1.0), 0.0};

    const double impact_hedged = impact(hedged, rate_crash);
    const double impact_exposed = impact(exposed, rate_crash);
    os << "Rate-crash scenario d = (-0.012, 0) with probability 0.02.\n";
    os << "  hedged book impact:  " << impact_hedged << "\n";
    os << "  exposed book impact: " << impact_exposed << "\n";
    detail::note(r, os, impact_hedged == 0.0, "hedged valuation ignores the rate deflection");
    detail::note(r, os, impact_exposed < 0.0, "exposed valuation loses capital");

    const double alpha = 0.01;
    auto var_shift = [&](const ValuationFunction<double>& V, double imp) {
        const auto before = pushforward_capital(V, P);
        const auto after = sst_aggregate_capital(before, {{imp, rate_crash.probability}});
        return std::make_pair(value_at_risk(before, alpha), value_at_risk(after, alpha));
    };
    const auto [hedged_before, hedged_after] = var_shift(hedged, impact_hedged);
    const auto [exposed_before, exposed_after] = var_shift(exposed, impact_exposed);
    os << "  hedged VaR(1%):  " << hedged_before << " -> " << hedged_after << "\n";
    os << "  exposed VaR(1%): " << exposed_before << " -> " << exposed_after << "\n";
    detail::note(r, os, std::abs(hedged_after - hedged_before) <= 1e-8,
                 "hedged capital requirement unchanged by the scenario");
    detail::note(r, os, exposed_after > exposed_before + 1e-6,
                 "exposed capital requirement increases");

    r.report["impact_hedged"] = impact_hedged;
    r.report["impact_exposed"] = impact_exposed;
    r.report["hedged_var"] = {{"before", hedged_before}, {"after", hedged_after}};
    r.report["exposed_var"] = {{"before", exposed_before}, {"after", exposed_after}};
    r.text = os.str();
    return r;
}

}  // namespace quadmix::demos

#endif  // QUADMIX_TOOLS_DEMOS_HPP
