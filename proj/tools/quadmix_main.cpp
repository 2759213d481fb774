#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <quadmix/quadmix.hpp>

#include "demos.hpp"

namespace {

using quadmix::io::Json;

struct GlobalOptions {
    std::uint64_t seed = 1;
    std::int64_t budget = 1'000'000;
    double z = 3.0;
    std::string output = "-";
};

void emit(const Json& j, const GlobalOptions& opts) {
    if (opts.output == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(opts.output);
        if (!out) throw quadmix::Error("cannot write to " + opts.output);
        out << j.dump(2) << "\n";
    }
}

int exit_code_for(quadmix::Overall overall) {
    switch (overall) {
        case quadmix::Overall::AllSatisfied: return 0;
        case quadmix::Overall::SomeViolated: return 2;
        default: return 3;
    }
}

quadmix::CheckPolicy<double> policy_of(const GlobalOptions& opts) {
    return {opts.z, opts.budget, opts.seed};
}

int cmd_check(const GlobalOptions& opts, const std::string& measure_file,
              const std::string& requirements_file) {
    const auto P = quadmix::io::parse_measure(quadmix::io::load_json_file(measure_file));
    const auto rs =
        quadmix::io::parse_requirement_set(quadmix::io::load_json_file(requirements_file));
    const auto report = quadmix::check_set(P, rs, policy_of(opts));
    emit(quadmix::io::report_to_json(report), opts);
    return exit_code_for(report.overall);
}

int cmd_aggregate(const GlobalOptions& opts, const std::string& measure_file,
                  const std::string& scenarios_file, const std::string& method,
                  const std::string& inner) {
    const auto P = quadmix::io::parse_measure(quadmix::io::load_json_file(measure_file));
    const Json sj = quadmix::io::load_json_file(scenarios_file);

    quadmix::FiniteMixtureMeasure<double> result = P;
    if (method == "pointmass" || method == "shifting" || method == "phi") {
        const auto M = quadmix::io::parse_scenario_set(sj);
        if (method == "pointmass") {
            result = quadmix::aggregate_point_mass(P, M);
        } else if (method == "shifting") {
            result = quadmix::aggregate_shifting(P, M);
        } else {
            if (!sj.contains("maps")) {
                throw quadmix::Error("phi aggregation needs a \"maps\" array in the scenario file");
            }
            result = quadmix::aggregate_phi(P, M, quadmix::io::parse_phi_maps(sj["maps"]));
        }
    } else {  // successive
        if (!sj.contains("sets")) {
            throw quadmix::Error(
                "successive aggregation needs a \"sets\" array of scenario sets");
        }
        std::vector<quadmix::ScenarioSet<double>> sets;
        for (const auto& one : sj["sets"]) {
            sets.push_back(quadmix::io::parse_scenario_set(one));
        }
        const auto step = inner == "shifting" ? quadmix::AggregationMethod::Shifting
                                              : quadmix::AggregationMethod::PointMass;
        result = quadmix::aggregate_successive(P, sets, step);
    }
    emit(quadmix::io::measure_to_json(result), opts);
    return 0;
}

int cmd_synthesize(const GlobalOptions& opts, const std::string& requirements_file,
                   const std::string& method, const std::string& measure_file) {
    const auto rs =
        quadmix::io::parse_requirement_set(quadmix::io::load_json_file(requirements_file));

    quadmix::Index dim = 1;
    if (!rs.empty()) dim = rs.requirements().front().quadrant.dimension();
    quadmix::FiniteMixtureMeasure<double> P =
        measure_file.empty()
            ? quadmix::FiniteMixtureMeasure<double>::point_mass(
                  quadmix::Vec<double>::Zero(dim))
            : quadmix::io::parse_measure(quadmix::io::load_json_file(measure_file));

    Json out;
    quadmix::SetReport<double> verification;
    if (method == "pointmass") {
        const auto M = quadmix::scenarios_from_requirements_pointmass(rs);
        verification = quadmix::check_set(quadmix::aggregate_point_mass(P, M), rs,
                                          policy_of(opts));
        out = quadmix::io::scenario_set_to_json(M);
    } else {  // shifting
        const std::optional<quadmix::ShiftingSynthesisParams<double>> auto_params;
        const auto synth = quadmix::scenarios_from_requirements_shifting(
            P, rs, auto_params, quadmix::derive_seed(opts.seed, "synthesize"));
        verification = quadmix::check_set(quadmix::aggregate_shifting(P, synth.scenarios), rs,
                                          policy_of(opts));
        out = quadmix::io::scenario_set_to_json(synth.scenarios);
        out["epsilon"] = synth.epsilon;
        out["radius"] = synth.radius;
        out["center"] = quadmix::io::vector_to_json(synth.center);
    }
    out["verification"] = quadmix::io::report_to_json(verification);
    emit(out, opts);
    return exit_code_for(verification.overall);
}

int cmd_recover(const GlobalOptions& opts, const std::string& measure_file,
                const std::string& scenarios_file) {
    const auto Q = quadmix::io::parse_measure(quadmix::io::load_json_file(measure_file));
    const auto M =
        quadmix::io::parse_scenario_set(quadmix::io::load_json_file(scenarios_file));
    emit(quadmix::io::measure_to_json(quadmix::recover_base_measure(Q, M)), opts);
    return 0;
}

int cmd_riskmeasure(const GlobalOptions& opts, const std::string& measure_file,
                    const std::string& valuation_file, double alpha,
                    const std::string& which, const std::string& scenarios_file,
                    const std::string& method) {
    const auto P = quadmix::io::parse_measure(quadmix::io::load_json_file(measure_file));
    const auto V = quadmix::io::parse_valuation(quadmix::io::load_json_file(valuation_file));

    const auto base_capital = quadmix::pushforward_capital(
        V, P, opts.budget, quadmix::derive_seed(opts.seed, "capital.base"));

    Json out;
    out["alpha"] = alpha;
    out["risk_measure"] = which;
    out["convention"] = "V is available capital; figures are negated lower quantiles";
    const double var_before = quadmix::value_at_risk(base_capital, alpha);
    const double es_before = quadmix::expected_shortfall(base_capital, alpha);
    out["before"] = {{"var", var_before}, {"es", es_before}};
    double requirement = which == "es" ? es_before : var_before;

    if (!scenarios_file.empty()) {
        const auto M =
            quadmix::io::parse_scenario_set(quadmix::io::load_json_file(scenarios_file));
        quadmix::CapitalDistribution<double> after_capital = base_capital;
        if (method == "pointmass") {
            after_capital = quadmix::pushforward_capital(
                V, quadmix::aggregate_point_mass(P, M), opts.budget,
                quadmix::derive_seed(opts.seed, "capital.aggregated"));
        } else if (method == "shifting") {
            after_capital = quadmix::pushforward_capital(
                V, quadmix::aggregate_shifting(P, M), opts.budget,
                quadmix::derive_seed(opts.seed, "capital.aggregated"));
        } else {  // sst
            std::vector<std::pair<double, double>> impacts;
            for (const auto& s : M.scenarios()) {
                impacts.emplace_back(quadmix::impact(V, s), s.probability);
            }
            after_capital = quadmix::sst_aggregate_capital(base_capital, impacts);
        }
        const double var_after = quadmix::value_at_risk(after_capital, alpha);
        const double es_after = quadmix::expected_shortfall(after_capital, alpha);
        out["after"] = {{"var", var_after}, {"es", es_after}};
        out["method"] = method;
        requirement = which == "es" ? es_after : var_after;
    }
    out["requirement"] = requirement;
    emit(out, opts);
    return 0;
}

int cmd_demo(const GlobalOptions& opts, const std::string& name) {
    quadmix::demos::DemoResult result;
    if (name == "successive") {
        result = quadmix::demos::demo_successive();
    } else if (name == "counterexample") {
        result = quadmix::demos::demo_counterexample(opts.seed);
    } else if (name == "sst-equivalence") {
        result = quadmix::demos::demo_sst_equivalence();
    } else if (name == "recovery") {
        result = quadmix::demos::demo_recovery();
    } else if (name == "hedged-company") {
        result = quadmix::demos::demo_hedged_company();
    } else {
        std::cerr << "unknown demo: " << name << "\n";
        return 1;
    }
    std::cout << result.text;
    result.report["pass"] = result.pass;
    emit(result.report, opts);
    return result.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario aggregation and quadrant requirement toolkit"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--seed", opts.seed, "master seed for all derived randomness")
        ->capture_default_str();
    app.add_option("--budget", opts.budget, "Monte Carlo samples per probability query")
        ->check(CLI::Range(std::int64_t(1000), std::int64_t(1) << 40))
        ->capture_default_str();
    app.add_option("--z", opts.z, "confidence multiplier for Monte Carlo verdicts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--output", opts.output, "write the JSON report here instead of stdout");

    std::string measure_file, requirements_file, scenarios_file, valuation_file;
    std::string method, inner = "pointmass", demo_name, risk_which = "var";
    double alpha = 0.01;

    auto* check = app.add_subcommand("check", "check quadrant requirements against a measure");
    check->add_option("measure", measure_file, "measure JSON file")->required();
    check->add_option("requirements", requirements_file, "requirement set JSON file")
        ->required();

    auto* aggregate = app.add_subcommand("aggregate", "aggregate scenarios into a measure");
    aggregate->add_option("measure", measure_file, "measure JSON file")->required();
    aggregate->add_option("scenarios", scenarios_file, "scenario set JSON file")->required();
    aggregate->add_option("--method", method, "pointmass | shifting | phi | successive")
        ->required()
        ->check(CLI::IsMember({"pointmass", "shifting", "phi", "successive"}));
    aggregate->add_option("--inner", inner, "per-step operator for successive aggregation")
        ->check(CLI::IsMember({"pointmass", "shifting"}))
        ->capture_default_str();

    auto* synthesize =
        app.add_subcommand("synthesize", "build scenarios that satisfy requirements");
    synthesize->add_option("requirements", requirements_file, "requirement set JSON file")
        ->required();
    synthesize->add_option("--method", method, "pointmass | shifting")
        ->required()
        ->check(CLI::IsMember({"pointmass", "shifting"}));
    synthesize->add_option("--measure", measure_file,
                           "base measure for verification and shifting synthesis");

    auto* recover = app.add_subcommand("recover", "invert a point-mass aggregation");
    recover->add_option("measure", measure_file, "aggregated measure JSON file")->required();
    recover->add_option("scenarios", scenarios_file, "scenario set JSON file")->required();

    auto* riskmeasure =
        app.add_subcommand("riskmeasure", "capital requirement of a valued position");
    // The positional label differs from "measure" because --measure below
    // picks the risk functional and CLI11 rejects the name collision.
    riskmeasure->add_option("measure_file", measure_file, "measure JSON file")->required();
    riskmeasure->add_option("valuation_file", valuation_file, "valuation JSON file")->required();
    riskmeasure->add_option("--alpha", alpha, "tail level in (0,1)")->required();
    riskmeasure->add_option("--measure", risk_which, "var | es")
        ->check(CLI::IsMember({"var", "es"}))
        ->capture_default_str();
    riskmeasure->add_option("--scenarios", scenarios_file, "optional scenario set to aggregate");
    riskmeasure->add_option("--method", method, "pointmass | shifting | sst")
        ->check(CLI::IsMember({"pointmass", "shifting", "sst"}));

    auto* demo = app.add_subcommand("demo", "run a named worked example");
    demo->add_option("name", demo_name,
                     "successive | counterexample | sst-equivalence | recovery | hedged-company")
        ->required();

    // Accept the global flags after the subcommand name as well.
    for (auto* sub : {check, aggregate, synthesize, recover, riskmeasure, demo}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(check)) return cmd_check(opts, measure_file, requirements_file);
        if (app.got_subcommand(aggregate)) {
            return cmd_aggregate(opts, measure_file, scenarios_file, method, inner);
        }
        if (app.got_subcommand(synthesize)) {
            return cmd_synthesize(opts, requirements_file, method, measure_file);
        }
        if (app.got_subcommand(recover)) return cmd_recover(opts, measure_file, scenarios_file);
        if (app.got_subcommand(riskmeasure)) {
            if (scenarios_file.empty() != method.empty()) {
                throw quadmix::Error("riskmeasure: --scenarios and --method go together");
            }
            return cmd_riskmeasure(opts, measure_file, valuation_file, alpha, risk_which,
                                   scenarios_file, method);
        }
        if (app.got_subcommand(demo)) return cmd_demo(opts, demo_name);
    } catch (const quadmix::TwoSidedConstrainedQuadrant& e) {
        std::cerr << "synthesis precondition: " << e.what() << "\n";
        return 4;
    } catch (const quadmix::TotalProbabilityOne& e) {
        std::cerr << "synthesis precondition: " << e.what() << "\n";
        return 4;
    } catch (const quadmix::BallPlacementFailed& e) {
        std::cerr << "synthesis precondition: " << e.what() << "\n";
        return 4;
    } catch (const quadmix::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
