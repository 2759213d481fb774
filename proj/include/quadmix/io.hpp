#ifndef QUADMIX_IO_HPP
#define QUADMIX_IO_HPP

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "quadmix/measures.hpp"
#include "quadmix/quadrants.hpp"
#include "quadmix/requirements.hpp"
#include "quadmix/scenarios.hpp"
#include "quadmix/valuation.hpp"

namespace quadmix::io {

using Json = nlohmann::json;

/// JSON bindings for the file formats, concrete on double. Parsing errors
/// all surface as quadmix::Error so the CLI can map them to one exit code.

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error("malformed JSON in " + path + ": " + e.what());
    }
}

inline Vec<double> parse_vector(const Json& j, const char* what) {
    try {
        if (!j.is_array() || j.empty()) throw Error(std::string(what) + ": expected a non-empty array");
        Vec<double> v(static_cast<Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
        return v;
    } catch (const Json::exception& e) {
        throw Error(std::string(what) + ": " + e.what());
    }
}

inline Mat<double> parse_matrix(const Json& j, const char* what) {
    try {
        if (!j.is_array() || j.empty()) throw Error(std::string(what) + ": expected a non-empty array of rows");
        const std::size_t cols = j[0].size();
        Mat<double> m(static_cast<Index>(j.size()), static_cast<Index>(cols));
        for (std::size_t r = 0; r < j.size(); ++r) {
            if (j[r].size() != cols) throw Error(std::string(what) + ": ragged rows");
            for (std::size_t c = 0; c < cols; ++c) {
                m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
            }
        }
        return m;
    } catch (const Json::exception& e) {
        throw Error(std::string(what) + ": " + e.what());
    }
}

inline Json vector_to_json(const Vec<double>& v) {
    Json j = Json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

inline Json matrix_to_json(const Mat<double>& m) {
    Json j = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

inline FiniteMixtureMeasure<double> parse_measure(const Json& j) {
    try {
        const Index dim = j.at("dim").get<Index>();
        const bool probability = j.value("probability", true);
        std::vector<WeightedComponent<double>> comps;
        for (const auto& cj : j.at("components")) {
            const double w = cj.at("w").get<double>();
            const std::string kind = cj.at("kind").get<std::string>();
            if (kind == "gaussian") {
                comps.push_back({w, Gaussian<double>{parse_vector(cj.at("mean"), "mean"),
                                                     parse_matrix(cj.at("cov"), "cov")}});
            } else if (kind == "pointmass") {
                comps.push_back({w, PointMass<double>{parse_vector(cj.at("loc"), "loc")}});
            } else if (kind == "empirical") {
                comps.push_back({w, Empirical<double>{parse_matrix(cj.at("points"), "points")}});
            } else {
                throw Error("unknown component kind: " + kind);
            }
        }
        return FiniteMixtureMeasure<double>(dim, std::move(comps), probability);
    } catch (const Json::exception& e) {
        throw Error(std::string("measure: ") + e.what());
    }
}

inline Json measure_to_json(const FiniteMixtureMeasure<double>& m) {
    Json j;
    j["dim"] = m.dimension();
    if (!m.is_probability()) j["probability"] = false;
    Json comps = Json::array();
    for (const auto& wc : m.components()) {
        Json cj;
        cj["w"] = wc.weight;
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Gaussian<double>>) {
                    cj["kind"] = "gaussian";
                    cj["mean"] = vector_to_json(c.mean);
                    cj["cov"] = matrix_to_json(c.cov);
                } else if constexpr (std::is_same_v<T, PointMass<double>>) {
                    cj["kind"] = "pointmass";
                    cj["loc"] = vector_to_json(c.location);
                } else {
                    cj["kind"] = "empirical";
                    cj["points"] = matrix_to_json(c.points);
                }
            },
            wc.component);
        comps.push_back(std::move(cj));
    }
    j["components"] = std::move(comps);
    return j;
}

inline Quadrant<double> parse_quadrant(const Json& j) {
    try {
        const Index dim = j.at("dim").get<Index>();
        std::vector<HalfSpace<double>> hs;
        for (const auto& hj : j.at("halfspaces")) {
            hs.push_back({parse_vector(hj.at("normal"), "normal"), hj.at("offset").get<double>()});
        }
        return Quadrant<double>(dim, std::move(hs));
    } catch (const Json::exception& e) {
        throw Error(std::string("quadrant: ") + e.what());
    }
}

inline Json quadrant_to_json(const Quadrant<double>& q) {
    Json j;
    j["dim"] = q.dimension();
    Json hs = Json::array();
    for (const auto& h : q.halfspaces()) {
        Json hj;
        hj["normal"] = vector_to_json(h.normal);
        hj["offset"] = h.offset;
        hs.push_back(std::move(hj));
    }
    j["halfspaces"] = std::move(hs);
    return j;
}

inline RequirementSet<double> parse_requirement_set(const Json& j) {
    try {
        std::vector<QuadrantRequirement<double>> reqs;
        for (const auto& rj : j.at("requirements")) {
            reqs.emplace_back(parse_quadrant(rj.at("quadrant")), rj.at("floor").get<double>());
        }
        return RequirementSet<double>(std::move(reqs));
    } catch (const Json::exception& e) {
        throw Error(std::string("requirement set: ") + e.what());
    }
}

inline Json requirement_set_to_json(const RequirementSet<double>& rs) {
    Json j;
    Json reqs = Json::array();
    for (const auto& r : rs.requirements()) {
        Json rj;
        rj["quadrant"] = quadrant_to_json(r.quadrant);
        rj["floor"] = r.floor;
        reqs.push_back(std::move(rj));
    }
    j["requirements"] = std::move(reqs);
    return j;
}

inline GeneralizedRequirement<double> parse_generalized(const Json& j) {
    try {
        std::vector<std::pair<double, Quadrant<double>>> terms;
        for (const auto& tj : j.at("terms")) {
            terms.emplace_back(tj.at("coef").get<double>(), parse_quadrant(tj.at("quadrant")));
        }
        return GeneralizedRequirement<double>(std::move(terms), j.at("threshold").get<double>());
    } catch (const Json::exception& e) {
        throw Error(std::string("generalized requirement: ") + e.what());
    }
}

inline ScenarioSet<double> parse_scenario_set(const Json& j) {
    try {
        std::vector<EnhancedScenario<double>> scenarios;
        for (const auto& sj : j.at("scenarios")) {
            scenarios.emplace_back(parse_vector(sj.at("d"), "d"), sj.at("p").get<double>());
        }
        return ScenarioSet<double>(std::move(scenarios));
    } catch (const Json::exception& e) {
        throw Error(std::string("scenario set: ") + e.what());
    }
}

inline Json scenario_set_to_json(const ScenarioSet<double>& M) {
    Json j;
    Json ss = Json::array();
    for (const auto& s : M.scenarios()) {
        Json sj;
        sj["d"] = vector_to_json(s.deflection);
        sj["p"] = s.probability;
        ss.push_back(std::move(sj));
    }
    j["scenarios"] = std::move(ss);
    return j;
}

/// Maps for phi-aggregation ride along in the scenario file under "maps":
/// `{"kind": "constant"|"translation", "d": [..]}` or
/// `{"kind": "affine", "A": [[..]], "b": [..]}`.
inline std::vector<PhiMap<double>> parse_phi_maps(const Json& j) {
    try {
        std::vector<PhiMap<double>> maps;
        for (const auto& mj : j) {
            const std::string kind = mj.at("kind").get<std::string>();
            if (kind == "constant") {
                maps.push_back(ConstantMap<double>{parse_vector(mj.at("d"), "d")});
            } else if (kind == "translation") {
                maps.push_back(TranslationMap<double>{parse_vector(mj.at("d"), "d")});
            } else if (kind == "affine") {
                maps.push_back(AffineMap<double>{parse_matrix(mj.at("A"), "A"),
                                                parse_vector(mj.at("b"), "b")});
            } else {
                throw Error("unknown map kind: " + kind);
            }
        }
        return maps;
    } catch (const Json::exception& e) {
        throw Error(std::string("maps: ") + e.what());
    }
}

inline ValuationFunction<double> parse_valuation(const Json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "linear") {
            return LinearValuation<double>{parse_vector(j.at("a"), "a"), j.at("b").get<double>()};
        }
        if (kind == "maxaffine") {
            MaxAffineValuation<double> ma;
            const std::string sign = j.at("sign").get<std::string>();
            if (sign == "max") {
                ma.sign = PiecewiseSign::Max;
            } else if (sign == "min") {
                ma.sign = PiecewiseSign::Min;
            } else {
                throw Error("valuation sign must be max or min");
            }
            for (const auto& pj : j.at("pieces")) {
                ma.pieces.push_back({parse_vector(pj.at("a"), "a"), pj.at("b").get<double>()});
            }
            if (ma.pieces.empty()) throw Error("maxaffine valuation needs at least one piece");
            return ma;
        }
        throw Error("unknown valuation kind: " + kind);
    } catch (const Json::exception& e) {
        throw Error(std::string("valuation: ") + e.what());
    }
}

inline const char* verdict_to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        default: return "inconclusive";
    }
}

inline const char* overall_to_string(Overall o) {
    switch (o) {
        case Overall::AllSatisfied: return "all_satisfied";
        case Overall::SomeViolated: return "some_violated";
        default: return "inconclusive";
    }
}

inline const char* method_to_string(Method m) {
    switch (m) {
        case Method::Exact: return "exact";
        case Method::AnalyticGaussian: return "analytic_gaussian";
        default: return "monte_carlo";
    }
}

inline Json estimate_to_json(const ProbabilityEstimate<double>& est) {
    Json j;
    j["value"] = est.value;
    j["stderr"] = est.std_error;
    j["method"] = method_to_string(est.method);
    if (est.method == Method::MonteCarlo) {
        j["samples"] = est.samples;
        j["seed"] = est.seed;
    }
    return j;
}

inline Json report_to_json(const SetReport<double>& report) {
    Json j;
    j["overall"] = overall_to_string(report.overall);
    Json reqs = Json::array();
    for (const auto& check : report.checks) {
        Json rj = estimate_to_json(check.estimate);
        rj["verdict"] = verdict_to_string(check.verdict);
        reqs.push_back(std::move(rj));
    }
    j["requirements"] = std::move(reqs);
    return j;
}

}  // namespace quadmix::io

#endif  // QUADMIX_IO_HPP
