#ifndef QUADMIX_SCENARIOS_HPP
#define QUADMIX_SCENARIOS_HPP

#include <utility>
#include <variant>
#include <vector>

#include "quadmix/measures.hpp"
#include "quadmix/types.hpp"

namespace quadmix {

/// A scenario is a deflection of the risk factors together with the
/// probability assigned to its occurrence.
template <typename Scalar>
struct EnhancedScenario {
    EnhancedScenario(Vec<Scalar> d, Scalar p) : deflection(std::move(d)), probability(p) {
        if (!(probability >= Scalar(0) && probability <= Scalar(1))) {
            throw Error("scenario probability must lie in [0,1]");
        }
    }

    Vec<Scalar> deflection;
    Scalar probability;
};

template <typename Scalar>
class ScenarioSet {
public:
    ScenarioSet() = default;

    explicit ScenarioSet(std::vector<EnhancedScenario<Scalar>> scenarios)
        : scenarios_(std::move(scenarios)) {
        Scalar total = Scalar(0);
        for (std::size_t i = 0; i < scenarios_.size(); ++i) {
            total += scenarios_[i].probability;
            if (i > 0) {
                require_same_dimension(scenarios_[0].deflection.size(),
                                       scenarios_[i].deflection.size(), "scenario set");
            }
        }
        if (total > Scalar(1) + Scalar(1e-12)) {
            throw Error("scenario probabilities sum to more than 1");
        }
        total_ = total;
    }

    const std::vector<EnhancedScenario<Scalar>>& scenarios() const { return scenarios_; }
    Scalar total_probability() const { return total_; }
    bool empty() const { return scenarios_.empty(); }
    std::size_t size() const { return scenarios_.size(); }

private:
    std::vector<EnhancedScenario<Scalar>> scenarios_;
    Scalar total_ = Scalar(0);
};

template <typename Scalar>
struct ConstantMap {
    Vec<Scalar> value;
};

template <typename Scalar>
struct TranslationMap {
    Vec<Scalar> shift;
};

template <typename Scalar>
struct AffineMap {
    Mat<Scalar> linear;
    Vec<Scalar> shift;
};

template <typename Scalar>
using PhiMap = std::variant<ConstantMap<Scalar>, TranslationMap<Scalar>, AffineMap<Scalar>>;

template <typename Scalar>
Vec<Scalar> apply(const PhiMap<Scalar>& map, const Vec<Scalar>& x) {
    return std::visit(
        [&](const auto& m) -> Vec<Scalar> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantMap<Scalar>>) {
                return m.value;
            } else if constexpr (std::is_same_v<T, TranslationMap<Scalar>>) {
                return x + m.shift;
            } else {
                return m.linear * x + m.shift;
            }
        },
        map);
}

/// (1 - p_M) P plus a point mass of weight p_S at each deflection. The base
/// components keep their order, scenario components follow in scenario
/// order; zero-probability scenarios stay as zero-weight components.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> aggregate_point_mass(const FiniteMixtureMeasure<Scalar>& P,
                                                  const ScenarioSet<Scalar>& M) {
    if (!P.is_probability()) {
        throw NonProbabilityMeasure("aggregate_point_mass: base must be a probability measure");
    }
    if (!M.empty()) {
        require_same_dimension(P.dimension(), M.scenarios().front().deflection.size(),
                               "aggregate_point_mass");
    }
    const Scalar keep = Scalar(1) - M.total_probability();
    std::vector<WeightedComponent<Scalar>> comps;
    comps.reserve(P.components().size() + M.size());
    for (const auto& wc : P.components()) {
        comps.push_back({keep * wc.weight, wc.component});
    }
    for (const auto& s : M.scenarios()) {
        comps.push_back({s.probability, PointMass<Scalar>{s.deflection}});
    }
    return FiniteMixtureMeasure<Scalar>(P.dimension(), std::move(comps));
}

/// (1 - p_M) P plus p_S translate(P, d_S) per scenario.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> aggregate_shifting(const FiniteMixtureMeasure<Scalar>& P,
                                                const ScenarioSet<Scalar>& M) {
    if (!P.is_probability()) {
        throw NonProbabilityMeasure("aggregate_shifting: base must be a probability measure");
    }
    std::vector<std::pair<Scalar, FiniteMixtureMeasure<Scalar>>> parts;
    parts.reserve(1 + M.size());
    parts.emplace_back(Scalar(1) - M.total_probability(), P);
    for (const auto& s : M.scenarios()) {
        parts.emplace_back(s.probability, translate(P, s.deflection));
    }
    return mix(parts);
}

/// (1 - p_M) P plus p_S times the pushforward of P under the scenario's map.
/// Constant maps contribute a point mass directly, translations and affine
/// maps keep Gaussian components Gaussian.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> aggregate_phi(const FiniteMixtureMeasure<Scalar>& P,
                                           const ScenarioSet<Scalar>& M,
                                           const std::vector<PhiMap<Scalar>>& maps) {
    if (!P.is_probability()) {
        throw NonProbabilityMeasure("aggregate_phi: base must be a probability measure");
    }
    if (maps.size() != M.size()) {
        throw Error("aggregate_phi: one map per scenario required");
    }
    std::vector<std::pair<Scalar, FiniteMixtureMeasure<Scalar>>> parts;
    parts.reserve(1 + M.size());
    parts.emplace_back(Scalar(1) - M.total_probability(), P);
    for (std::size_t i = 0; i < M.size(); ++i) {
        const Scalar p = M.scenarios()[i].probability;
        FiniteMixtureMeasure<Scalar> image = std::visit(
            [&](const auto& m) -> FiniteMixtureMeasure<Scalar> {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, ConstantMap<Scalar>>) {
                    require_same_dimension(P.dimension(), m.value.size(), "aggregate_phi");
                    return FiniteMixtureMeasure<Scalar>::point_mass(m.value);
                } else if constexpr (std::is_same_v<T, TranslationMap<Scalar>>) {
                    return translate(P, m.shift);
                } else {
                    return affine_pushforward(P, m.linear, m.shift);
                }
            },
            maps[i]);
        parts.emplace_back(p, std::move(image));
    }
    return mix(parts);
}

enum class AggregationMethod { PointMass, Shifting };

/// Left fold of one-step aggregation over an ordered list of scenario sets.
/// The order matters: early scenarios are damped by the survival factors of
/// every later set.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> aggregate_successive(const FiniteMixtureMeasure<Scalar>& P,
                                                  const std::vector<ScenarioSet<Scalar>>& sets,
                                                  AggregationMethod method) {
    FiniteMixtureMeasure<Scalar> acc = P;
    for (const auto& M : sets) {
        acc = method == AggregationMethod::PointMass ? aggregate_point_mass(acc, M)
                                                     : aggregate_shifting(acc, M);
    }
    return acc;
}

enum class MapClass { Contracting, Expanding, Isometry, Neither };

/// Classification by the singular values of the linear part: expanding means
/// no direction is shortened (sigma_min >= 1), contracting means none is
/// stretched (sigma_max <= 1), isometries are both.
template <typename Scalar>
MapClass classify_affine_map(const PhiMap<Scalar>& map) {
    Scalar sigma_min, sigma_max;
    if (std::holds_alternative<ConstantMap<Scalar>>(map)) {
        sigma_min = sigma_max = Scalar(0);
    } else if (std::holds_alternative<TranslationMap<Scalar>>(map)) {
        sigma_min = sigma_max = Scalar(1);
    } else {
        const auto& a = std::get<AffineMap<Scalar>>(map);
        Eigen::JacobiSVD<Mat<Scalar>> svd(a.linear);
        sigma_max = svd.singularValues().size() ? svd.singularValues().maxCoeff() : Scalar(0);
        sigma_min = svd.singularValues().size() ? svd.singularValues().minCoeff() : Scalar(0);
        // A wide matrix has a null space, so some direction collapses even
        // though the listed singular values stop at min(rows, cols).
        if (a.linear.rows() < a.linear.cols()) sigma_min = Scalar(0);
    }
    const bool expanding = sigma_min >= Scalar(1) - Scalar(1e-12);
    const bool contracting = sigma_max <= Scalar(1) + Scalar(1e-12);
    if (expanding && contracting) return MapClass::Isometry;
    if (expanding) return MapClass::Expanding;
    if (contracting) return MapClass::Contracting;
    return MapClass::Neither;
}

}  // namespace quadmix

#endif  // QUADMIX_SCENARIOS_HPP
