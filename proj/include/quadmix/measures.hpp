#ifndef QUADMIX_MEASURES_HPP
#define QUADMIX_MEASURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <variant>
#include <vector>

#include "quadmix/seeding.hpp"
#include "quadmix/types.hpp"

namespace quadmix {

/// Finite mixtures of Gaussian, point-mass and empirical components. This is
/// the smallest measure class closed under translation, affine pushforward,
/// and point-mass insertion, which is exactly what the aggregation operators
/// need.

template <typename Scalar>
struct Gaussian {
    Vec<Scalar> mean;
    Mat<Scalar> cov;  // symmetric positive semi-definite
};

template <typename Scalar>
struct PointMass {
    Vec<Scalar> location;
};

template <typename Scalar>
struct Empirical {
    Mat<Scalar> points;  // one point per row, equal weights
};

template <typename Scalar>
using MeasureComponent = std::variant<Gaussian<Scalar>, PointMass<Scalar>, Empirical<Scalar>>;

template <typename Scalar>
struct WeightedComponent {
    Scalar weight;
    MeasureComponent<Scalar> component;
};

namespace detail {

template <typename Scalar>
Index component_dimension(const MeasureComponent<Scalar>& c) {
    return std::visit(
        [](const auto& v) -> Index {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                return v.mean.size();
            } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                return v.location.size();
            } else {
                return v.points.cols();
            }
        },
        c);
}

// Eigenvalue clip threshold of the PSD check: values in [-1e-10, 0) are
// rounded up to zero, anything more negative is a construction error.
inline constexpr double kPsdSlack = 1e-10;

}  // namespace detail

template <typename Scalar>
class FiniteMixtureMeasure {
public:
    FiniteMixtureMeasure(Index dimension, std::vector<WeightedComponent<Scalar>> components,
                         bool probability = true)
        : dim_(dimension), probability_(probability) {
        if (dim_ < 1) throw Error("measure dimension must be >= 1");
        components_.reserve(components.size());
        for (auto& wc : components) {
            push_component(std::move(wc));
        }
        if (probability_) {
            Scalar total = Scalar(0);
            for (const auto& wc : components_) {
                if (wc.weight < Scalar(0)) {
                    throw NonProbabilityMeasure("negative component weight in probability measure");
                }
                total += wc.weight;
            }
            if (std::abs(total - Scalar(1)) > Scalar(1e-12)) {
                throw NonProbabilityMeasure("component weights do not sum to 1");
            }
        }
    }

    static FiniteMixtureMeasure gaussian(Vec<Scalar> mean, Mat<Scalar> cov) {
        const Index n = mean.size();
        std::vector<WeightedComponent<Scalar>> comps;
        comps.push_back({Scalar(1), Gaussian<Scalar>{std::move(mean), std::move(cov)}});
        return FiniteMixtureMeasure(n, std::move(comps));
    }

    static FiniteMixtureMeasure point_mass(Vec<Scalar> location) {
        const Index n = location.size();
        std::vector<WeightedComponent<Scalar>> comps;
        comps.push_back({Scalar(1), PointMass<Scalar>{std::move(location)}});
        return FiniteMixtureMeasure(n, std::move(comps));
    }

    static FiniteMixtureMeasure empirical(Mat<Scalar> points) {
        const Index n = points.cols();
        std::vector<WeightedComponent<Scalar>> comps;
        comps.push_back({Scalar(1), Empirical<Scalar>{std::move(points)}});
        return FiniteMixtureMeasure(n, std::move(comps));
    }

    Index dimension() const { return dim_; }
    bool is_probability() const { return probability_; }
    const std::vector<WeightedComponent<Scalar>>& components() const { return components_; }

    Scalar total_weight() const {
        Scalar total = Scalar(0);
        for (const auto& wc : components_) total += wc.weight;
        return total;
    }

    Vec<Scalar> mean() const {
        Vec<Scalar> m = Vec<Scalar>::Zero(dim_);
        for (const auto& wc : components_) {
            std::visit(
                [&](const auto& c) {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                        m += wc.weight * c.mean;
                    } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                        m += wc.weight * c.location;
                    } else {
                        m += wc.weight * c.points.colwise().mean().transpose();
                    }
                },
                wc.component);
        }
        return m;
    }

private:
    // Validates one component and appends it. Gaussians with an exactly zero
    // covariance collapse to point masses here, so degenerate factorizations
    // never reach the samplers.
    void push_component(WeightedComponent<Scalar> wc) {
        if (detail::component_dimension<Scalar>(wc.component) != dim_) {
            throw DimensionMismatch("component dimension differs from measure dimension");
        }
        if (auto* g = std::get_if<Gaussian<Scalar>>(&wc.component)) {
            if (g->cov.rows() != dim_ || g->cov.cols() != dim_) {
                throw DimensionMismatch("covariance must be n x n");
            }
            if ((g->cov - g->cov.transpose()).cwiseAbs().maxCoeff() >
                Scalar(1e-9) * (Scalar(1) + g->cov.cwiseAbs().maxCoeff())) {
                throw Error("covariance is not symmetric");
            }
            if (g->cov.cwiseAbs().maxCoeff() == Scalar(0)) {
                components_.push_back({wc.weight, PointMass<Scalar>{g->mean}});
                return;
            }
            Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g->cov);
            const Scalar min_eig = es.eigenvalues().minCoeff();
            if (min_eig < -Scalar(detail::kPsdSlack)) {
                throw Error("covariance is not positive semi-definite");
            }
            if (min_eig < Scalar(0)) {
                Vec<Scalar> clipped = es.eigenvalues().cwiseMax(Scalar(0));
                g->cov = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
            }
        } else if (auto* e = std::get_if<Empirical<Scalar>>(&wc.component)) {
            if (e->points.rows() < 1) throw Error("empirical component needs at least one point");
        }
        components_.push_back(std::move(wc));
    }

    Index dim_;
    bool probability_;
    std::vector<WeightedComponent<Scalar>> components_;
};

/// Pushforward under x -> x + d.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> translate(const FiniteMixtureMeasure<Scalar>& m,
                                       const Vec<Scalar>& d) {
    require_same_dimension(m.dimension(), d.size(), "translate");
    std::vector<WeightedComponent<Scalar>> comps;
    comps.reserve(m.components().size());
    for (const auto& wc : m.components()) {
        MeasureComponent<Scalar> moved = std::visit(
            [&](const auto& c) -> MeasureComponent<Scalar> {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                    return Gaussian<Scalar>{c.mean + d, c.cov};
                } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    return PointMass<Scalar>{c.location + d};
                } else {
                    return Empirical<Scalar>{c.points.rowwise() + d.transpose()};
                }
            },
            wc.component);
        comps.push_back({wc.weight, std::move(moved)});
    }
    return FiniteMixtureMeasure<Scalar>(m.dimension(), std::move(comps), m.is_probability());
}

/// Pushforward under x -> A x + b. A may be rectangular; the output lives in
/// dimension A.rows().
template <typename Scalar>
FiniteMixtureMeasure<Scalar> affine_pushforward(const FiniteMixtureMeasure<Scalar>& m,
                                                const Mat<Scalar>& A, const Vec<Scalar>& b) {
    require_same_dimension(m.dimension(), A.cols(), "affine_pushforward (A columns)");
    require_same_dimension(A.rows(), b.size(), "affine_pushforward (A rows vs b)");
    std::vector<WeightedComponent<Scalar>> comps;
    comps.reserve(m.components().size());
    for (const auto& wc : m.components()) {
        MeasureComponent<Scalar> moved = std::visit(
            [&](const auto& c) -> MeasureComponent<Scalar> {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                    return Gaussian<Scalar>{A * c.mean + b, A * c.cov * A.transpose()};
                } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    return PointMass<Scalar>{A * c.location + b};
                } else {
                    Mat<Scalar> mapped =
                        (c.points * A.transpose()).rowwise() + b.transpose();
                    return Empirical<Scalar>{std::move(mapped)};
                }
            },
            wc.component);
        comps.push_back({wc.weight, std::move(moved)});
    }
    return FiniteMixtureMeasure<Scalar>(A.rows(), std::move(comps), m.is_probability());
}

/// Mixture of measures with outer weights, flattened to one component list.
/// Zero weights are kept, components are never merged.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> mix(
    const std::vector<std::pair<Scalar, FiniteMixtureMeasure<Scalar>>>& parts) {
    if (parts.empty()) throw Error("mix: needs at least one part");
    const Index n = parts.front().second.dimension();
    bool probability = true;
    Scalar outer_total = Scalar(0);
    std::vector<WeightedComponent<Scalar>> comps;
    for (const auto& [w, part] : parts) {
        require_same_dimension(n, part.dimension(), "mix");
        outer_total += w;
        if (w < Scalar(0) || !part.is_probability()) probability = false;
        for (const auto& wc : part.components()) {
            comps.push_back({w * wc.weight, wc.component});
        }
    }
    if (std::abs(outer_total - Scalar(1)) > Scalar(1e-12)) probability = false;
    return FiniteMixtureMeasure<Scalar>(n, std::move(comps), probability);
}

/// Draws `count` points, one per row. The draw for index i comes from the
/// chunk stream (seed, i / kSampleChunk); see seeding.hpp.
template <typename Scalar>
Mat<Scalar> sample(const FiniteMixtureMeasure<Scalar>& m, std::int64_t count,
                   std::uint64_t seed) {
    if (!m.is_probability()) {
        throw NonProbabilityMeasure("sample: measure is not a probability measure");
    }
    if (count < 0) throw Error("sample: negative count");
    const Index n = m.dimension();
    const auto& comps = m.components();

    std::vector<Scalar> cumulative;
    cumulative.reserve(comps.size());
    Scalar acc = Scalar(0);
    for (const auto& wc : comps) {
        acc += wc.weight;
        cumulative.push_back(acc);
    }

    // Gaussian factor B with cov = B B^T, computed once per component.
    std::vector<Mat<Scalar>> factors(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        if (const auto* g = std::get_if<Gaussian<Scalar>>(&comps[k].component)) {
            Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g->cov);
            Vec<Scalar> roots = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
            factors[k] = es.eigenvectors() * roots.asDiagonal();
        }
    }

    Mat<Scalar> out(count, n);
    for (std::int64_t i = 0; i < count;) {
        const std::int64_t chunk = i / kSampleChunk;
        const std::int64_t chunk_end = std::min<std::int64_t>(count, (chunk + 1) * kSampleChunk);
        Rng rng = make_rng(derive_seed(seed, "sample.chunk", static_cast<std::uint64_t>(chunk)));
        for (; i < chunk_end; ++i) {
            const Scalar u = Scalar(uniform01(rng));
            std::size_t k = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                            cumulative.begin();
            if (k >= comps.size()) k = comps.size() - 1;
            std::visit(
                [&](const auto& c) {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                        Vec<Scalar> z(n);
                        for (Index j = 0; j < n; ++j) z(j) = Scalar(standard_normal(rng));
                        out.row(i) = (c.mean + factors[k] * z).transpose();
                    } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                        out.row(i) = c.location.transpose();
                    } else {
                        const Index rows = c.points.rows();
                        Index idx = static_cast<Index>(uniform01(rng) * static_cast<double>(rows));
                        if (idx >= rows) idx = rows - 1;
                        out.row(i) = c.points.row(idx);
                    }
                },
                comps[k].component);
        }
    }
    return out;
}

/// Applies a user-supplied pointwise map to every atom of the measure.
/// Experimental escape hatch for maps outside the affine family: only
/// point-mass and empirical components are supported, Gaussian components
/// have no finite pointwise image and are rejected.
template <typename Scalar>
FiniteMixtureMeasure<Scalar> pointwise_pushforward(
    const FiniteMixtureMeasure<Scalar>& m,
    const std::function<Vec<Scalar>(const Vec<Scalar>&)>& map, Index out_dimension) {
    std::vector<WeightedComponent<Scalar>> comps;
    comps.reserve(m.components().size());
    for (const auto& wc : m.components()) {
        MeasureComponent<Scalar> moved = std::visit(
            [&](const auto& c) -> MeasureComponent<Scalar> {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                    return PointMass<Scalar>{map(c.location)};
                } else if constexpr (std::is_same_v<T, Empirical<Scalar>>) {
                    Mat<Scalar> mapped(c.points.rows(), out_dimension);
                    for (Index r = 0; r < c.points.rows(); ++r) {
                        mapped.row(r) = map(c.points.row(r).transpose()).transpose();
                    }
                    return Empirical<Scalar>{std::move(mapped)};
                } else {
                    throw Error(
                        "pointwise_pushforward: Gaussian components are not supported");
                }
            },
            wc.component);
        comps.push_back({wc.weight, std::move(moved)});
    }
    return FiniteMixtureMeasure<Scalar>(out_dimension, std::move(comps), m.is_probability());
}

namespace detail {

template <typename Scalar>
int component_rank(const MeasureComponent<Scalar>& c) {
    if (std::holds_alternative<Gaussian<Scalar>>(c)) return 0;
    if (std::holds_alternative<PointMass<Scalar>>(c)) return 1;
    return 2;
}

// Flattens a component to a sort/compare key: kind rank, parameters in fixed
// order, weight last as tie-break.
template <typename Scalar>
std::vector<Scalar> component_key(const WeightedComponent<Scalar>& wc) {
    std::vector<Scalar> key;
    key.push_back(Scalar(component_rank<Scalar>(wc.component)));
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Gaussian<Scalar>>) {
                for (Index i = 0; i < c.mean.size(); ++i) key.push_back(c.mean(i));
                for (Index i = 0; i < c.cov.rows(); ++i)
                    for (Index j = 0; j < c.cov.cols(); ++j) key.push_back(c.cov(i, j));
            } else if constexpr (std::is_same_v<T, PointMass<Scalar>>) {
                for (Index i = 0; i < c.location.size(); ++i) key.push_back(c.location(i));
            } else {
                key.push_back(Scalar(c.points.rows()));
                for (Index i = 0; i < c.points.rows(); ++i)
                    for (Index j = 0; j < c.points.cols(); ++j) key.push_back(c.points(i, j));
            }
        },
        wc.component);
    key.push_back(wc.weight);
    return key;
}

}  // namespace detail

/// Component-wise equality after canonical sorting (kind, then lexicographic
/// parameters, weight last). Components are compared entry-by-entry within
/// `tol`; nothing is merged or pruned first.
template <typename Scalar>
bool canonically_equal(const FiniteMixtureMeasure<Scalar>& a,
                       const FiniteMixtureMeasure<Scalar>& b, Scalar tol = Scalar(1e-12)) {
    if (a.dimension() != b.dimension()) return false;
    if (a.components().size() != b.components().size()) return false;

    auto keys_of = [](const FiniteMixtureMeasure<Scalar>& m) {
        std::vector<std::vector<Scalar>> keys;
        keys.reserve(m.components().size());
        for (const auto& wc : m.components()) keys.push_back(detail::component_key<Scalar>(wc));
        std::sort(keys.begin(), keys.end());
        return keys;
    };
    const auto ka = keys_of(a);
    const auto kb = keys_of(b);
    for (std::size_t i = 0; i < ka.size(); ++i) {
        if (ka[i].size() != kb[i].size()) return false;
        for (std::size_t j = 0; j < ka[i].size(); ++j) {
            if (std::abs(ka[i][j] - kb[i][j]) > tol) return false;
        }
    }
    return true;
}

}  // namespace quadmix

#endif  // QUADMIX_MEASURES_HPP
