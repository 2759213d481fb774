#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace quadmix;
using support::vec1;
using support::vec2;

TEST_CASE("constructor validates probability weights") {
    std::vector<WeightedComponent<double>> comps;
    comps.push_back({0.5, PointMass<double>{vec1(0)}});
    CHECK_THROWS_AS(FiniteMixtureMeasure<double>(1, comps), NonProbabilityMeasure);

    comps.push_back({0.5, PointMass<double>{vec1(1)}});
    CHECK_NOTHROW(FiniteMixtureMeasure<double>(1, comps));

    comps[0].weight = -0.5;
    comps[1].weight = 1.5;
    CHECK_THROWS_AS(FiniteMixtureMeasure<double>(1, comps), NonProbabilityMeasure);
    CHECK_NOTHROW(FiniteMixtureMeasure<double>(1, comps, false));
}

TEST_CASE("constructor rejects bad covariance and dimension") {
    Mat<double> notsym(2, 2);
    notsym << 1, 0.5, -0.5, 1;
    CHECK_THROWS_AS(FiniteMixtureMeasure<double>::gaussian(vec2(0, 0), notsym), Error);

    Mat<double> indefinite(2, 2);
    indefinite << 1, 2, 2, 1;
    CHECK_THROWS_AS(FiniteMixtureMeasure<double>::gaussian(vec2(0, 0), indefinite), Error);

    std::vector<WeightedComponent<double>> comps;
    comps.push_back({1.0, PointMass<double>{vec2(0, 0)}});
    CHECK_THROWS_AS(FiniteMixtureMeasure<double>(1, comps), DimensionMismatch);
}

TEST_CASE("tiny negative eigenvalues are clipped, clean matrices untouched") {
    Mat<double> cov(2, 2);
    cov << 1.0, 0.25, 0.25, 2.0;
    const auto m = FiniteMixtureMeasure<double>::gaussian(vec2(0, 0), cov);
    const auto& g = std::get<Gaussian<double>>(m.components().front().component);
    CHECK(g.cov(0, 1) == 0.25);  // bitwise: no eigen round trip on a PSD input

    // Rank-one matrix nudged slightly indefinite stays constructible.
    Mat<double> nudged(2, 2);
    nudged << 1.0, 1.0, 1.0, 1.0 - 5e-11;
    CHECK_NOTHROW(FiniteMixtureMeasure<double>::gaussian(vec2(0, 0), nudged));
}

TEST_CASE("zero covariance collapses to a point mass") {
    const auto m = FiniteMixtureMeasure<double>::gaussian(vec2(1, 2), Mat<double>::Zero(2, 2));
    CHECK(std::holds_alternative<PointMass<double>>(m.components().front().component));
    CHECK(std::get<PointMass<double>>(m.components().front().component).location(0) == 1.0);
}

TEST_CASE("mean combines component means by weight") {
    std::vector<WeightedComponent<double>> comps;
    comps.push_back({0.5, Gaussian<double>{vec1(2.0), Mat<double>::Identity(1, 1)}});
    Mat<double> pts(2, 1);
    pts << -1.0, 3.0;
    comps.push_back({0.3, Empirical<double>{pts}});
    comps.push_back({0.2, PointMass<double>{vec1(-4.0)}});
    const FiniteMixtureMeasure<double> m(1, comps);
    CHECK(m.mean()(0) == doctest::Approx(0.5 * 2.0 + 0.3 * 1.0 + 0.2 * -4.0).epsilon(1e-14));
}

TEST_CASE("translate and affine pushforward move every component kind") {
    Rng rng = make_rng(7);
    const auto m = support::random_mixture_measure(rng, 2);
    const Vec<double> d = vec2(1.5, -2.0);

    const auto shifted = translate(m, d);
    CHECK(shifted.mean().isApprox(m.mean() + d, 1e-12));

    Mat<double> A(1, 2);
    A << 2.0, -1.0;
    const auto mapped = affine_pushforward(m, A, vec1(3.0));
    CHECK(mapped.dimension() == 1);
    CHECK(mapped.mean()(0) == doctest::Approx((A * m.mean())(0) + 3.0).epsilon(1e-12));

    // Gaussian covariance transforms as A cov A^T.
    const auto g2 = FiniteMixtureMeasure<double>::gaussian(vec2(0, 0), Mat<double>::Identity(2, 2));
    const auto g1 = affine_pushforward(g2, A, vec1(0.0));
    CHECK(std::get<Gaussian<double>>(g1.components().front().component).cov(0, 0) ==
          doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("mix flattens weights and tracks the probability flag") {
    const auto a = FiniteMixtureMeasure<double>::point_mass(vec1(0));
    const auto b = FiniteMixtureMeasure<double>::point_mass(vec1(1));
    const auto m = mix<double>({{0.25, a}, {0.75, b}});
    CHECK(m.is_probability());
    CHECK(m.components().size() == 2);
    CHECK(m.components()[0].weight == 0.25);

    const auto s = mix<double>({{0.5, a}, {0.6, b}});
    CHECK_FALSE(s.is_probability());
}

TEST_CASE("canonical equality ignores component order but not values") {
    std::vector<WeightedComponent<double>> forward;
    forward.push_back({0.4, PointMass<double>{vec1(1)}});
    forward.push_back({0.6, PointMass<double>{vec1(2)}});
    std::vector<WeightedComponent<double>> backward;
    backward.push_back({0.6, PointMass<double>{vec1(2)}});
    backward.push_back({0.4, PointMass<double>{vec1(1)}});
    const FiniteMixtureMeasure<double> f(1, forward), g(1, backward);
    CHECK(canonically_equal(f, g));

    std::vector<WeightedComponent<double>> off;
    off.push_back({0.4, PointMass<double>{vec1(1)}});
    off.push_back({0.6, PointMass<double>{vec1(2.0 + 1e-9)}});
    CHECK_FALSE(canonically_equal(f, FiniteMixtureMeasure<double>(1, off)));
}

TEST_CASE("sampling is deterministic and chunk layout independent of count") {
    const auto m = FiniteMixtureMeasure<double>::gaussian(vec1(0), Mat<double>::Identity(1, 1));
    const auto a = sample(m, 1000, 42);
    const auto b = sample(m, 1000, 42);
    CHECK(a == b);

    // A longer run starts with exactly the shorter run's draws, also across
    // a chunk boundary.
    const auto c = sample(m, 2000, 42);
    CHECK(c.topRows(1000) == a);
    const auto big = sample(m, kSampleChunk + 10, 42);
    CHECK(big.topRows(2000) == c);
    CHECK(sample(m, kSampleChunk + 10, 42) == big);
}

TEST_CASE("sample statistics approximate the mixture") {
    std::vector<WeightedComponent<double>> comps;
    comps.push_back({0.7, Gaussian<double>{vec1(1.0), Mat<double>::Identity(1, 1)}});
    comps.push_back({0.3, PointMass<double>{vec1(-2.0)}});
    const FiniteMixtureMeasure<double> m(1, comps);
    const auto draws = sample(m, 200000, 9);
    const double mean = draws.col(0).mean();
    CHECK(mean == doctest::Approx(0.7 * 1.0 - 0.3 * 2.0).epsilon(0.02));
}

TEST_CASE("empirical sampling only reproduces listed points") {
    Mat<double> pts(3, 1);
    pts << 1.0, 2.0, 3.0;
    const auto m = FiniteMixtureMeasure<double>::empirical(pts);
    const auto draws = sample(m, 500, 11);
    for (Index i = 0; i < draws.rows(); ++i) {
        const double v = draws(i, 0);
        CHECK((v == 1.0 || v == 2.0 || v == 3.0));
    }
}

TEST_CASE("sampling a signed mixture is rejected") {
    std::vector<WeightedComponent<double>> comps;
    comps.push_back({1.5, PointMass<double>{vec1(0)}});
    comps.push_back({-0.5, PointMass<double>{vec1(1)}});
    const FiniteMixtureMeasure<double> m(1, comps, false);
    CHECK_THROWS_AS(sample(m, 10, 1), NonProbabilityMeasure);
}

TEST_CASE("pointwise pushforward maps atoms and rejects gaussians") {
    const auto pm = FiniteMixtureMeasure<double>::point_mass(vec1(2.0));
    const auto squared = pointwise_pushforward<double>(
        pm, [](const Vec<double>& x) { return vec1(x(0) * x(0)); }, 1);
    CHECK(std::get<PointMass<double>>(squared.components().front().component).location(0) == 4.0);

    const auto g = FiniteMixtureMeasure<double>::gaussian(vec1(0), Mat<double>::Identity(1, 1));
    CHECK_THROWS_AS(
        pointwise_pushforward<double>(g, [](const Vec<double>& x) { return x; }, 1), Error);
}
