#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace quadmix;

namespace {

// max c.x st A x >= b on a small instance with a known optimum.
LpResult<double> run(std::initializer_list<std::initializer_list<double>> rows,
                     std::initializer_list<double> rhs, std::initializer_list<double> obj) {
    const Index m = static_cast<Index>(rows.size());
    const Index n = static_cast<Index>(obj.size());
    Mat<double> A(m, n);
    Index r = 0;
    for (const auto& row : rows) {
        Index c = 0;
        for (double v : row) A(r, c++) = v;
        ++r;
    }
    Vec<double> b(m), cv(n);
    Index i = 0;
    for (double v : rhs) b(i++) = v;
    i = 0;
    for (double v : obj) cv(i++) = v;
    return solve_lp(A, b, cv);
}

}  // namespace

TEST_CASE("bounded maximization over a triangle") {
    // x >= 0, y >= 0, -x - y >= -4; maximize x + 2y at (0, 4).
    const auto r = run({{1, 0}, {0, 1}, {-1, -1}}, {0, 0, -4}, {1, 2});
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(*r.objective == doctest::Approx(8.0).epsilon(1e-9));
    CHECK((*r.point)(1) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("free variables reach negative coordinates") {
    // -x >= 1 forces x <= -1; maximize x.
    const auto r = run({{-1.0}}, {1.0}, {1.0});
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK((*r.point)(0) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("infeasible systems are flagged") {
    const auto r = run({{1.0}, {-1.0}}, {2.0, -1.0}, {1.0});  // x >= 2 and x <= 1
    CHECK(r.status == LpStatus::Infeasible);
}

TEST_CASE("unbounded objective is flagged") {
    const auto r = run({{1.0}}, {0.0}, {1.0});  // x >= 0, maximize x
    CHECK(r.status == LpStatus::Unbounded);
}

TEST_CASE("degenerate and redundant rows are handled") {
    // Duplicate constraints plus an implied equality x = 1.
    const auto r = run({{1.0}, {1.0}, {-1.0}}, {1.0, 1.0, -1.0}, {1.0});
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK((*r.point)(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("optimal points satisfy constraints on random instances") {
    Rng rng = make_rng(101);
    int optimal_seen = 0;
    for (int t = 0; t < 200; ++t) {
        const Index n = 1 + static_cast<Index>(uniform01(rng) * 4);
        const Index m = 1 + static_cast<Index>(uniform01(rng) * 7);
        Mat<double> A(m, n);
        Vec<double> b(m), c(n);
        const Vec<double> anchor = support::random_vector(rng, n, -2.0, 2.0);
        for (Index i = 0; i < m; ++i) {
            A.row(i) = support::random_vector(rng, n, -1.0, 1.0).transpose();
            if (A.row(i).cwiseAbs().maxCoeff() < 0.05) A(i, 0) = 1.0;
            b(i) = A.row(i).dot(anchor) - support::uniform(rng, 0.0, 1.0);
        }
        // Bounding box rows keep the objective finite.
        Mat<double> Abox(m + 2 * n, n);
        Vec<double> bbox(m + 2 * n);
        Abox.topRows(m) = A;
        bbox.head(m) = b;
        for (Index j = 0; j < n; ++j) {
            Abox.row(m + 2 * j).setZero();
            Abox(m + 2 * j, j) = 1.0;
            bbox(m + 2 * j) = -100.0;
            Abox.row(m + 2 * j + 1).setZero();
            Abox(m + 2 * j + 1, j) = -1.0;
            bbox(m + 2 * j + 1) = -100.0;
        }
        c = support::random_vector(rng, n, -1.0, 1.0);
        const auto r = solve_lp(Abox, bbox, c);
        REQUIRE(r.status == LpStatus::Optimal);
        ++optimal_seen;
        CHECK(((Abox * *r.point - bbox).minCoeff() >= -1e-7));
        // The known feasible anchor cannot beat the reported optimum.
        CHECK(c.dot(anchor) <= *r.objective + 1e-7);
    }
    CHECK(optimal_seen == 200);
}
