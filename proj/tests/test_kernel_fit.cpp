#include <catch2/catch_amalgamated.hpp>

#include <specdim/generators.hpp>
#include <specdim/kernel_fit.hpp>
#include <specdim/rng.hpp>

#include <cmath>

using namespace specdim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("quartic kernel values") {
    CHECK(quartic_kernel(0.0) == 0.9375);
    CHECK(quartic_kernel(1.0) == 0.0);
    CHECK(quartic_kernel(-1.0) == 0.0);
    CHECK(quartic_kernel(1.0001) == 0.0);
    CHECK(quartic_kernel(-7.0) == 0.0);
    CHECK_THAT(quartic_kernel(0.5), WithinRel(0.52734375, 1e-15));
    CHECK(quartic_kernel(0.25) == quartic_kernel(-0.25));
}

TEST_CASE("kernel-weighted mean on a three-point line") {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 2;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;

    auto fit = nw_fit(x, y, 1.5);
    CHECK(fit.fallback_points.empty());
    CHECK_THAT(fit.fitted(0), WithinRel(131.0 / 106.0, 1e-14));
    CHECK_THAT(fit.fitted(1), WithinRel(2.0, 1e-14));
    CHECK_THAT(fit.fitted(2), WithinRel(293.0 / 106.0, 1e-14));
    CHECK_THAT(fit.rss, WithinRel(625.0 / 16854.0, 1e-13));
    CHECK_THAT(rss(fit.fitted, y), WithinRel(fit.rss, 1e-15));
}

TEST_CASE("kernel-weighted mean is translation-equivariant in the design") {
    Eigen::MatrixXd z(3, 1);
    z << -1, 0, 1;
    Eigen::VectorXd y(3);
    y << 0, 1, 2;

    auto fit = nw_fit(z, y, 1.5);
    CHECK_THAT(fit.fitted(0), WithinRel(25.0 / 106.0, 1e-14));
    CHECK_THAT(fit.fitted(1), WithinRel(1.0, 1e-14));
    CHECK_THAT(fit.fitted(2), WithinRel(187.0 / 106.0, 1e-14));
    CHECK_THAT(fit.rss, WithinRel(625.0 / 16854.0, 1e-13));
}

TEST_CASE("leave-one-out excludes the point itself") {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 2;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;

    auto fit = nw_fit(x, y, 1.5, /*leave_one_out=*/true);
    CHECK(fit.fallback_points.empty());
    for (int i = 0; i < 3; ++i) CHECK_THAT(fit.fitted(i), WithinRel(2.0, 1e-14));
    CHECK_THAT(fit.rss, WithinRel(2.0 / 3.0, 1e-14));
}

TEST_CASE("constant responses are fitted exactly") {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 1, 0, 0, 1, 1, 1;
    Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 5.5);
    auto fit = nw_fit(x, y, 0.8);
    for (int i = 0; i < 4; ++i) CHECK(fit.fitted(i) == 5.5);
    CHECK(fit.rss == 0.0);
}

TEST_CASE("a huge bandwidth reproduces the global mean") {
    Eigen::MatrixXd x(5, 1);
    x << 0, 1, 2, 3, 4;
    Eigen::VectorXd y(5);
    y << 3, 1, 4, 1, 5;
    auto fit = nw_fit(x, y, 1e9);
    for (int i = 0; i < 5; ++i) CHECK_THAT(fit.fitted(i), WithinAbs(y.mean(), 1e-8));
}

TEST_CASE("empty leave-one-out neighborhoods fall back to the global mean") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 2, 3;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    auto fit = nw_fit(x, y, 1e-6, /*leave_one_out=*/true);
    CHECK(fit.fallback_points.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(fit.fitted(i) == y.mean());
}

TEST_CASE("a tiny in-sample bandwidth interpolates distinct points") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 2, 3;
    Eigen::VectorXd y(4);
    y << 1, -2, 3, -4;
    auto fit = nw_fit(x, y, 1e-6);
    CHECK(fit.fallback_points.empty());
    for (int i = 0; i < 4; ++i) CHECK(fit.fitted(i) == y(i));
    CHECK(fit.rss == 0.0);
}

TEST_CASE("kernel fit validation") {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 2;
    Eigen::VectorXd y(2);
    y << 1, 2;
    CHECK_THROWS_AS(nw_fit(x, y, 1.0), estimator_error);
    Eigen::VectorXd y3(3);
    y3 << 1, 2, 3;
    CHECK_THROWS_AS(nw_fit(x, y3, 0.0), estimator_error);
    CHECK_THROWS_AS(rss(y, y3), estimator_error);
}

TEST_CASE("residual summary on hand vectors") {
    Eigen::VectorXd fitted(3), y(3);
    fitted << 1, 2, 3;
    y << 1, 2, 3;
    CHECK(rss(fitted, y) == 0.0);
    y << 2, 2, 3;
    CHECK_THAT(rss(fitted, y), WithinRel(1.0 / 3.0, 1e-15));
}

TEST_CASE("in-sample error never exceeds leave-one-out error on smooth designs") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SdrModelSpec spec;
        spec.example = sdr_example::ex2;
        spec.n = 60;
        spec.p = 3;
        auto sample = gen_sdr(spec, seed, 0);
        Eigen::MatrixXd proj = sample.x.leftCols(2);
        for (double h : bandwidth_grid()) {
            const double in = nw_fit(proj, sample.y, h).rss;
            const double loo = nw_fit(proj, sample.y, h, true).rss;
            INFO("seed " << seed << ", h " << h);
            CHECK(in <= loo + 1e-12);
        }
    }
}

TEST_CASE("rule-of-thumb bandwidths") {
    CHECK_THAT(bandwidth_rule(392, 3), WithinRel(0.10652966725990126, 1e-13));
    CHECK_THAT(bandwidth_rule(800, 3), WithinRel(0.096208372425837609, 1e-13));
    CHECK_THAT(bandwidth_rule(16, 1), WithinRel(0.14358729437462939, 1e-13));
    CHECK_THROWS_AS(bandwidth_rule(0, 1), estimator_error);
    CHECK_THROWS_AS(bandwidth_rule(10, 0), estimator_error);
}

TEST_CASE("bandwidth grids") {
    auto grid = bandwidth_grid();
    REQUIRE(grid.size() == 18);
    CHECK(grid.front() == 0.1);
    CHECK(grid.back() == 0.95);

    auto full = bandwidth_grid(true);
    REQUIRE(full.size() == 20);
    CHECK(full.front() == 0.05);
    CHECK(full.back() == 1.0);
}

TEST_CASE("leading directions are unit length and projections are centered") {
    SdrModelSpec spec;
    spec.example = sdr_example::ex2;
    spec.n = 80;
    spec.p = 5;
    auto sample = gen_sdr(spec, 77, 0);
    auto target = sir_matrix(sample.x, sample.y, 8);

    auto design = project_leading_directions(sample.x, target, 2);
    REQUIRE(design.directions.cols() == 2);
    REQUIRE(design.projected.rows() == 80);
    for (int k = 0; k < 2; ++k)
        CHECK_THAT(design.directions.col(k).norm(), WithinRel(1.0, 1e-12));
    CHECK(design.projected.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);

    // Direct recomputation of the projection.
    Eigen::RowVectorXd mean = sample.x.colwise().mean();
    Eigen::MatrixXd expect = (sample.x.rowwise() - mean) * design.directions;
    CHECK((design.projected - expect).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(project_leading_directions(sample.x, target, 0), estimator_error);
    CHECK_THROWS_AS(project_leading_directions(sample.x, target, 6), estimator_error);
}
