#include <catch2/catch_amalgamated.hpp>

#include <specdim/csv.hpp>
#include <specdim/rng.hpp>
#include <specdim/sdr.hpp>

#include <algorithm>
#include <numeric>
#include <random>

using namespace specdim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
    Stream s(seed, 0, stream_role::generic);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = s.normal();
    return x;
}

// Independent re-derivation of the dichotomized-response target: one term
// per observation whose response is used as a threshold (so ties contribute
// with multiplicity), skipping the maximal response whose upper slice is
// empty.  nu1 / nu0 are the lower/upper slice means of z.
Eigen::MatrixXd dichotomized_reference(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
    const Eigen::Index n = z.rows();
    const Eigen::Index p = z.cols();
    const double y_max = y.maxCoeff();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = y(i);
        if (t == y_max) continue;
        Eigen::VectorXd lower = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd upper = Eigen::VectorXd::Zero(p);
        long n_low = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (y(j) <= t) {
                lower += z.row(j).transpose();
                ++n_low;
            } else {
                upper += z.row(j).transpose();
            }
        }
        Eigen::VectorXd nu1 = lower / static_cast<double>(n_low);
        Eigen::VectorXd nu0 = upper / static_cast<double>(n - n_low);
        m += 0.5 * (nu1 * nu1.transpose() + nu0 * nu0.transpose());
    }
    return m / static_cast<double>(n);
}

} // namespace

// ---------------------------------------------------------------------------
// Slice plans.

TEST_CASE("slice plan spreads the remainder over the lowest slices") {
    Eigen::VectorXd y(10);
    y << 3, 1, 4, 1, 5, 9, 2, 6, 8, 7;
    auto plan = make_slice_plan(y, 3);
    CHECK(plan.counts == std::vector<long>{4, 3, 3});
    long total = 0;
    for (long c : plan.counts) total += c;
    CHECK(total == 10);
    // Slices are contiguous in response order.
    double prev = -1e300;
    for (const auto& slice : plan.slices)
        for (Eigen::Index i : slice) {
            CHECK(y(i) >= prev);
            prev = y(i);
        }
}

TEST_CASE("slice plan breaks response ties by original index") {
    Eigen::VectorXd y(6);
    y << 2, 1, 1, 1, 1, 0;
    auto plan = make_slice_plan(y, 3);
    CHECK(plan.slices[0] == std::vector<Eigen::Index>{5, 1});
    CHECK(plan.slices[1] == std::vector<Eigen::Index>{2, 3});
    CHECK(plan.slices[2] == std::vector<Eigen::Index>{4, 0});
}

TEST_CASE("slice plan validation") {
    Eigen::VectorXd y(10);
    y.setLinSpaced(10, 0, 9);
    CHECK_THROWS_AS(make_slice_plan(y, 6), slicing_error);  // 2H > n
    CHECK_THROWS_AS(make_slice_plan(y, 1), slicing_error);
    CHECK_NOTHROW(make_slice_plan(y, 5)); // n = 2H is the boundary
}

// ---------------------------------------------------------------------------
// Sliced-means target.

TEST_CASE("sliced-means accumulation on a centered four-point line") {
    Eigen::MatrixXd z(4, 1);
    z << -1.5, -0.5, 0.5, 1.5;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    auto plan = make_slice_plan(y, 2);
    Eigen::MatrixXd m = detail::sliced_mean_target(z, plan);
    CHECK_THAT(m(0, 0), WithinRel(1.0, 1e-14)); // slice means are -1 and +1
}

TEST_CASE("full sliced-means pipeline whitens before slicing") {
    Eigen::MatrixXd x(4, 1);
    x << 1, 2, 3, 4;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    auto target = sir_matrix(x, y, 2);
    CHECK_THAT(target.matrix(0, 0), WithinRel(0.8, 1e-12));
    CHECK(target.method == "SIR(2)");
    CHECK(target.n == 4);
    CHECK_FALSE(target.regularized);
}

TEST_CASE("sliced-means target has rank at most H - 1") {
    Eigen::MatrixXd x = random_matrix(60, 6, 21);
    Eigen::VectorXd y = x.col(0) + 0.1 * random_matrix(60, 1, 22).col(0);
    auto target = sir_matrix(x, y, 4);
    const auto& lam = target.eig.spectrum.values;
    for (std::size_t j = 3; j < lam.size(); ++j) CHECK(lam[j] < 1e-10);
}

// ---------------------------------------------------------------------------
// Dichotomized-response target.

TEST_CASE("dichotomized target on a three-point line") {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 2;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    auto target = dee_sir_matrix(x, y);
    CHECK_THAT(target.matrix(0, 0), WithinRel(0.625, 1e-12));
    CHECK(target.method == "DEE-SIR");
}

TEST_CASE("dichotomized target vanishes when the response is constant") {
    Eigen::MatrixXd z = random_matrix(12, 3, 31);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(12, 7.0);
    // Only one block, which is final and therefore skipped.
    Eigen::MatrixXd m = detail::dichotomized_target(z, y);
    CHECK(m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dichotomized target matches an independent re-derivation") {
    // The accumulation assumes centered rows (it is fed whitened data in the
    // pipeline), so center the raw draws before comparing.
    SECTION("continuous responses") {
        Eigen::MatrixXd z = random_matrix(25, 3, 41);
        z.rowwise() -= z.colwise().mean().eval();
        Eigen::VectorXd y = random_matrix(25, 1, 42).col(0);
        Eigen::MatrixXd got = detail::dichotomized_target(z, y);
        Eigen::MatrixXd want = dichotomized_reference(z, y);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("heavily tied responses") {
        Eigen::MatrixXd z = random_matrix(30, 2, 43);
        z.rowwise() -= z.colwise().mean().eval();
        Eigen::VectorXd y(30);
        Stream s(44, 0, stream_role::generic);
        for (Eigen::Index i = 0; i < 30; ++i)
            y(i) = std::floor(4.0 * s.uniform01()); // values in {0,1,2,3}
        Eigen::MatrixXd got = detail::dichotomized_target(z, y);
        Eigen::MatrixXd want = dichotomized_reference(z, y);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("dichotomized target agrees between direct and sandwich routes") {
    Eigen::MatrixXd x = random_matrix(40, 4, 51);
    Eigen::VectorXd y = x.col(0).array().sin() + 0.2 * random_matrix(40, 1, 52).col(0).array();

    auto target = dee_sir_matrix(x, y); // computed on whitened rows

    // Sandwich route: accumulate on centered-but-unwhitened rows, then
    // conjugate by the inverse square root of the covariance.
    auto st = standardize(x);
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd l = detail::dichotomized_target(centered, y);
    Eigen::MatrixXd sandwich = st.inv_sqrt * l * st.inv_sqrt;

    CHECK((target.matrix - sandwich).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("targets are invariant under joint row permutation") {
    Eigen::MatrixXd x = random_matrix(30, 3, 61);
    Eigen::VectorXd y = x.col(0) + x.col(1).cwiseProduct(x.col(1));

    std::vector<Eigen::Index> idx(30);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 g(9);
    std::shuffle(idx.begin(), idx.end(), g);
    Eigen::MatrixXd xs(30, 3);
    Eigen::VectorXd ys(30);
    for (Eigen::Index i = 0; i < 30; ++i) {
        xs.row(i) = x.row(idx[static_cast<std::size_t>(i)]);
        ys(i) = y(idx[static_cast<std::size_t>(i)]);
    }

    CHECK((sir_matrix(x, y, 5).matrix - sir_matrix(xs, ys, 5).matrix)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((dee_sir_matrix(x, y).matrix - dee_sir_matrix(xs, ys).matrix)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("target spectra are invariant under affine covariate maps") {
    Eigen::MatrixXd x = random_matrix(80, 3, 71);
    Eigen::VectorXd y = x.col(0).array().exp() + 0.3 * random_matrix(80, 1, 72).col(0).array();

    Eigen::MatrixXd a(3, 3);
    a << 2, 0.5, 0, 0, 1, -1, 0.3, 0, 4; // invertible
    Eigen::RowVectorXd b(3);
    b << 10, -5, 0.1;
    Eigen::MatrixXd xt = (x * a).rowwise() + b;

    auto s1 = sir_matrix(x, y, 5).eig.spectrum.values;
    auto s2 = sir_matrix(xt, y, 5).eig.spectrum.values;
    for (std::size_t j = 0; j < s1.size(); ++j)
        CHECK_THAT(s1[j], WithinAbs(s2[j], 1e-6));

    auto d1 = dee_sir_matrix(x, y).eig.spectrum.values;
    auto d2 = dee_sir_matrix(xt, y).eig.spectrum.values;
    for (std::size_t j = 0; j < d1.size(); ++j)
        CHECK_THAT(d1[j], WithinAbs(d2[j], 1e-6));
}

// ---------------------------------------------------------------------------
// Criteria orchestration.

TEST_CASE("estimates come back in the requested method order") {
    Eigen::MatrixXd x = random_matrix(50, 4, 81);
    Eigen::VectorXd y = x.col(0) + 0.1 * random_matrix(50, 1, 82).col(0);
    auto result = estimate_dimension(
        x, y, sdr_estimator::sir,
        {method_tag::bic, method_tag::tdrr, method_tag::st, method_tag::re}, {}, 5);
    REQUIRE(result.estimates.size() == 4);
    CHECK(result.estimates[0].method == "BIC");
    CHECK(result.estimates[1].method == "TDRR");
    CHECK(result.estimates[2].method == "ST");
    CHECK(result.estimates[3].method == "RE");
}

TEST_CASE("the sequential test refuses non-sliced spectra") {
    Eigen::MatrixXd x = random_matrix(50, 4, 91);
    Eigen::VectorXd y = x.col(0);
    CHECK_THROWS_AS(
        estimate_dimension(x, y, sdr_estimator::dee, {method_tag::st}),
        input_error);
}

// ---------------------------------------------------------------------------
// Integration: the eight-predictor fuel-consumption data set.

TEST_CASE("dichotomized-target analysis of the fuel-consumption data") {
    CsvTable table = read_csv("data/cars_design.csv");
    REQUIRE(table.values.rows() == 392);
    REQUIRE(table.values.cols() == 9);
    const Eigen::Index y_col = table.column("mpg");
    Eigen::VectorXd y = table.values.col(y_col);
    Eigen::MatrixXd x = table.without_column(y_col);
    REQUIRE(x.cols() == 8);

    auto target = dee_sir_matrix(x, y);
    CHECK_FALSE(target.regularized);

    const std::vector<double> want_spectrum{
        0.918693235381, 0.130552748607, 0.105370611513, 0.037173364466,
        0.014765829054, 0.005041686551, 0.002721944263, 0.001037319392};
    REQUIRE(target.eig.spectrum.values.size() == 8);
    for (std::size_t j = 0; j < 8; ++j)
        CHECK_THAT(target.eig.spectrum.values[j], WithinAbs(want_spectrum[j], 1e-9));

    auto ests = run_sdr_criteria(
        target.eig.spectrum,
        {method_tag::tdrr, method_tag::rre, method_tag::re, method_tag::bic}, {},
        std::nullopt);
    REQUIRE(ests.size() == 4);

    const auto& tdrr = ests[0];
    CHECK(tdrr.q_hat == 3);
    const std::vector<double> want_fr{4.964460, 0.108236, 0.248139, 0.035325,
                                      0.006181, 0.000590, 0.000209};
    const std::vector<double> want_sr{0.033545, 1.830018, 0.310070,
                                      0.695288, 0.915925, 0.993742};
    for (std::size_t j = 0; j < want_fr.size(); ++j)
        CHECK_THAT(tdrr.first_round[j], WithinAbs(want_fr[j], 2e-6));
    for (std::size_t j = 0; j < want_sr.size(); ++j)
        CHECK_THAT(tdrr.second_round[j], WithinAbs(want_sr[j], 2e-6));

    CHECK(ests[1].q_hat == 1); // ridged ratio argmin
    CHECK(ests[2].q_hat == 1); // plain ratio argmin
    CHECK(ests[3].q_hat == 1); // penalized criterion, default penalty

    const std::vector<double> want_scores{123.368723, 106.860411, 66.203557,
                                          -6.275683, -102.588073};
    for (std::size_t j = 0; j < want_scores.size(); ++j)
        CHECK_THAT(ests[3].first_round[j], WithinAbs(want_scores[j], 1e-3));

    // A gentler penalty moves the maximizer out to 3.
    CriteriaOverrides soft;
    soft.alpha_n = std::sqrt(392.0);
    auto soft_bic =
        run_sdr_criteria(target.eig.spectrum, {method_tag::bic}, soft, std::nullopt);
    CHECK(soft_bic[0].q_hat == 3);
}
