#include <catch2/catch_amalgamated.hpp>

#include <specdim/rng.hpp>
#include <specdim/spectra.hpp>

#include <algorithm>
#include <numeric>
#include <random>

using namespace specdim;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
    Stream s(seed, 0, stream_role::generic);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = s.normal();
    return x;
}

// Independent two-pass covariance oracle: explicit loops, no linear algebra.
Eigen::MatrixXd covariance_oracle(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows(), p = x.cols();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) mean(j) += x(i, j);
    mean /= static_cast<double>(n);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = 0; b < p; ++b) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                acc += (x(i, a) - mean(a)) * (x(i, b) - mean(b));
            cov(a, b) = acc / static_cast<double>(n);
        }
    return cov;
}

} // namespace

TEST_CASE("sample covariance uses the 1/n convention") {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 2.0;
    Eigen::MatrixXd cov = sample_covariance(x);
    CHECK(cov(0, 0) == 1.0); // {0,2}: mean 1, squared deviations 1,1 -> 1 with 1/n
}

TEST_CASE("sample covariance of identical rows is zero") {
    Eigen::MatrixXd x(3, 2);
    x << 4, -1, 4, -1, 4, -1;
    CHECK(sample_covariance(x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample covariance matches an independent two-pass oracle") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 2, 3, 5, -2, 0, 7, 1;
    Eigen::MatrixXd cov = sample_covariance(x);
    Eigen::MatrixXd ref = covariance_oracle(x);
    CHECK((cov - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sample covariance needs two rows") {
    Eigen::MatrixXd x(1, 3);
    x << 1, 2, 3;
    CHECK_THROWS_AS(sample_covariance(x), degenerate_input_error);
}

TEST_CASE("sample covariance is invariant under row permutation") {
    Eigen::MatrixXd x = random_matrix(11, 3, 99);
    Eigen::MatrixXd shuffled = x;
    std::vector<Eigen::Index> idx(11);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 g(5);
    std::shuffle(idx.begin(), idx.end(), g);
    for (Eigen::Index i = 0; i < 11; ++i) shuffled.row(i) = x.row(idx[static_cast<std::size_t>(i)]);
    CHECK((sample_covariance(x) - sample_covariance(shuffled)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("symmetric_eigen sorts descending and handles simple matrices") {
    Eigen::MatrixXd a = Eigen::Vector3d(3, 1, 2).asDiagonal();
    auto eig = symmetric_eigen(a);
    REQUIRE(eig.spectrum.values.size() == 3);
    CHECK_THAT(eig.spectrum.values[0], Catch::Matchers::WithinAbs(3.0, 1e-14));
    CHECK_THAT(eig.spectrum.values[1], Catch::Matchers::WithinAbs(2.0, 1e-14));
    CHECK_THAT(eig.spectrum.values[2], Catch::Matchers::WithinAbs(1.0, 1e-14));

    CHECK(symmetric_eigen(Eigen::MatrixXd::Zero(4, 4)).spectrum.values ==
          std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("symmetric_eigen on a rank-one outer product") {
    Eigen::Vector3d v(2, 1, 0); // squared norm 5
    Eigen::MatrixXd a = v * v.transpose();
    auto eig = symmetric_eigen(a);
    CHECK_THAT(eig.spectrum.values[0], Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK(eig.spectrum.values[1] == 0.0); // clamped exactly
    CHECK(eig.spectrum.values[2] == 0.0);
}

TEST_CASE("symmetric_eigen clamps tiny negatives and rejects real ones") {
    Eigen::MatrixXd nearly = Eigen::Vector2d(1.0, -1e-14).asDiagonal();
    auto eig = symmetric_eigen(nearly);
    CHECK(eig.spectrum.values[1] == 0.0);

    Eigen::MatrixXd negative = Eigen::Vector2d(1.0, -0.5).asDiagonal();
    CHECK_THROWS_AS(symmetric_eigen(negative), not_psd_error);
}

TEST_CASE("symmetric_eigen rejects asymmetric input") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(symmetric_eigen(a), estimator_error);
}

TEST_CASE("eigendecomposition reconstructs the matrix") {
    Eigen::MatrixXd x = random_matrix(30, 5, 3);
    Eigen::MatrixXd a = sample_covariance(x); // PSD
    auto eig = symmetric_eigen(a);
    Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(eig.spectrum.values.data(), 5);
    Eigen::MatrixXd rebuilt = eig.vectors * lam.asDiagonal() * eig.vectors.transpose();
    CHECK((a - rebuilt).norm() <= 1e-8 * (1.0 + a.norm()));
}

TEST_CASE("spectrum is invariant under orthogonal similarity") {
    Eigen::MatrixXd x = random_matrix(40, 4, 17);
    Eigen::MatrixXd a = sample_covariance(x);
    // Build an orthogonal matrix from a QR factorization of a random one.
    Eigen::MatrixXd raw = random_matrix(4, 4, 18);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd rotated = q * a * q.transpose();
    rotated = 0.5 * (rotated + rotated.transpose()); // kill float asymmetry
    auto e1 = symmetric_eigen(a);
    auto e2 = symmetric_eigen(rotated);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK_THAT(e1.spectrum.values[k],
                   Catch::Matchers::WithinAbs(e2.spectrum.values[k], 1e-8));
}

TEST_CASE("standardize centers and whitens") {
    SECTION("one-dimensional toy") {
        Eigen::MatrixXd x(2, 1);
        x << 0.0, 2.0;
        auto st = standardize(x);
        CHECK_THAT(st.z(0, 0), Catch::Matchers::WithinAbs(-1.0, 1e-12));
        CHECK_THAT(st.z(1, 0), Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK_FALSE(st.regularized);
    }
    SECTION("random data whitens to the identity") {
        Eigen::MatrixXd x = random_matrix(50, 3, 11);
        auto st = standardize(x);
        Eigen::MatrixXd cov = sample_covariance(st.z);
        CHECK((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(st.z.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("already-standardized input passes through") {
        Eigen::MatrixXd x = random_matrix(60, 3, 12);
        auto first = standardize(x);
        auto second = standardize(first.z);
        CHECK((second.z - first.z).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("standardize ridges singular covariances and flags it") {
    Eigen::MatrixXd x = random_matrix(20, 2, 13);
    Eigen::MatrixXd xx(20, 3);
    xx << x, x.col(0); // duplicate column: exactly singular covariance
    auto st = standardize(xx);
    CHECK(st.regularized);
    CHECK(st.z.allFinite());
}
