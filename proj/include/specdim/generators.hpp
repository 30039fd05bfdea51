#pragma once

// Seeded synthetic-data generators for the simulation studies: four
// regression designs with known structural dimension and one approximate
// factor panel, plus the shared samplers they are built from.
//
// Determinism contract: every sample is a pure function of
// (base seed, replication index).  Covariates, regression noise, loadings,
// factors, and idiosyncratic errors each draw from their own sub-stream,
// so changing one component's draw count never perturbs the others.
//
// Draw order is part of the contract and is frozen as follows: matrices
// fill row by row (all columns of row 0, then row 1, ...); in the
// heavy-tailed factor design each observation draws its normal vector
// first, then its chi-squared mixing variable.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rng.hpp"

namespace specdim {

// sign(x) * |x|^e: the odd extension of the fractional power to negative
// arguments (so e.g. odd_power(-4, 1.5) = -8).
inline double odd_power(double x, double e) {
    if (x == 0.0) return 0.0;
    return x < 0.0 ? -std::pow(-x, e) : std::pow(x, e);
}

// ---------------------------------------------------------------------------
// Regression designs.  X ~ N(0, I_p); the mean functions below use the
// first three coordinates, so p >= 3 throughout.

enum class sdr_example { ex1, ex2, ex3, ex4 };

inline sdr_example parse_sdr_example(const std::string& s) {
    if (s == "ex1") return sdr_example::ex1;
    if (s == "ex2") return sdr_example::ex2;
    if (s == "ex3") return sdr_example::ex3;
    if (s == "ex4") return sdr_example::ex4;
    throw input_error("unknown example '" + s + "'");
}

struct SdrModelSpec {
    sdr_example example = sdr_example::ex1;
    long n = 0;
    long p = 0;
    // Drift coefficient a(n) = a_scale * n^(-a_exponent) for the local
    // designs (ex3, ex4).  Negative fields select the design's defaults
    // (ex3: 2 * n^(-1/4); ex4: 1 * n^(-1/4)).
    double a_scale = -1.0;
    double a_exponent = -1.0;

    double drift(long n_effective) const {
        const double scale = a_scale >= 0 ? a_scale : (example == sdr_example::ex3 ? 2.0 : 1.0);
        const double expo = a_exponent >= 0 ? a_exponent : 0.25;
        return scale * std::pow(static_cast<double>(n_effective), -expo);
    }
};

struct SdrSample {
    Eigen::MatrixXd x; // n x p
    Eigen::VectorXd y; // n
    int q_true = 0;    // structural dimension of the design
    int q1_true = 0;   // dimension of the limiting design (local examples)
};

// Mean functions, exposed for direct unit testing.
inline double ex1_link(const Eigen::RowVectorXd& x) {
    return x(0) / (0.5 + std::pow(std::abs(x(1) + 1.5), 1.5)) +
           x(2) * x(2) * x(2) / 4.0;
}
inline double ex2_link(const Eigen::RowVectorXd& x) {
    return x(0) * (x(1) + x(2) + 1.0);
}
inline double ex3_link(const Eigen::RowVectorXd& x, double a) {
    return (x(0) + x(1)) * (1.0 + a * odd_power(x(2), 1.5));
}
inline double ex4_link(const Eigen::RowVectorXd& x, double a) {
    return 0.25 * std::exp(2.0 * x(0)) + a * x(1) * x(1) * x(1);
}

inline SdrSample gen_sdr(const SdrModelSpec& spec, std::uint64_t base_seed,
                         std::uint64_t replication) {
    if (spec.p < 3)
        throw dimension_error("gen_sdr: designs need p >= 3, got " + std::to_string(spec.p));
    if (spec.n < 20)
        throw degenerate_input_error("gen_sdr: need n >= 20, got " + std::to_string(spec.n));

    Stream xs(base_seed, replication, stream_role::covariates);
    Stream es(base_seed, replication, stream_role::noise);

    SdrSample sample;
    sample.x.resize(spec.n, spec.p);
    for (Eigen::Index i = 0; i < sample.x.rows(); ++i)
        for (Eigen::Index j = 0; j < sample.x.cols(); ++j) sample.x(i, j) = xs.normal();

    sample.y.resize(spec.n);
    const double a = spec.drift(spec.n);
    for (Eigen::Index i = 0; i < sample.y.size(); ++i) {
        const Eigen::RowVectorXd row = sample.x.row(i);
        const double eps = es.normal();
        switch (spec.example) {
            case sdr_example::ex1:
                sample.y(i) = ex1_link(row) + 0.2 * eps;
                sample.q_true = 3;
                sample.q1_true = 3;
                break;
            case sdr_example::ex2:
                sample.y(i) = ex2_link(row) + 0.5 * eps;
                sample.q_true = 2;
                sample.q1_true = 2;
                break;
            case sdr_example::ex3:
                sample.y(i) = ex3_link(row, a) + eps;
                sample.q_true = 2;
                sample.q1_true = 1;
                break;
            case sdr_example::ex4:
                sample.y(i) = ex4_link(row, a) + eps;
                sample.q_true = 2;
                sample.q1_true = 1;
                break;
        }
    }
    return sample;
}

// ---------------------------------------------------------------------------
// Approximate factor panel Y = B F^T + U (p x n), d common factors.

enum class factor_cov { identity, ar, equi };   // I_d, 0.8^|i-j|, 0.7 off-diagonal
enum class factor_dist { normal, student_t };   // t uses nu = 2.5 by default

inline factor_cov parse_factor_cov(const std::string& s) {
    if (s == "s1" || s == "identity") return factor_cov::identity;
    if (s == "s2" || s == "ar") return factor_cov::ar;
    if (s == "s3" || s == "equi") return factor_cov::equi;
    throw input_error("unknown factor covariance '" + s + "' (expected s1, s2, or s3)");
}

inline factor_dist parse_factor_dist(const std::string& s) {
    if (s == "normal") return factor_dist::normal;
    if (s == "t2.5" || s == "t") return factor_dist::student_t;
    throw input_error("unknown factor distribution '" + s + "' (expected normal or t2.5)");
}

struct FactorModelSpec {
    long n = 0;
    long p = 0;
    int d = 4;
    factor_dist dist = factor_dist::normal;
    factor_cov cov = factor_cov::identity;
    double nu = 2.5;
};

inline Eigen::MatrixXd factor_covariance(factor_cov cov, int d) {
    Eigen::MatrixXd sigma(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            switch (cov) {
                case factor_cov::identity: sigma(i, j) = (i == j) ? 1.0 : 0.0; break;
                case factor_cov::ar: sigma(i, j) = std::pow(0.8, std::abs(i - j)); break;
                case factor_cov::equi: sigma(i, j) = (i == j) ? 1.0 : 0.7; break;
            }
        }
    return sigma;
}

// One simulated panel.  Loadings are redrawn every replication.  The
// heavy-tailed variant draws one chi-squared mixing variable w per
// observation (a joint scale mixture, not independent univariate t cells)
// and rescales the normal vector by sqrt((nu-2)/w), so the factor
// covariance equals the requested matrix exactly.
inline Eigen::MatrixXd gen_factor(const FactorModelSpec& spec, std::uint64_t base_seed,
                                  std::uint64_t replication) {
    if (spec.d < 1 || spec.d > std::min(spec.n, spec.p))
        throw dimension_error("gen_factor: need 1 <= d <= min(n, p)");

    Stream bs(base_seed, replication, stream_role::loadings);
    Stream fs(base_seed, replication, stream_role::factors);
    Stream us(base_seed, replication, stream_role::idiosyncratic);

    Eigen::MatrixXd b(spec.p, spec.d);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = bs.normal();

    const Eigen::MatrixXd sigma = factor_covariance(spec.cov, spec.d);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw estimator_error("gen_factor: factor covariance is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    Eigen::MatrixXd f(spec.n, spec.d);
    Eigen::VectorXd z(spec.d);
    for (Eigen::Index t = 0; t < f.rows(); ++t) {
        for (int j = 0; j < spec.d; ++j) z(j) = fs.normal();
        double scale = 1.0;
        if (spec.dist == factor_dist::student_t) {
            const double w = fs.chi_squared(spec.nu);
            scale = std::sqrt((spec.nu - 2.0) / w);
        }
        f.row(t) = (chol * z * scale).transpose();
    }

    Eigen::MatrixXd u(spec.p, spec.n);
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j) u(i, j) = us.normal();

    return b * f.transpose() + u;
}

} // namespace specdim
