#pragma once

// Dense symmetric-matrix primitives: sample moments, whitening, and
// eigendecomposition with a clean descending nonnegative spectrum.
//
// Conventions pinned here and relied on everywhere else:
//   * covariance uses the 1/n normalization (not 1/(n-1)), matching the
//     population formulas the downstream estimators discretize;
//   * whitening uses the symmetric inverse square root V D^{-1/2} V^T from
//     the eigendecomposition (not Cholesky), so results are basis-symmetric
//     and reproducible across implementations;
//   * near-singular covariances are ridged once by eps = 1e-8 * trace/p and
//     flagged, never silently;
//   * eigenvalues in [-1e-12 * lambda_max, 0) are clamped to zero; anything
//     below that band throws (the upstream matrix was not PSD).

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace specdim {

// Descending nonnegative eigenvalues plus the sampling context needed to
// build ridge schedules downstream.
struct EigenSpectrum {
    std::vector<double> values; // nonincreasing, nonnegative
    long n = 0;                 // sample size behind the estimate
    long p = 0;                 // ambient dimension

    std::size_t size() const { return values.size(); }
};

struct EigenDecomposition {
    EigenSpectrum spectrum;
    Eigen::MatrixXd vectors; // columns aligned with spectrum.values
};

struct StandardizedData {
    Eigen::MatrixXd z;         // centered, whitened rows
    Eigen::MatrixXd inv_sqrt;  // the symmetric inverse square root used
    bool regularized = false;  // true if the ridge fallback fired
};

// Sample covariance with the 1/n convention.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    if (n < 2)
        throw degenerate_input_error(
            "sample_covariance: need at least 2 rows, got " + std::to_string(n));
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;
    return (centered.transpose() * centered) / static_cast<double>(n);
}

// Eigendecomposition of a symmetric matrix: descending values, tiny
// negatives clamped, clearly negative values rejected.
inline EigenDecomposition symmetric_eigen(const Eigen::MatrixXd& a, long n_context = 0) {
    if (a.rows() != a.cols())
        throw estimator_error("symmetric_eigen: matrix is not square");
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
        throw estimator_error("symmetric_eigen: matrix is not symmetric within tolerance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success)
        throw estimator_error("symmetric_eigen: eigensolver failed to converge");

    const Eigen::Index p = a.rows();
    EigenDecomposition out;
    out.spectrum.n = n_context;
    out.spectrum.p = p;
    out.spectrum.values.resize(static_cast<std::size_t>(p));
    out.vectors.resize(p, p);

    // Eigen returns ascending order; reverse to descending.
    for (Eigen::Index k = 0; k < p; ++k) {
        out.spectrum.values[static_cast<std::size_t>(k)] = solver.eigenvalues()(p - 1 - k);
        out.vectors.col(k) = solver.eigenvectors().col(p - 1 - k);
    }

    const double lam_max = std::max(out.spectrum.values.front(), 0.0);
    const double floor = -1e-12 * lam_max;
    for (double& v : out.spectrum.values) {
        if (v < floor)
            throw not_psd_error("symmetric_eigen: eigenvalue " + std::to_string(v) +
                                " is negative beyond tolerance; input is not PSD");
        if (v < 0.0) v = 0.0;
    }
    return out;
}

// Center and whiten the rows of x.  If a covariance eigenvalue falls below
// 1e-8 * trace/p the covariance is ridged by that amount (once) and the
// result is flagged.
inline StandardizedData standardize(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    Eigen::MatrixXd cov = sample_covariance(x);

    StandardizedData out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw estimator_error("standardize: covariance eigendecomposition failed");

    const double eps = 1e-8 * cov.trace() / static_cast<double>(p);
    if (solver.eigenvalues().minCoeff() < eps) {
        cov += eps * Eigen::MatrixXd::Identity(p, p);
        solver.compute(cov);
        if (solver.info() != Eigen::Success)
            throw estimator_error("standardize: eigendecomposition failed after ridging");
        out.regularized = true;
        if (solver.eigenvalues().minCoeff() <= 0.0)
            throw estimator_error("standardize: covariance is singular even after ridging");
    }

    Eigen::VectorXd inv_root = solver.eigenvalues().array().rsqrt();
    out.inv_sqrt = solver.eigenvectors() * inv_root.asDiagonal() * solver.eigenvectors().transpose();

    Eigen::RowVectorXd mean = x.colwise().mean();
    out.z = (x.rowwise() - mean) * out.inv_sqrt;
    (void)n;
    return out;
}

} // namespace specdim
