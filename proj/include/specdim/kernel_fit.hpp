#pragma once

// Post-selection fit diagnostic: Nadaraya-Watson regression of the response
// on the leading projected directions, with a product quartic kernel, and
// the mean-squared-residual summary.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "sdr.hpp"
#include "spectra.hpp"

namespace specdim {

// Quartic kernel: 15/16 (1 - u^2)^2 on |u| <= 1, zero outside.
inline double quartic_kernel(double u) {
    if (std::abs(u) > 1.0) return 0.0;
    const double t = 1.0 - u * u;
    return 0.9375 * t * t;
}

// Leading directions of an estimated target mapped back through the
// whitening root, unit-normalized, plus the centered data projected onto
// them.
struct ProjectedDesign {
    Eigen::MatrixXd directions; // p x q, unit columns
    Eigen::MatrixXd projected;  // n x q
};

inline ProjectedDesign project_leading_directions(const Eigen::MatrixXd& x,
                                                  const SdrTarget& target, int q) {
    const Eigen::Index p = x.cols();
    if (q < 1 || q > p)
        throw estimator_error("project_leading_directions: need 1 <= q <= p");

    ProjectedDesign design;
    design.directions.resize(p, q);
    for (int k = 0; k < q; ++k) {
        Eigen::VectorXd beta = target.inv_sqrt * target.eig.vectors.col(k);
        const double norm = beta.norm();
        if (norm == 0.0)
            throw estimator_error("project_leading_directions: zero direction");
        design.directions.col(k) = beta / norm;
    }
    Eigen::RowVectorXd mean = x.colwise().mean();
    design.projected = (x.rowwise() - mean) * design.directions;
    return design;
}

struct NwFit {
    Eigen::VectorXd fitted;
    std::vector<Eigen::Index> fallback_points; // empty neighborhoods, fitted by global mean
    double rss = 0.0;                          // mean squared residual
};

// Kernel-weighted mean at every sample point.  With leave_one_out the point
// itself is excluded from its own neighborhood (for cross-validation).  A
// point whose neighborhood weight is zero falls back to the global response
// mean and is flagged.
inline NwFit nw_fit(const Eigen::MatrixXd& projected, const Eigen::VectorXd& y, double h,
                    bool leave_one_out = false) {
    const Eigen::Index n = projected.rows();
    const Eigen::Index q = projected.cols();
    if (n != y.size()) throw estimator_error("nw_fit: design rows and response length differ");
    if (!(h > 0.0)) throw estimator_error("nw_fit: bandwidth must be positive");

    const double global_mean = y.mean();
    NwFit fit;
    fit.fitted.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double num = 0.0;
        double den = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (leave_one_out && j == i) continue;
            double w = 1.0;
            for (Eigen::Index k = 0; k < q; ++k) {
                w *= quartic_kernel((projected(i, k) - projected(j, k)) / h);
                if (w == 0.0) break;
            }
            num += w * y(j);
            den += w;
        }
        if (den == 0.0) {
            fit.fitted(i) = global_mean;
            fit.fallback_points.push_back(i);
        } else {
            fit.fitted(i) = num / den;
        }
    }
    fit.rss = (y - fit.fitted).squaredNorm() / static_cast<double>(n);
    return fit;
}

// Mean squared residual between a fit and the observed responses.
inline double rss(const Eigen::VectorXd& fitted, const Eigen::VectorXd& y) {
    if (fitted.size() != y.size()) throw estimator_error("rss: length mismatch");
    return (y - fitted).squaredNorm() / static_cast<double>(y.size());
}

// Rule-of-thumb bandwidth for q projected directions.
inline double bandwidth_rule(long n, int q) {
    if (n < 1 || q < 1) throw estimator_error("bandwidth_rule: need n >= 1 and q >= 1");
    return std::pow(static_cast<double>(n), -1.0 / (4.0 + static_cast<double>(q))) / 4.0;
}

// Bandwidth grid l/20.  The default keeps the values strictly inside
// (0.05, 1), i.e. l = 2..19; the full grid l = 1..20 sits behind the flag.
inline std::vector<double> bandwidth_grid(bool full = false) {
    std::vector<double> grid;
    for (int l = full ? 1 : 2; l <= (full ? 20 : 19); ++l)
        grid.push_back(static_cast<double>(l) / 20.0);
    return grid;
}

} // namespace specdim
