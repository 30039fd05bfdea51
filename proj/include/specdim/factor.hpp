#pragma once

// Factor-number estimation: spectrum of the scaled Gram matrix of a panel
// and the criterion pipeline with factor-specific defaults.
//
// Panels are p x n (variables in rows, observations in columns).  The
// spectrum is that of Y Y^T / (np); when p > n it is computed through the
// n x n dual Y^T Y / (np), whose nonzero eigenvalues coincide, and padded
// with zeros to length p.

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "criteria.hpp"
#include "errors.hpp"
#include "methods.hpp"
#include "spectra.hpp"

namespace specdim {

// Eigenvalues of the scaled Gram matrix of a p x n panel, descending,
// length p.  With demean = true each variable (row) is centered across
// observations first; by default the raw panel is used.
inline EigenSpectrum factor_spectrum(const Eigen::MatrixXd& y_panel, bool demean = false) {
    const Eigen::Index p = y_panel.rows();
    const Eigen::Index n = y_panel.cols();
    if (p < 3 || n < 3)
        throw dimension_error("factor_spectrum: panel must be at least 3 x 3, got " +
                              std::to_string(p) + " x " + std::to_string(n));
    if (!y_panel.allFinite())
        throw input_error("factor_spectrum: panel contains non-finite entries");

    Eigen::MatrixXd y = y_panel;
    if (demean) y.colwise() -= y.rowwise().mean();

    const double scale = static_cast<double>(n) * static_cast<double>(p);
    EigenSpectrum spec;
    spec.n = n;
    spec.p = p;
    if (p <= n) {
        Eigen::MatrixXd gram = (y * y.transpose()) / scale;
        spec.values = symmetric_eigen(gram, n).spectrum.values;
    } else {
        Eigen::MatrixXd dual = (y.transpose() * y) / scale;
        spec.values = symmetric_eigen(dual, n).spectrum.values;
        spec.values.resize(static_cast<std::size_t>(p), 0.0);
    }
    return spec;
}

// Defaults for the factor-spectrum criteria on a p x n panel:
//   * double ridge ratio: ridges from m = min(n, p);
//   * ridged ratio argmin: c = ln(n)/(10 n);
//   * plain ratio argmin: d_max = min(p, n)/2 (at least 1, at most p-1);
//   * penalized criterion: alpha = ln(n*p), the log of the number of
//     observed panel entries.
struct FactorResult {
    EigenSpectrum spectrum;
    std::vector<DimensionEstimate> estimates;
};

inline std::vector<DimensionEstimate> run_factor_criteria(const EigenSpectrum& spec,
                                                          const std::vector<method_tag>& methods,
                                                          const CriteriaOverrides& ov = {}) {
    const long n = spec.n;
    const long p = spec.p;
    RidgeSchedule sched = default_ridges_factor(n, p);
    if (ov.c1 > 0) sched.c1 = ov.c1;
    if (ov.c2 > 0) sched.c2 = ov.c2;
    if (ov.tau > 0) sched.tau = ov.tau;

    std::vector<DimensionEstimate> out;
    for (method_tag m : methods) {
        switch (m) {
            case method_tag::tdrr:
                out.push_back(tdrr_factor(spec, sched));
                break;
            case method_tag::rre: {
                const double c = ov.rre_c > 0 ? ov.rre_c
                                              : std::log(static_cast<double>(n)) /
                                                    (10.0 * static_cast<double>(n));
                out.push_back(rre(spec, c));
                break;
            }
            case method_tag::re: {
                int d_max = ov.d_max > 0 ? ov.d_max
                                         : static_cast<int>(std::min(p, n) / 2);
                d_max = std::max(1, std::min(d_max, static_cast<int>(p) - 1));
                out.push_back(re(spec, d_max));
                break;
            }
            case method_tag::bic: {
                const double alpha = ov.alpha_n > 0
                                         ? ov.alpha_n
                                         : std::log(static_cast<double>(n) *
                                                    static_cast<double>(p));
                out.push_back(bic(spec, alpha));
                break;
            }
            case method_tag::st:
                throw input_error("the sequential test does not apply to factor spectra");
        }
    }
    return out;
}

inline FactorResult estimate_num_factors(const Eigen::MatrixXd& y_panel,
                                         const std::vector<method_tag>& methods,
                                         const CriteriaOverrides& ov = {},
                                         bool demean = false) {
    FactorResult result{factor_spectrum(y_panel, demean), {}};
    result.estimates = run_factor_criteria(result.spectrum, methods, ov);
    return result;
}

} // namespace specdim
