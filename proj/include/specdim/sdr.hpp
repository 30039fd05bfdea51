#pragma once

// Target-matrix estimators for sufficient dimension reduction, plus the
// orchestrator that runs the selection criteria on their spectra.
//
// Two targets are provided, both built on whitened covariates Z:
//
//   * sliced means (sir_matrix): partition the sample into H slices by
//     response order statistics and accumulate p_k * mean_k * mean_k^T.
//
//   * dichotomized-response average (dee_sir_matrix): for every observed
//     threshold t, split the sample into {y <= t} and {y > t}, form the
//     symmetric average of the two slice-mean outer products,
//     (1/2)(nu1 nu1^T + nu0 nu0^T), and average these rank-one targets
//     over thresholds (tied thresholds counted with multiplicity; the
//     final threshold, whose upper slice is empty, is skipped).
//
// Both are computed either directly on pre-whitened data or as the
// sandwich S^{-1/2} L S^{-1/2} of the un-whitened accumulation; the two
// routes agree to floating-point accuracy and the test suite pins that.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "criteria.hpp"
#include "errors.hpp"
#include "methods.hpp"
#include "spectra.hpp"

namespace specdim {

// Deterministic slice plan: near-equal counts, remainder spread over the
// lowest-index slices, ties broken by stable sort on original index.
struct SlicePlan {
    int H = 0;
    std::vector<std::vector<Eigen::Index>> slices; // row indices per slice
    std::vector<long> counts;
};

inline SlicePlan make_slice_plan(const Eigen::VectorXd& y, int H) {
    const Eigen::Index n = y.size();
    if (H < 2) throw slicing_error("slice plan: need at least 2 slices");
    if (static_cast<long>(H) * 2 > n)
        throw slicing_error("slice plan: " + std::to_string(H) +
                            " slices is too many for " + std::to_string(n) + " rows");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return y(a) < y(b); });

    SlicePlan plan;
    plan.H = H;
    const Eigen::Index base = n / H;
    const Eigen::Index rem = n % H;
    Eigen::Index pos = 0;
    for (int k = 0; k < H; ++k) {
        const Eigen::Index size = base + (k < rem ? 1 : 0);
        plan.slices.emplace_back(order.begin() + pos, order.begin() + pos + size);
        plan.counts.push_back(size);
        pos += size;
    }
    return plan;
}

// An estimated target matrix with its spectrum.
struct SdrTarget {
    Eigen::MatrixXd matrix;
    EigenDecomposition eig;
    Eigen::MatrixXd inv_sqrt;  // whitening root used (for mapping directions back)
    std::string method;
    long n = 0;
    bool regularized = false;
};

namespace detail {

// Sliced-means accumulation on already-whitened rows.
inline Eigen::MatrixXd sliced_mean_target(const Eigen::MatrixXd& z, const SlicePlan& plan) {
    const Eigen::Index p = z.cols();
    const double n = static_cast<double>(z.rows());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (const auto& slice : plan.slices) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
        for (Eigen::Index i : slice) mean += z.row(i).transpose();
        mean /= static_cast<double>(slice.size());
        m += (static_cast<double>(slice.size()) / n) * mean * mean.transpose();
    }
    return m;
}

// Dichotomized-response accumulation on already-whitened (or merely
// centered) rows.  Thresholds run over the distinct observed responses;
// each is weighted by its multiplicity; the final block is skipped because
// its upper slice is empty.
inline Eigen::MatrixXd dichotomized_target(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
    const Eigen::Index n = z.rows();
    const Eigen::Index p = z.cols();
    if (n < 2) throw degenerate_input_error("dichotomized target: need at least 2 rows");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return y(a) < y(b); });

    const double dn = static_cast<double>(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd csum = Eigen::VectorXd::Zero(p);
    std::size_t block_start = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        csum += z.row(order[i]).transpose();
        const bool block_end =
            (i + 1 == order.size()) || (y(order[i + 1]) != y(order[i]));
        if (!block_end) continue;
        if (i + 1 == order.size()) break; // final block: upper slice empty
        const double phat = static_cast<double>(i + 1) / dn;
        const double mult = static_cast<double>(i + 1 - block_start);
        const double w = 0.5 * mult * (1.0 / (phat * phat) + 1.0 / ((1.0 - phat) * (1.0 - phat)));
        Eigen::VectorXd mvec = csum / dn;
        m += w * mvec * mvec.transpose();
        block_start = i + 1;
    }
    return m / dn;
}

} // namespace detail

// Sliced-means target on raw covariates: whitens, slices, accumulates.
inline SdrTarget sir_matrix(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int H) {
    if (x.rows() != y.size())
        throw estimator_error("sir_matrix: covariate rows and response length differ");
    SlicePlan plan = make_slice_plan(y, H);
    StandardizedData st = standardize(x);
    SdrTarget target;
    target.matrix = detail::sliced_mean_target(st.z, plan);
    target.eig = symmetric_eigen(target.matrix, x.rows());
    target.inv_sqrt = st.inv_sqrt;
    target.method = "SIR(" + std::to_string(H) + ")";
    target.n = x.rows();
    target.regularized = st.regularized;
    return target;
}

// Dichotomized-response-averaged target on raw covariates.
inline SdrTarget dee_sir_matrix(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size())
        throw estimator_error("dee_sir_matrix: covariate rows and response length differ");
    StandardizedData st = standardize(x);
    SdrTarget target;
    target.matrix = detail::dichotomized_target(st.z, y);
    target.eig = symmetric_eigen(target.matrix, x.rows());
    target.inv_sqrt = st.inv_sqrt;
    target.method = "DEE-SIR";
    target.n = x.rows();
    target.regularized = st.regularized;
    return target;
}

enum class sdr_estimator { sir, dee };

// Defaults for the regression-spectrum criteria at sample size n, ambient
// dimension p:
//   * double ridge ratio: c1 = ln(n)/(10 sqrt(n)), c2 = ln(n)/(5 sqrt(n)),
//     tau = 0.5;
//   * ridged ratio argmin: c = ln(n)/(10 sqrt(n));
//   * plain ratio argmin: d_max = min(10, p-1);
//   * penalized criterion: alpha = sqrt(n) * p / 2, which makes the
//     subtracted penalty equal sqrt(n) * j(j+1) / 2 — proportional to the
//     parameter count of a rank-j model and independent of the ambient
//     dimension.
struct SdrResult {
    SdrTarget target;
    std::vector<DimensionEstimate> estimates;
};

inline std::vector<DimensionEstimate> run_sdr_criteria(const EigenSpectrum& spec,
                                                       const std::vector<method_tag>& methods,
                                                       const CriteriaOverrides& ov,
                                                       std::optional<int> H) {
    const long n = spec.n;
    const int p = static_cast<int>(spec.size());
    RidgeSchedule sched = default_ridges_sdr(n);
    if (ov.c1 > 0) sched.c1 = ov.c1;
    if (ov.c2 > 0) sched.c2 = ov.c2;
    if (ov.tau > 0) sched.tau = ov.tau;

    std::vector<DimensionEstimate> out;
    for (method_tag m : methods) {
        switch (m) {
            case method_tag::tdrr:
                out.push_back(tdrr_sdr(spec, sched));
                break;
            case method_tag::rre: {
                const double c = ov.rre_c > 0
                                     ? ov.rre_c
                                     : std::log(static_cast<double>(n)) /
                                           (10.0 * std::sqrt(static_cast<double>(n)));
                out.push_back(rre(spec, c));
                break;
            }
            case method_tag::re: {
                const int d_max = ov.d_max > 0 ? ov.d_max : std::min(10, p - 1);
                out.push_back(re(spec, d_max));
                break;
            }
            case method_tag::bic: {
                const double alpha = ov.alpha_n > 0
                                         ? ov.alpha_n
                                         : std::sqrt(static_cast<double>(n)) *
                                               static_cast<double>(p) / 2.0;
                out.push_back(bic(spec, alpha));
                break;
            }
            case method_tag::st: {
                if (!H)
                    throw input_error(
                        "the sequential test applies only to sliced-means spectra (choose the sir estimator)");
                out.push_back(sequential_test(spec, *H, ov.level));
                break;
            }
        }
    }
    return out;
}

// Full pipeline: build the requested target, run the requested criteria.
inline SdrResult estimate_dimension(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    sdr_estimator estimator,
                                    const std::vector<method_tag>& methods,
                                    const CriteriaOverrides& ov = {}, int H = 10) {
    SdrResult result{
        estimator == sdr_estimator::sir ? sir_matrix(x, y, H) : dee_sir_matrix(x, y),
        {}};
    std::optional<int> h_for_st;
    if (estimator == sdr_estimator::sir) h_for_st = H;
    result.estimates = run_sdr_criteria(result.target.eig.spectrum, methods, ov, h_for_st);
    return result;
}

} // namespace specdim
