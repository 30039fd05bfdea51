#pragma once

// Dimension-selection criteria over an eigenvalue spectrum.
//
// All functions are pure: same spectrum + same schedule -> identical output.
// Eigenvalues must arrive descending and nonnegative (the spectra module
// guarantees this); every entry point validates that invariant.
//
//   * tdrr_sdr / tdrr_factor - two nested rounds of ridged ratios of
//     shrunk eigenvalues s_j = lambda_j/(1+lambda_j); the estimate is the
//     largest index whose second-round ratio falls at or below tau.
//     The regression (SDR) variant squares s_j in the first round; the
//     factor variant uses s_j unsquared.
//   * rre - ridged ratio argmin.
//   * re  - plain ratio argmin with 0/0 defined as 1.
//   * bic - penalized cumulative log-eigenvalue criterion, argmax.
//   * sequential_test - chi-squared tail tests stepping k upward.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "spectra.hpp"

namespace specdim {

struct RidgeSchedule {
    double c1 = 0.0;
    double c2 = 0.0;
    double tau = 0.5;
};

// Recommended ridges for regression (SDR) spectra at sample size n.
inline RidgeSchedule default_ridges_sdr(long n) {
    if (n < 2) throw degenerate_input_error("default_ridges_sdr: need n >= 2");
    const double r = std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
    return {r / 10.0, r / 5.0, 0.5};
}

// Recommended ridges for factor spectra: driven by m = min(n, p).
inline RidgeSchedule default_ridges_factor(long n, long p) {
    const long m = std::min(n, p);
    if (m < 2) throw degenerate_input_error("default_ridges_factor: need min(n,p) >= 2");
    const double r = std::log(static_cast<double>(m)) / std::sqrt(static_cast<double>(m));
    return {r / 10.0, r / 5.0, 0.5};
}

// Result of one criterion: the selected index plus the full diagnostic
// trace.  For the double-ridge-ratio methods, `shrunk`, `first_round`,
// `second_round` and `qualifying` are populated; for the single-pass
// competitors `first_round` carries the per-index criterion values (ratios,
// scores, or test statistics) and `second_round` is empty except for the
// sequential test, where it carries the critical values.
struct DimensionEstimate {
    int q_hat = 0;
    std::string method;
    bool no_qualifying = false;     // double-ridge-ratio: no index passed tau
    std::vector<double> shrunk;
    std::vector<double> first_round;
    std::vector<double> second_round;
    std::vector<int> qualifying;
};

namespace detail {

inline void check_spectrum(const std::vector<double>& lam) {
    for (std::size_t j = 0; j < lam.size(); ++j) {
        if (!std::isfinite(lam[j]) || lam[j] < 0.0)
            throw estimator_error("spectrum entry " + std::to_string(j + 1) +
                                  " is negative or non-finite");
        if (j > 0 && lam[j] > lam[j - 1])
            throw estimator_error("spectrum is not nonincreasing at entry " +
                                  std::to_string(j + 1));
    }
}

inline DimensionEstimate tdrr_impl(const std::vector<double>& lam,
                                   const RidgeSchedule& sched,
                                   bool squared,
                                   const char* tag) {
    check_spectrum(lam);
    const std::size_t p = lam.size();
    if (p < 3)
        throw dimension_error(std::string(tag) + ": need at least 3 eigenvalues, got " +
                              std::to_string(p));
    if (!(sched.c1 > 0.0) || !(sched.c2 > 0.0) || !(sched.tau > 0.0 && sched.tau < 1.0))
        throw estimator_error(std::string(tag) + ": ridge schedule must have c1 > 0, c2 > 0, tau in (0,1)");

    DimensionEstimate out;
    out.method = tag;
    out.shrunk.resize(p);
    for (std::size_t j = 0; j < p; ++j) out.shrunk[j] = lam[j] / (1.0 + lam[j]);

    out.first_round.resize(p - 1);
    for (std::size_t j = 0; j + 1 < p; ++j) {
        const double a = squared ? out.shrunk[j] * out.shrunk[j] : out.shrunk[j];
        const double b = squared ? out.shrunk[j + 1] * out.shrunk[j + 1] : out.shrunk[j + 1];
        out.first_round[j] = (a + sched.c1) / (b + sched.c1) - 1.0;
    }

    out.second_round.resize(p - 2);
    for (std::size_t j = 0; j + 2 < p; ++j) {
        const double den = out.first_round[j] + sched.c2;
        if (den <= 0.0)
            throw estimator_error(std::string(tag) +
                                  ": internal invariant violated (nonpositive ridged ratio)");
        out.second_round[j] = (out.first_round[j + 1] + sched.c2) / den;
    }

    for (std::size_t j = 0; j + 2 < p; ++j)
        if (out.second_round[j] <= sched.tau)
            out.qualifying.push_back(static_cast<int>(j + 1));

    if (out.qualifying.empty()) {
        out.q_hat = 0;
        out.no_qualifying = true;
    } else {
        out.q_hat = out.qualifying.back();
    }
    return out;
}

} // namespace detail

// Regression (SDR) variant: first round compares squared shrunk eigenvalues.
inline DimensionEstimate tdrr_sdr(const std::vector<double>& lam, const RidgeSchedule& sched) {
    return detail::tdrr_impl(lam, sched, /*squared=*/true, "TDRR");
}
inline DimensionEstimate tdrr_sdr(const EigenSpectrum& spec, const RidgeSchedule& sched) {
    return tdrr_sdr(spec.values, sched);
}

// Factor variant: first round compares unsquared shrunk eigenvalues.
inline DimensionEstimate tdrr_factor(const std::vector<double>& lam, const RidgeSchedule& sched) {
    return detail::tdrr_impl(lam, sched, /*squared=*/false, "TDRR");
}
inline DimensionEstimate tdrr_factor(const EigenSpectrum& spec, const RidgeSchedule& sched) {
    return tdrr_factor(spec.values, sched);
}

// Ridged ratio argmin.  Ties resolve to the smallest index.
inline DimensionEstimate rre(const std::vector<double>& lam, double c) {
    detail::check_spectrum(lam);
    const std::size_t p = lam.size();
    if (p < 2) throw dimension_error("RRE: need at least 2 eigenvalues");
    if (!(c > 0.0)) throw estimator_error("RRE: ridge must be positive");

    DimensionEstimate out;
    out.method = "RRE";
    out.first_round.resize(p - 1);
    std::size_t best = 0;
    for (std::size_t j = 0; j + 1 < p; ++j) {
        out.first_round[j] = (lam[j + 1] + c) / (lam[j] + c);
        if (out.first_round[j] < out.first_round[best]) best = j;
    }
    out.q_hat = static_cast<int>(best + 1);
    return out;
}
inline DimensionEstimate rre(const EigenSpectrum& spec, double c) { return rre(spec.values, c); }

// Plain ratio argmin over 1..d_max with 0/0 taken as 1.  Ties resolve to
// the smallest index.
inline DimensionEstimate re(const std::vector<double>& lam, int d_max) {
    detail::check_spectrum(lam);
    const std::size_t p = lam.size();
    if (d_max < 1) throw estimator_error("RE: d_max must be at least 1");
    if (static_cast<std::size_t>(d_max) > p - 1)
        throw estimator_error("RE: d_max must not exceed p-1");

    DimensionEstimate out;
    out.method = "RE";
    out.first_round.resize(static_cast<std::size_t>(d_max));
    std::size_t best = 0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(d_max); ++j) {
        const double hi = lam[j];
        const double lo = lam[j + 1];
        double r;
        if (hi == 0.0 && lo == 0.0) r = 1.0;                        // 0/0 := 1
        else if (hi == 0.0) r = std::numeric_limits<double>::infinity();
        else r = lo / hi;
        out.first_round[j] = r;
        if (r < out.first_round[best]) best = j;
    }
    out.q_hat = static_cast<int>(best + 1);
    return out;
}
inline DimensionEstimate re(const EigenSpectrum& spec, int d_max) { return re(spec.values, d_max); }

// Penalized cumulative criterion, maximized over 1..p.  Ties resolve to the
// smallest index.  An all-zero spectrum yields q_hat = 1 (penalty-only
// scores still peak at the smallest model).
inline DimensionEstimate bic(const std::vector<double>& lam, long n, double alpha) {
    detail::check_spectrum(lam);
    const std::size_t p = lam.size();
    if (p < 1) throw dimension_error("BIC: empty spectrum");
    if (!(alpha > 0.0)) throw estimator_error("BIC: penalty must be positive");

    DimensionEstimate out;
    out.method = "BIC";
    out.first_round.resize(p);

    double total = 0.0;
    for (double v : lam) total += std::log1p(v) + v;

    double cum = 0.0;
    std::size_t best = 0;
    for (std::size_t j = 0; j < p; ++j) {
        cum += std::log1p(lam[j]) + lam[j];
        const double reward = (total == 0.0)
                                  ? 0.0
                                  : static_cast<double>(n) * cum / (2.0 * total);
        const double jj = static_cast<double>(j + 1);
        out.first_round[j] = reward - alpha * jj * (jj + 1.0) / static_cast<double>(p);
        if (out.first_round[j] > out.first_round[best]) best = j;
    }
    out.q_hat = static_cast<int>(best + 1);
    return out;
}
inline DimensionEstimate bic(const EigenSpectrum& spec, double alpha) {
    return bic(spec.values, spec.n, alpha);
}

// Sequential chi-squared tail test on a sliced-regression spectrum with H
// slices.  Steps k = 0, 1, ... and returns the first k whose scaled tail
// sum falls below the upper-level chi-squared quantile with
// (p-k)(H-k-1) degrees of freedom; returns the current k when the degrees
// of freedom run out, and caps at p-1.
inline DimensionEstimate sequential_test(const std::vector<double>& lam, long n, int H,
                                         double level = 0.05) {
    detail::check_spectrum(lam);
    const std::size_t p = lam.size();
    if (p < 1) throw dimension_error("ST: empty spectrum");
    if (H < 2) throw estimator_error("ST: need at least 2 slices");
    if (!(level > 0.0 && level < 1.0)) throw estimator_error("ST: level must lie in (0,1)");

    DimensionEstimate out;
    out.method = "ST";

    // Suffix sums: tail(k) = sum of lam[k..p-1].
    std::vector<double> tail(p + 1, 0.0);
    for (std::size_t j = p; j > 0; --j) tail[j - 1] = tail[j] + lam[j - 1];

    for (std::size_t k = 0; k + 1 <= p; ++k) {
        const long df = static_cast<long>(p - k) * (static_cast<long>(H) - static_cast<long>(k) - 1);
        if (df <= 0) {
            out.q_hat = static_cast<int>(k);
            return out;
        }
        const double stat = static_cast<double>(n) * tail[k];
        const double crit = chi_squared_quantile(static_cast<double>(df), 1.0 - level);
        out.first_round.push_back(stat);
        out.second_round.push_back(crit);
        if (stat < crit) {
            out.q_hat = static_cast<int>(k);
            return out;
        }
        if (k == p - 1) break;
    }
    out.q_hat = static_cast<int>(p - 1);
    return out;
}
inline DimensionEstimate sequential_test(const EigenSpectrum& spec, int H, double level = 0.05) {
    return sequential_test(spec.values, spec.n, H, level);
}

} // namespace specdim
