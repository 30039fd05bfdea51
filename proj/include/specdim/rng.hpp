#pragma once

// Deterministic random-number machinery.
//
// Every stochastic component in the library draws from a std::mt19937_64
// engine (its output sequence for a given seed is pinned by the C++
// standard) through inversion-based samplers whose arithmetic is written
// out below.  Nothing uses std::normal_distribution or friends: their
// algorithms are implementation-defined, which would break bit-for-bit
// reproducibility across standard libraries.
//
// Stream discipline: each (base seed, replication, role) triple owns a
// disjoint engine whose seed is derived by chained 64-bit finalizer
// hashing.  Changing the draw count of one role never perturbs another
// (e.g. noise draws never shift covariate draws).

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "errors.hpp"

namespace specdim {

// ---------------------------------------------------------------------------
// Seed derivation.

// splitmix64 finalizer: a bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Named sub-stream roles.  Numeric values are part of the determinism
// contract: changing them changes every simulated dataset.
enum class stream_role : std::uint64_t {
    covariates = 1,    // X draws in regression designs
    noise = 2,         // additive regression errors
    loadings = 3,      // factor-model loading matrix
    factors = 4,       // factor-model common factors (and their t mixing draws)
    idiosyncratic = 5, // factor-model idiosyncratic errors
    generic = 6,       // synthetic spectra and other test utilities
};

// Derived engine seed for one (base, replication, role) stream.
constexpr std::uint64_t stream_seed(std::uint64_t base,
                                    std::uint64_t replication,
                                    stream_role role) noexcept {
    std::uint64_t h = mix64(base);
    h = mix64(h ^ replication);
    h = mix64(h ^ (static_cast<std::uint64_t>(role) * 0x9E3779B97F4A7C15ULL));
    return h;
}

// ---------------------------------------------------------------------------
// Standard normal quantile function (double precision rational
// approximation, accurate to ~1e-16 relative error in the bulk).

inline double normal_icdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw estimator_error("normal_icdf: argument must lie strictly in (0,1)");

    static constexpr double A[8] = {
        3.3871328727963666080e0,  1.3314166789178437745e2,
        1.9715909503065514427e3,  1.3731693765509461125e4,
        4.5921953931549871457e4,  6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static constexpr double B[8] = {
        1.0,                      4.2313330701600911252e1,
        6.8718700749205790830e2,  5.3941960214247511077e3,
        2.1213794301586595867e4,  3.9307895800092710610e4,
        2.8729085735721942674e4,  5.2264952788528545610e3};
    static constexpr double C[8] = {
        1.42343711074968357734e0, 4.63033784615654529590e0,
        5.76949722146069140550e0, 3.64784832476320460504e0,
        1.27045825245236838258e0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double D[8] = {
        1.0,                      2.05319162663775882187e0,
        1.67638483018380384940e0, 6.89767334985100004550e-1,
        1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static constexpr double E[8] = {
        6.65790464350110377720e0, 5.46378491116411436990e0,
        1.78482653991729133580e0, 2.96560571828504891230e-1,
        2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double F[8] = {
        1.0,                      5.99832206555887937690e-1,
        1.36929880922735805310e-1, 1.48753612908506148525e-2,
        7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    auto poly = [](const double (&c)[8], double r) {
        return c[0] + r * (c[1] + r * (c[2] + r * (c[3] + r * (c[4] + r * (c[5] + r * (c[6] + r * c[7]))))));
    };

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(A, r) / poly(B, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = poly(C, r) / poly(D, r);
    } else {
        r -= 5.0;
        x = poly(E, r) / poly(F, r);
    }
    return (q < 0.0) ? -x : x;
}

// Standard normal CDF (for round-trip checks and diagnostics).
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

// Quantile of the chi-squared distribution with (possibly fractional)
// degrees of freedom.
inline double chi_squared_quantile(double df, double p) {
    if (!(df > 0.0)) throw estimator_error("chi_squared_quantile: df must be positive");
    boost::math::chi_squared_distribution<double> dist(df);
    return boost::math::quantile(dist, p);
}

// Quantile of Student's t distribution with fractional degrees of freedom.
inline double student_t_quantile(double nu, double p) {
    if (!(nu > 0.0)) throw estimator_error("student_t_quantile: nu must be positive");
    boost::math::students_t_distribution<double> dist(nu);
    return boost::math::quantile(dist, p);
}

// ---------------------------------------------------------------------------
// Stream: one seeded engine plus the inversion samplers.

class Stream {
public:
    explicit Stream(std::uint64_t engine_seed) : engine_(engine_seed) {}

    Stream(std::uint64_t base, std::uint64_t replication, stream_role role)
        : engine_(stream_seed(base, replication, role)) {}

    // Uniform on [0, 1): top 53 bits of the engine output.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on the open interval (0, 1): the half-offset keeps inversion
    // samplers away from both endpoints without rejection loops.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_icdf(uniform_open()); }

    double student_t(double nu) { return student_t_quantile(nu, uniform_open()); }

    double chi_squared(double df) { return chi_squared_quantile(df, uniform_open()); }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace specdim
