#pragma once

#include <stdexcept>
#include <string>

namespace specdim {

// Problems with user-supplied inputs: files, CSV cells, configuration keys,
// malformed flags.  The CLI maps these to exit code 2.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problems raised by the estimators themselves: violated preconditions,
// numerically impossible states.  The CLI maps these to exit code 3.
class estimator_error : public std::runtime_error {
public:
    explicit estimator_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Fewer observations than the operation can work with (e.g. covariance of a
// single row).
class degenerate_input_error : public estimator_error {
public:
    explicit degenerate_input_error(const std::string& msg) : estimator_error(msg) {}
};

// Ambient dimension too small for the requested criterion.
class dimension_error : public estimator_error {
public:
    explicit dimension_error(const std::string& msg) : estimator_error(msg) {}
};

// A matrix that must be positive semi-definite has a clearly negative
// eigenvalue; signals a broken upstream estimate.
class not_psd_error : public estimator_error {
public:
    explicit not_psd_error(const std::string& msg) : estimator_error(msg) {}
};

// Slice plan cannot be built (too many slices for the sample size).
class slicing_error : public estimator_error {
public:
    explicit slicing_error(const std::string& msg) : estimator_error(msg) {}
};

} // namespace specdim
