#pragma once

#include <stdexcept>
#include <string>

namespace palab {

// Malformed parent arrays, edge lists that are not trees, log/snapshot
// length mismatches.
struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Misuse of a mutable structure (duplicate insert, unknown node, empty sampler).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The certificate cannot bound the tail of rho at the requested lambda.
struct DivergenceError : NumericError {
    using NumericError::NumericError;
};

// Series truncation needed more terms than the configured cap.
struct HorizonError : NumericError {
    using NumericError::NumericError;
};

// No root of rho(lambda) = 1 could be bracketed.
struct NoMalthusianError : NumericError {
    using NumericError::NumericError;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NormalizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace palab
