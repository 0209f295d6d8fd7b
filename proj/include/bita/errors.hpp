#pragma once

#include <stdexcept>
#include <string>

namespace bita {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes,
// tests assert on the concrete type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape / extent mismatch; message names both shapes.
struct DimError : Error {
    using Error::Error;
};

// Math domain violation (log of non-positive value, ...).
struct DomainError : Error {
    using Error::Error;
};

// Precondition of an operation violated by the caller.
struct ContractError : Error {
    using Error::Error;
};

// Temporal ordering violated (out-of-order batch, embedding in the past).
struct CausalityError : Error {
    using Error::Error;
};

// Invalid configuration; detected at construction, never mid-stream.
struct ConfigError : Error {
    using Error::Error;
};

// Metric preconditions violated (empty positive/negative side, ...).
struct MetricError : Error {
    using Error::Error;
};

// File parsing / serialization failures.
struct IoError : Error {
    using Error::Error;
};

// Training diverged (non-finite loss); carries a diagnostic dump.
struct TrainingError : Error {
    using Error::Error;
};

}  // namespace bita
