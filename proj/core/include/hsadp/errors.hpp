#pragma once

#include <stdexcept>
#include <string>

namespace hsadp {

/// Bad caller input: malformed series, invalid hyperparameters, out-of-range arguments.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Training data cannot support the requested model (e.g. no durations to bin).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant was broken, e.g. a decision that leaves the battery grid.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Artifact could not be read back: schema mismatch, checksum mismatch, truncated blob.
class PersistenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver refused to run, e.g. state space over the configured budget.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hsadp
