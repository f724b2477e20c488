#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robustad {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (matrix dims, layer sizes, vector lengths).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition (stale cache, bad config value).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation (empty data, k > n).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Operation invoked on an object in the wrong lifecycle state (e.g. unfitted).
class StateError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& what) : Error(what) {}
    DivergenceError(const std::string& what, std::size_t epoch)
        : Error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

    /// Epoch index at which training diverged; 0 when raised outside a training loop.
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_ = 0;
};

/// DUAD cluster selection left no rows to train on.
class SelectionError : public Error {
public:
    using Error::Error;
};

/// CSV / schema / cache ingestion failure. Row index is 1-based over data rows, 0 when not row-specific.
class IngestionError : public Error {
public:
    IngestionError(const std::string& what, std::size_t row = 0)
        : Error(row == 0 ? what : what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// A cell could not be parsed as the type its column declares.
class ParseError : public IngestionError {
public:
    using IngestionError::IngestionError;
};

/// A label cell maps to neither the attack nor the benign set.
class LabelingError : public IngestionError {
public:
    using IngestionError::IngestionError;
};

/// Dataset cannot be split (one class empty).
class SplitError : public Error {
public:
    using Error::Error;
};

/// Contamination pool too small for the requested ratio.
class InsufficientPoolError : public Error {
public:
    InsufficientPoolError(std::size_t required, std::size_t available)
        : Error("contamination pool holds " + std::to_string(available) + " rows but " +
                std::to_string(required) + " are required"),
          required_(required), available_(available) {}

    std::size_t required() const noexcept { return required_; }
    std::size_t available() const noexcept { return available_; }

private:
    std::size_t required_;
    std::size_t available_;
};

/// Threshold estimation impossible (no positives).
class ThresholdError : public Error {
public:
    using Error::Error;
};

}  // namespace robustad
