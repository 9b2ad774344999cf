#ifndef FDMLENS_ERRORS_HPP
#define FDMLENS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdmlens {

/// Root of the project exception hierarchy. The three direct branches map
/// onto the CLI exit-code contract: DataError -> 2, ConfigError -> 3,
/// InvariantError -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised when an internal self-check fails; never expected on valid builds.
class InvariantError : public Error {
public:
    using Error::Error;
};

// -- dataset ---------------------------------------------------------------

class MissingColumn : public DataError {
public:
    explicit MissingColumn(std::string column)
        : DataError("missing column: " + column), column_(std::move(column)) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class NonNumericCell : public DataError {
public:
    NonNumericCell(std::size_t row, std::string column, std::string cell)
        : DataError("non-numeric cell \"" + cell + "\" at data row " +
                    std::to_string(row) + ", column " + column),
          row_(row), column_(std::move(column)) {}
    std::size_t row() const { return row_; }  // 1-based data row, header excluded
    const std::string& column() const { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class BoundsViolation : public DataError {
public:
    BoundsViolation(std::size_t row, std::string column, double value, double lo, double hi)
        : DataError("value " + std::to_string(value) + " at data row " +
                    std::to_string(row) + ", column " + column +
                    " outside schema bounds [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]"),
          row_(row), column_(std::move(column)), value_(value) {}
    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }
    double value() const { return value_; }

private:
    std::size_t row_;
    std::string column_;
    double value_;
};

class EmptyData : public DataError {
public:
    EmptyData() : DataError("no data rows") {}
};

// -- models ----------------------------------------------------------------

class InvalidHyperparam : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SingularDesign : public DataError {
public:
    using DataError::DataError;
};

// -- shapley ---------------------------------------------------------------

class DegenerateSystem : public InvariantError {
public:
    using InvariantError::InvariantError;
};

// -- pdp -------------------------------------------------------------------

class InvalidGrid : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ExplanationMismatch : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// -- plots -----------------------------------------------------------------

class IndexOutOfRange : public ConfigError {
public:
    using ConfigError::ConfigError;
};

} // namespace fdmlens

#endif
