#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roaree {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite or out-of-domain numeric input.
class DomainError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// A required CSV column is missing. `column()` names it.
class SchemaError : public Error {
public:
    explicit SchemaError(std::string column)
        : Error("missing column: " + column), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

/// A data row could not be parsed. Line numbers are 1-based and count the header.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class OrderingError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Parameters became non-finite. `index()` is the zero-based step (one step per epoch in training).
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t index, const std::string& what)
        : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace roaree
