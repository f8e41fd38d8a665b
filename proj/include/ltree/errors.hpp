#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltree {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition of an operation (bad sizes, duplicate ids, k > n, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent input data (CSV rows, model files, Newick text).
class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : DataError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// A decomposition did not converge or the input was not finite.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace ltree
