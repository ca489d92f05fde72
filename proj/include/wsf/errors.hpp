#pragma once

#include <stdexcept>
#include <string>

namespace wsf {

// Bad or unreadable input data (files, short signals, degenerate matrices).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (solver breakdown, non-finite intermediate values).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wsf
