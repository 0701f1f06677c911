#pragma once

#include <stdexcept>
#include <string>

namespace mqspin {

/// Bad input: sizes, ranges, malformed files. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical invariant (hermiticity, trace, purity, convergence) was broken.
/// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mqspin
