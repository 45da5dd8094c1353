#pragma once

#include <stdexcept>
#include <string>

namespace tas {

/// Argument vectors with incompatible lengths.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a model function (e.g. a nonpositive temperature).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Wavelength or pixel index out of range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Every reference-line coefficient fell below the clamp floor, so the
/// coefficient ratios driving the temperature sweep are undefined.
class UnsolvableReferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration rejected at construction or parse time.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tas
