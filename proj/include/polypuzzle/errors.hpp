#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polypuzzle {

// Base for all library failures that are reportable to a caller.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by the polynomial literal and config parsers; `position` is the
// zero-based offset of the offending character in the input.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Graph or piece construction failed for a structural reason
// (disconnected Julia set, no cut point, unsupported internal graph, ...).
class BuildError : public Error {
public:
    using Error::Error;
};

// A numeric procedure could not certify its result (root finder stalled,
// quadrature residual too large, ray Newton divergence without fallback).
class NumericError : public Error {
public:
    using Error::Error;
};

// Run configuration is invalid (bad JSON, box not containing the required
// disk, malformed flag values).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace polypuzzle
