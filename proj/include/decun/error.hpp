#pragma once

#include <stdexcept>
#include <string>

namespace decun {

/// Grid/kernel size mismatches and empty shapes.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Out-of-range scalar arguments (negative sigma, bad schedule constants, ...).
class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// Ill-posedness, degenerate denominators, divergence diagnostics.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable/unwritable files.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unsupported file contents (bad magic, version mismatch, truncation).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace decun
