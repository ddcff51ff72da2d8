#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fswitch {

// Malformed or inconsistent input (bad JSON, wrong list lengths, unknown keys).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The configuration is valid but not of the shape an analytic routine handles.
class UnsupportedConfiguration : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite amplitudes, unitarity loss and similar integration failures.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, std::ptrdiff_t step = -1)
        : std::runtime_error(what), step_(step) {}

    std::ptrdiff_t step() const noexcept { return step_; }

private:
    std::ptrdiff_t step_;
};

// A bond's correlation maximum sits on the last grid point, so the front
// has not been resolved inside the simulated window.
class FrontNotCaptured : public std::runtime_error {
public:
    FrontNotCaptured(const std::string& what, int bond)
        : std::runtime_error(what), bond_(bond) {}

    int bond() const noexcept { return bond_; }

private:
    int bond_;
};

}  // namespace fswitch
