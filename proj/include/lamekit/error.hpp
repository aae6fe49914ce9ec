#pragma once

#include <stdexcept>
#include <string>

namespace lamekit {

/// Malformed or out-of-contract input (non-finite values, bad shapes, wrong grid).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter outside its mathematical domain (e.g. Poisson ratio >= 0.5).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed: CFL violation, solver non-convergence,
/// unsolvable Poisson data.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration file problems. Always carries the offending key or file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lamekit
