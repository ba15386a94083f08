#pragma once

#include <stdexcept>
#include <string>

namespace mdb {

/// Input value lies outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Bad argument to a constructor or calculator.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A call sequence contract was broken (e.g. feedback without advance).
/// Always indicates a driver bug, never bad user data.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A preference matrix failed validation.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Experiment configuration is inconsistent or malformed.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Instance has a zero gap where a bound needs a strictly positive one.
class DegenerateInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mdb
