#pragma once

#include <stdexcept>
#include <string>

namespace qstab {

/// Invalid argument: dimension mismatch, bad norm parameter, rs = 0, ...
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No pair satisfies the restricted-domain constraint ||x|| + ||y|| >= d.
class InfeasibleDomainError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// 0 raised to a negative exponent.
class UndefinedValueError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The direct-method iteration hit a non-finite value or a tabulated map.
class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qstab
