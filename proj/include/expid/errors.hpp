#pragma once

#include <stdexcept>
#include <string>

namespace expid {

struct ZeroInverse : std::domain_error {
    explicit ZeroInverse(const std::string& msg) : std::domain_error(msg) {}
};

struct SearchExhausted : std::runtime_error {
    explicit SearchExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

struct PreconditionViolation : std::invalid_argument {
    explicit PreconditionViolation(const std::string& msg) : std::invalid_argument(msg) {}
};

struct VarCountMismatch : std::invalid_argument {
    explicit VarCountMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

struct ArityMismatch : std::invalid_argument {
    explicit ArityMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

// Some exponent denominator is the zero polynomial, so the expression is
// undefined everywhere.
struct EmptyDomainError : std::domain_error {
    explicit EmptyDomainError(const std::string& msg) : std::domain_error(msg) {}
};

struct SpaceTooLarge : std::invalid_argument {
    explicit SpaceTooLarge(const std::string& msg) : std::invalid_argument(msg) {}
};

struct InvalidDims : std::invalid_argument {
    explicit InvalidDims(const std::string& msg) : std::invalid_argument(msg) {}
};

struct PolyParseError : std::runtime_error {
    explicit PolyParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CircuitParseError : std::runtime_error {
    explicit CircuitParseError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace expid
