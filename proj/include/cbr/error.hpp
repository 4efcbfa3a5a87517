#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbr {

/// Argument outside a function's mathematical domain (e.g. a probability not in (0,1)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Vector/matrix dimensions disagree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rejected configuration or dataset content.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite value produced or consumed during training.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (e.g. same-class instance in an opposite buffer).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Cross-validation could not form usable folds.
class TuningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace cbr
