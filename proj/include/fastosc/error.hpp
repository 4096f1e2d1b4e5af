#pragma once

#include <stdexcept>
#include <string>

namespace fastosc {

/// Raised when an operation's precondition on its inputs is violated.
class InputError : public std::invalid_argument {
public:
    explicit InputError(std::string const& what) : std::invalid_argument(what) {}
};

/// Raised when a numerical procedure cannot meet its resolution or stability budget.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(std::string const& what) : std::runtime_error(what) {}
};

} // namespace fastosc
