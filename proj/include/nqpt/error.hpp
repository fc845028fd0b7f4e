#pragma once

#include <stdexcept>
#include <string>

namespace nqpt {

enum class ErrorKind {
    Domain,
    NoBracket,
    NoRoot,
    NoConvergence,
    NonPositiveRadicand,
    NoSecondaryMinimum,
    ModeMismatch,
    StepTooLarge,
    UnstableDrift,
    ComplexRoot,
    FitFailed,
    GridTooCoarse,
    Parse,
    UnknownKey,
    MissingRequired,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit codes) can tell them apart without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace nqpt
