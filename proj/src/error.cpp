#include "nqpt/error.hpp"

namespace nqpt {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonPositiveRadicand: return "NonPositiveRadicand";
    case ErrorKind::NoSecondaryMinimum: return "NoSecondaryMinimum";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::UnstableDrift: return "UnstableDrift";
    case ErrorKind::ComplexRoot: return "ComplexRoot";
    case ErrorKind::FitFailed: return "FitFailed";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::MissingRequired: return "MissingRequired";
    }
    return "Error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

} // namespace nqpt
