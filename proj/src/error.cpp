#include "ddehopf/error.hpp"

namespace ddehopf {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind)
    {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::InconsistentLinearization: return "InconsistentLinearization";
    case ErrorKind::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorKind::NoRootInBracket: return "NoRootInBracket";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularImplicit: return "SingularImplicit";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::NotOnCurve: return "NotOnCurve";
    case ErrorKind::SingularParametrization: return "SingularParametrization";
    case ErrorKind::SingularCurvature: return "SingularCurvature";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::NonDegeneracyViolated: return "NonDegeneracyViolated";
    case ErrorKind::LeftDomain: return "LeftDomain";
    case ErrorKind::DegenerateBeyondScope: return "DegenerateBeyondScope";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::Unclassifiable: return "Unclassifiable";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

namespace {

std::string decorate(ErrorKind kind, std::string const& message, SourcePos pos)
{
    std::string out{to_string(kind)};
    if (pos.valid())
        out += " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
    out += ": ";
    out += message;
    return out;
}

} // namespace

Error::Error(ErrorKind kind, std::string const& message, SourcePos pos)
    : std::runtime_error(decorate(kind, message, pos)), kind_(kind), pos_(pos)
{}

} // namespace ddehopf
