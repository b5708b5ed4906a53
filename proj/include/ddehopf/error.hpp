#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ddehopf {

/// 1-based position in model source text. Columns count code points.
struct SourcePos
{
    int line = 0;
    int column = 0;

    [[nodiscard]] bool valid() const noexcept { return line > 0; }
    friend bool operator==(SourcePos const&, SourcePos const&) = default;
};

enum class ErrorKind
{
    Syntax,
    UnknownIdentifier,
    Domain,
    InconsistentLinearization,
    NotAnEquilibrium,
    NoRootInBracket,
    NonConvergence,
    SingularImplicit,
    PreconditionFailed,
    NotOnCurve,
    SingularParametrization,
    SingularCurvature,
    SingularDenominator,
    NonDegeneracyViolated,
    LeftDomain,
    DegenerateBeyondScope,
    EmptyResult,
    BlowUp,
    Unclassifiable,
    InvalidModel,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, std::string const& message, SourcePos pos = {});

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] SourcePos pos() const noexcept { return pos_; }

    /// Residual or offending value attached by numerical routines, if any.
    [[nodiscard]] std::optional<double> value() const noexcept { return value_; }
    Error& with_value(double v) noexcept
    {
        value_ = v;
        return *this;
    }

private:
    ErrorKind kind_;
    SourcePos pos_;
    std::optional<double> value_;
};

} // namespace ddehopf
