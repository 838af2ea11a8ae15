#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace formal {

/// Domain error codes. The enumerator names are part of the CLI contract:
/// they are printed verbatim on the diagnostic line.
enum class Errc {
    DimensionMismatch,
    DegreeOverflow,
    TruncMismatch,
    BadIndex,
    NonzeroConstantTerm,
    NotAUnit,
    NotDivisible,
    ZeroDivisor,
    UnsupportedDimension,
    NonSingularityViolated,
    ZeroWithinReliable,
    SingularLinearPart,
    NotPeriodic,
    ZeroPair,
    EmptyFiber,
    NotCoprime,
    IrrationalSpectrum,
    NotDiagonal,
    NotSemisimple,
    NotHomogeneous,
    DegreeBoundTooSmall,
    ResonantSpectrum,
    NotClosed,
    DependentGenerators,
    NotRank1,
    GcdUnsupported,
    StarConditionFails,
    NotInvariant,
    Unclassifiable,
    NotAbelian,
    NotRank2,
    NilpotentPencil,
    TopDegree,
    DegreeZero,
    NotSimplePole,
    NonCoprimeFactors,
    ZeroDirection,
    DegenerateLinearPart,
    ParseError,
};

inline constexpr std::string_view errc_name(Errc e) noexcept
{
    switch (e) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegreeOverflow: return "DegreeOverflow";
    case Errc::TruncMismatch: return "TruncMismatch";
    case Errc::BadIndex: return "BadIndex";
    case Errc::NonzeroConstantTerm: return "NonzeroConstantTerm";
    case Errc::NotAUnit: return "NotAUnit";
    case Errc::NotDivisible: return "NotDivisible";
    case Errc::ZeroDivisor: return "ZeroDivisor";
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::NonSingularityViolated: return "NonSingularityViolated";
    case Errc::ZeroWithinReliable: return "ZeroWithinReliable";
    case Errc::SingularLinearPart: return "SingularLinearPart";
    case Errc::NotPeriodic: return "NotPeriodic";
    case Errc::ZeroPair: return "ZeroPair";
    case Errc::EmptyFiber: return "EmptyFiber";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::IrrationalSpectrum: return "IrrationalSpectrum";
    case Errc::NotDiagonal: return "NotDiagonal";
    case Errc::NotSemisimple: return "NotSemisimple";
    case Errc::NotHomogeneous: return "NotHomogeneous";
    case Errc::DegreeBoundTooSmall: return "DegreeBoundTooSmall";
    case Errc::ResonantSpectrum: return "ResonantSpectrum";
    case Errc::NotClosed: return "NotClosed";
    case Errc::DependentGenerators: return "DependentGenerators";
    case Errc::NotRank1: return "NotRank1";
    case Errc::GcdUnsupported: return "GcdUnsupported";
    case Errc::StarConditionFails: return "StarConditionFails";
    case Errc::NotInvariant: return "NotInvariant";
    case Errc::Unclassifiable: return "Unclassifiable";
    case Errc::NotAbelian: return "NotAbelian";
    case Errc::NotRank2: return "NotRank2";
    case Errc::NilpotentPencil: return "NilpotentPencil";
    case Errc::TopDegree: return "TopDegree";
    case Errc::DegreeZero: return "DegreeZero";
    case Errc::NotSimplePole: return "NotSimplePole";
    case Errc::NonCoprimeFactors: return "NonCoprimeFactors";
    case Errc::ZeroDirection: return "ZeroDirection";
    case Errc::DegenerateLinearPart: return "DegenerateLinearPart";
    case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + (detail.empty() ? "" : ": " + detail)), code_(code)
    {}
    explicit Error(Errc code) : Error(code, {}) {}

    Errc code() const noexcept { return code_; }
    std::string_view name() const noexcept { return errc_name(code_); }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail = {}) { throw Error(code, detail); }

inline void require(bool cond, Errc code, const std::string& detail = {})
{
    if (!cond) fail(code, detail);
}

} // namespace formal
