#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

enum class ErrorCode {
    ConstructionError,
    UnknownVertex,
    SelfLoop,
    SingletonHyperedge,
    BoundaryAlreadyPresent,
    DirichletOperand,
    NonPositiveEpsilon,
    NonPositiveT,
    NonPositiveAlpha,
    DimensionMismatch,
    InfiniteEnergy,
    DomainBoundary,
    ZeroLinear,
    TooLarge,
    MixedExponents,
    ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConstructionError: return "ConstructionError";
        case ErrorCode::UnknownVertex: return "UnknownVertex";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::SingletonHyperedge: return "SingletonHyperedge";
        case ErrorCode::BoundaryAlreadyPresent: return "BoundaryAlreadyPresent";
        case ErrorCode::DirichletOperand: return "DirichletOperand";
        case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
        case ErrorCode::NonPositiveT: return "NonPositiveT";
        case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InfiniteEnergy: return "InfiniteEnergy";
        case ErrorCode::DomainBoundary: return "DomainBoundary";
        case ErrorCode::ZeroLinear: return "ZeroLinear";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::MixedExponents: return "MixedExponents";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace reslab
