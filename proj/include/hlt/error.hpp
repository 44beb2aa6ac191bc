// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hlt {

enum class ErrorCode {
    NotEnoughPrimes,
    NoInverse,
    DomainMismatch,
    ModulusMismatch,
    BasisOverlap,
    BasisMismatch,
    SingleLimb,
    Overflow,
    LevelMismatch,
    DigitCountMismatch,
    MissingKey,
    DimensionTooLarge,
    PlanMismatch,
    BadFactors,
    ConfigOutOfRange,
    Infeasible,
    OnchipOverflow,
    InvalidArgument,
    Format,
};

const char *to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char *to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotEnoughPrimes: return "NotEnoughPrimes";
    case ErrorCode::NoInverse: return "NoInverse";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::BasisOverlap: return "BasisOverlap";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::SingleLimb: return "SingleLimb";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::DigitCountMismatch: return "DigitCountMismatch";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::PlanMismatch: return "PlanMismatch";
    case ErrorCode::BadFactors: return "BadFactors";
    case ErrorCode::ConfigOutOfRange: return "ConfigOutOfRange";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::OnchipOverflow: return "OnchipOverflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Format: return "Format";
    }
    return "Unknown";
}

} // namespace hlt
