// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcising {

enum class ErrorCode {
    InvalidArgument,
    EmptySector,
    BeyondCapacity,
    SectorMismatch,
    BadParity,
    DivZero,
    NoConvergence,
    StepFailure,
    DimTooLarge,
    BandFloorExceeded,
    ResonantDenominator,
    EmptyAcceptance,
    ConfigError,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::EmptySector: return "EMPTY_SECTOR";
        case ErrorCode::BeyondCapacity: return "BEYOND_CAPACITY";
        case ErrorCode::SectorMismatch: return "SECTOR_MISMATCH";
        case ErrorCode::BadParity: return "BAD_PARITY";
        case ErrorCode::DivZero: return "DIV_ZERO";
        case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
        case ErrorCode::StepFailure: return "STEP_FAILURE";
        case ErrorCode::DimTooLarge: return "DIM_TOO_LARGE";
        case ErrorCode::BandFloorExceeded: return "BAND_FLOOR_EXCEEDED";
        case ErrorCode::ResonantDenominator: return "RESONANT_DENOMINATOR";
        case ErrorCode::EmptyAcceptance: return "EMPTY_ACCEPTANCE";
        case ErrorCode::ConfigError: return "CONFIG_ERROR";
    }
    return "UNKNOWN";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    /// Numerical failures map to exit code 3 in the CLI, everything else to 2.
    [[nodiscard]] bool is_numerical() const noexcept {
        return code_ == ErrorCode::NoConvergence || code_ == ErrorCode::StepFailure ||
               code_ == ErrorCode::BandFloorExceeded || code_ == ErrorCode::DimTooLarge;
    }

private:
    ErrorCode code_;
};

#define TCISING_REQUIRE(cond, code, msg)                 \
    do {                                                 \
        if (!(cond)) throw ::tcising::Error((code), (msg)); \
    } while (0)

}  // namespace tcising
