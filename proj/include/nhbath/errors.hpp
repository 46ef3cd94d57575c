// errors.hpp — error codes shared by every nhbath module

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhbath {

enum class ErrorCode {
    InvalidParams,
    BranchCutEvaluation,
    PoleEvaluation,
    DetuningSingularity,
    NearDegenerate,
    DetunedCriticality,
    PoleOnPath,
    TimeTooSmall,
    ReflectionRisk,
    ToleranceNotMet,
    DimensionTooLarge,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::BranchCutEvaluation: return "BranchCutEvaluation";
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::DetuningSingularity: return "DetuningSingularity";
    case ErrorCode::NearDegenerate: return "NearDegenerate";
    case ErrorCode::DetunedCriticality: return "DetunedCriticality";
    case ErrorCode::PoleOnPath: return "PoleOnPath";
    case ErrorCode::TimeTooSmall: return "TimeTooSmall";
    case ErrorCode::ReflectionRisk: return "ReflectionRisk";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    }
    return "Unknown";
}

// Precondition failures (bad input) as opposed to numerical breakdowns.
constexpr bool is_validation_error(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParams:
    case ErrorCode::DetunedCriticality:
    case ErrorCode::TimeTooSmall:
    case ErrorCode::ReflectionRisk:
    case ErrorCode::DimensionTooLarge:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace nhbath
