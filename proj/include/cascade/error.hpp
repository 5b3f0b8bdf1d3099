#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cascade {

enum class ErrorCode {
    NonPositiveRate,
    LengthMismatch,
    InvalidInput,
    PoleEvaluation,
    InfiniteGain,
    UnstableFeedback,
    UnboundedNorm,
    PureIntegrator,
    IndexOutOfRange,
    DomainError,
    DegenerateSignal,
    StepTooLarge,
    TailNotDecayed,
    NoConvergence,
    ParseError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this type. `field` and
// `index` are filled for validation errors (index is 1-based, 0 = scalar).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string field = {}, std::size_t index = 0)
        : std::runtime_error(message), code_(code), field_(std::move(field)), index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }
    std::size_t index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::string field_;
    std::size_t index_;
};

}  // namespace cascade
