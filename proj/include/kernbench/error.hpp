#pragma once

#include <stdexcept>
#include <string>

namespace kernbench {

enum class ErrorCode {
    UnknownKernel,
    IllegalArgument,
    ShapeMismatch,
    NumericalFailure,
    Syntax,
    UnboundVariable,
    InexactDivision,
    AllocationMissing,
    CapacityOverflow,
    ArenaExhausted,
    NestingViolation,
    MalformedLine,
    LineCountMismatch,
    UndefinedMetric,
    EmptyStatistic,
    InvalidExperiment,
    SamplerMissing,
    SamplerFailed,
    Io,
};

const char* to_string(ErrorCode code);

/// Single exception type for the whole library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kernbench
