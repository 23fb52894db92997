#include "kernbench/error.hpp"

namespace kernbench {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownKernel: return "unknown-kernel";
        case ErrorCode::IllegalArgument: return "illegal-argument";
        case ErrorCode::ShapeMismatch: return "shape-mismatch";
        case ErrorCode::NumericalFailure: return "numerical-failure";
        case ErrorCode::Syntax: return "syntax";
        case ErrorCode::UnboundVariable: return "unbound-variable";
        case ErrorCode::InexactDivision: return "inexact-division";
        case ErrorCode::AllocationMissing: return "allocation-missing";
        case ErrorCode::CapacityOverflow: return "capacity-overflow";
        case ErrorCode::ArenaExhausted: return "arena-exhausted";
        case ErrorCode::NestingViolation: return "nesting-violation";
        case ErrorCode::MalformedLine: return "malformed-line";
        case ErrorCode::LineCountMismatch: return "line-count-mismatch";
        case ErrorCode::UndefinedMetric: return "undefined-metric";
        case ErrorCode::EmptyStatistic: return "empty-after-discard";
        case ErrorCode::InvalidExperiment: return "invalid-experiment";
        case ErrorCode::SamplerMissing: return "sampler-executable-missing";
        case ErrorCode::SamplerFailed: return "sampler-failed";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace kernbench
