#pragma once

#include "kernbench/experiment.hpp"
#include "kernbench/signature.hpp"

#include <string>
#include <vector>

namespace kernbench {

/// A symbolic call evaluated at one point of the iteration space.
struct EvaluatedCall {
    const Signature* signature = nullptr;
    CallBindings bindings;
    /// Concrete sampler token per argument; data arguments hold the operand name.
    std::vector<std::string> tokens;
};

/// Throws Error{UnknownKernel | IllegalArgument | Syntax | UnboundVariable | InexactDivision}.
EvaluatedCall evaluate_call(const CallSpec& call, const Bindings& point);

bool is_identifier(std::string_view s);

}  // namespace kernbench
