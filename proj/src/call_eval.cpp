#include "kernbench/call_eval.hpp"

#include "kernbench/error.hpp"
#include "kernbench/kernels.hpp"

#include <cctype>
#include <charconv>

namespace kernbench {

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

EvaluatedCall evaluate_call(const CallSpec& call, const Bindings& point) {
    const Signature& sig = lookup_signature(call.kernel);
    if (call.args.size() != sig.args.size())
        throw Error(ErrorCode::IllegalArgument, call.kernel + ": expected " + std::to_string(sig.args.size()) +
                                                    " arguments, got " + std::to_string(call.args.size()));
    EvaluatedCall out;
    out.signature = &sig;
    out.tokens.reserve(sig.args.size());
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
        const ArgSpec& spec = sig.args[i];
        const std::string& tok = call.args[i];
        if (std::holds_alternative<FlagArg>(spec.kind)) {
            if (tok.size() != 1)
                throw Error(ErrorCode::IllegalArgument,
                            call.kernel + ": flag " + spec.name + " must be one character, got '" + tok + "'");
            out.bindings.flags[spec.name] = tok[0];
            out.tokens.push_back(tok);
        } else if (std::holds_alternative<DimArg>(spec.kind) || std::holds_alternative<LdArg>(spec.kind)) {
            std::int64_t v = Expression::parse(tok).eval(point);
            out.bindings.dims[spec.name] = v;
            out.tokens.push_back(std::to_string(v));
        } else if (std::holds_alternative<ScalarArg>(spec.kind)) {
            double v = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw Error(ErrorCode::IllegalArgument,
                            call.kernel + ": scalar " + spec.name + " is not a number: '" + tok + "'");
            out.tokens.push_back(tok);
        } else if (spec.is_data()) {
            if (!is_identifier(tok))
                throw Error(ErrorCode::IllegalArgument,
                            call.kernel + ": operand " + spec.name + " must name a variable, got '" + tok + "'");
            out.tokens.push_back(tok);
        } else {
            out.tokens.push_back(tok);
        }
    }
    return out;
}

}  // namespace kernbench
