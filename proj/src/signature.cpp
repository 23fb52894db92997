#include "kernbench/signature.hpp"

#include "kernbench/error.hpp"

#include <algorithm>

namespace kernbench {

const char* to_string(Dtype d) { return d == Dtype::Single ? "single" : "double"; }

const char* to_string(Structure s) {
    switch (s) {
        case Structure::General: return "general";
        case Structure::Lower: return "lower";
        case Structure::Upper: return "upper";
        case Structure::SymmetricPd: return "symmetric-pd";
    }
    return "general";
}

std::size_t element_size(Dtype d) { return d == Dtype::Single ? sizeof(float) : sizeof(double); }

std::optional<Dtype> dtype_from_prefix(char c) {
    if (c == 's') return Dtype::Single;
    if (c == 'd') return Dtype::Double;
    return std::nullopt;
}

const char* kind_name(const ArgKind& k) {
    struct V {
        const char* operator()(const FlagArg&) const { return "flag"; }
        const char* operator()(const DimArg&) const { return "dim"; }
        const char* operator()(const ScalarArg&) const { return "scalar"; }
        const char* operator()(const LdArg&) const { return "ld"; }
        const char* operator()(const DataArg&) const { return "data"; }
        const char* operator()(const PathArg&) const { return "path"; }
    };
    return std::visit(V{}, k);
}

ShapeRule ShapeRule::plain(std::string_view expr) {
    ShapeRule r;
    r.then_expr = Expression::parse(expr);
    r.else_expr = r.then_expr;
    return r;
}

ShapeRule ShapeRule::when(std::string flag, char value, std::string_view then_expr,
                          std::string_view else_expr) {
    ShapeRule r;
    r.condition = std::make_pair(std::move(flag), value);
    r.then_expr = Expression::parse(then_expr);
    r.else_expr = Expression::parse(else_expr);
    return r;
}

std::int64_t ShapeRule::eval(const CallBindings& b) const {
    if (!condition) return then_expr.eval(b.dims);
    auto it = b.flags.find(condition->first);
    if (it == b.flags.end())
        throw Error(ErrorCode::UnboundVariable, "flag '" + condition->first + "' is not bound");
    return (it->second == condition->second ? then_expr : else_expr).eval(b.dims);
}

std::string ShapeRule::text() const {
    if (!condition) return then_expr.text();
    return condition->first + "=" + condition->second + " ? " + then_expr.text() + " : " +
           else_expr.text();
}

std::set<std::string> ShapeRule::identifiers() const {
    auto ids = then_expr.free_variables();
    auto more = else_expr.free_variables();
    ids.insert(more.begin(), more.end());
    if (condition) ids.insert(condition->first);
    return ids;
}

const ArgSpec* Signature::find(std::string_view arg) const {
    auto it = std::find_if(args.begin(), args.end(), [&](const ArgSpec& a) { return a.name == arg; });
    return it == args.end() ? nullptr : &*it;
}

std::optional<std::size_t> Signature::index_of(std::string_view arg) const {
    for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].name == arg) return i;
    return std::nullopt;
}

void check_bindings(const Signature& sig, const CallBindings& b) {
    for (const auto& a : sig.args) {
        if (const auto* f = std::get_if<FlagArg>(&a.kind)) {
            auto it = b.flags.find(a.name);
            if (it == b.flags.end())
                throw Error(ErrorCode::IllegalArgument, sig.name + ": flag '" + a.name + "' unbound");
            if (f->allowed.find(it->second) == std::string::npos)
                throw Error(ErrorCode::IllegalArgument, sig.name + ": illegal value '" +
                                                            std::string(1, it->second) + "' for " +
                                                            a.name + " (allowed: " + f->allowed + ")");
        } else if (const auto* d = std::get_if<DimArg>(&a.kind)) {
            auto it = b.dims.find(a.name);
            if (it == b.dims.end())
                throw Error(ErrorCode::IllegalArgument, sig.name + ": dim '" + a.name + "' unbound");
            if (it->second < d->min_value)
                throw Error(ErrorCode::IllegalArgument,
                            sig.name + ": " + a.name + "=" + std::to_string(it->second) +
                                " below minimum " + std::to_string(d->min_value));
        }
    }
}

std::vector<OperandShape> derive_shapes(const Signature& sig, const CallBindings& b) {
    check_bindings(sig, b);
    std::vector<OperandShape> out;
    for (const auto& a : sig.args) {
        const auto* d = std::get_if<DataArg>(&a.kind);
        if (!d) continue;
        OperandShape s;
        s.name = a.name;
        s.rows = std::max<std::int64_t>(0, d->rows.eval(b));
        s.cols = std::max<std::int64_t>(0, d->cols.eval(b));
        s.min_ld = std::max<std::int64_t>(1, s.rows);
        s.structure = d->structure;
        if (!d->uplo_flag.empty())
            s.structure = b.flags.at(d->uplo_flag) == 'L' ? Structure::Lower : Structure::Upper;
        s.vector = d->ld.empty();
        out.push_back(std::move(s));
    }
    return out;
}

std::uint64_t flop_count(const Signature& sig, const CallBindings& b) {
    check_bindings(sig, b);
    return sig.flops.count ? sig.flops.count(b) : 0;
}

}  // namespace kernbench
