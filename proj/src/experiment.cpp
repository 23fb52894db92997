#include "kernbench/experiment.hpp"

#include "kernbench/call_eval.hpp"
#include "kernbench/command.hpp"
#include "kernbench/error.hpp"
#include "kernbench/kernels.hpp"
#include "kernbench/memory_plan.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace kernbench {

// ---- ranges and iteration space ------------------------------------------------

std::vector<std::int64_t> RangeSpec::values(const Bindings& b) const {
    const std::int64_t lo = start.eval(b), st = step.eval(b), hi = stop.eval(b);
    if (st <= 0)
        throw Error(ErrorCode::IllegalArgument, "range " + var + ": step " + std::to_string(st) + " must be positive");
    if (hi < lo)
        throw Error(ErrorCode::IllegalArgument,
                    "range " + var + ": stop " + std::to_string(hi) + " below start " + std::to_string(lo));
    std::vector<std::int64_t> out;
    for (std::int64_t v = lo; v <= hi; v += st) out.push_back(v);
    return out;
}

std::string RangeSpec::text() const {
    return var + " " + start.text() + ":" + step.text() + ":" + stop.text();
}

Bindings Experiment::param_bindings() const {
    Bindings b;
    for (const auto& [k, v] : params) b[k] = v;
    return b;
}

std::vector<std::int64_t> Experiment::range_values() const {
    if (!range) return {0};
    return range->values(param_bindings());
}

std::vector<std::int64_t> Experiment::inner_values(std::int64_t range_value) const {
    const RangeSpec* in = inner();
    if (!in) return {0};
    return in->values(point(range_value, std::nullopt));
}

Bindings Experiment::point(std::int64_t range_value, std::optional<std::int64_t> inner_value) const {
    Bindings b = param_bindings();
    if (range) b[range->var] = range_value;
    if (inner_value)
        if (const RangeSpec* in = inner()) b[in->var] = *inner_value;
    return b;
}

std::int64_t Experiment::thread_count(std::int64_t range_value) const {
    if (threads_ranged()) return range_value;
    return Expression::parse(nthreads).eval(param_bindings());
}

const VarySpec* Experiment::vary_for(std::string_view operand) const {
    for (const auto& v : vary)
        if (v.operand == operand) return &v;
    return nullptr;
}

// ---- text form ------------------------------------------------------------------

std::string serialize(const Experiment& e) {
    std::ostringstream os;
    os << kExperimentHeader << '\n';
    os << "backend: " << e.backend << '\n';
    os << "machine: " << e.machine << '\n';
    os << "nthreads: " << e.nthreads << '\n';
    if (e.range) os << "range: " << e.range->text() << '\n';
    os << "nreps: " << e.nreps << '\n';
    if (e.sumrange) os << "sumrange: " << e.sumrange->text() << '\n';
    if (e.parrange) os << "parrange: " << e.parrange->text() << '\n';
    if (!e.counters.empty()) {
        os << "counters:";
        for (const auto& c : e.counters) os << ' ' << c;
        os << '\n';
    }
    for (const auto& [k, v] : e.params) os << "param: " << k << ' ' << v << '\n';
    os << "seed: " << e.seed << '\n';
    for (const auto& c : e.calls) {
        os << "call: " << c.kernel;
        for (const auto& a : c.args) os << ' ' << a;
        os << '\n';
    }
    for (const auto& v : e.vary) {
        os << "vary: " << v.operand << " with ";
        for (std::size_t i = 0; i < v.with.size(); ++i) os << (i ? "," : "") << v.with[i];
        os << " along " << v.along << " pad " << v.pad.text() << '\n';
    }
    return os.str();
}

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

class FieldParser {
public:
    FieldParser(std::size_t line, std::string field) : line_(line), field_(std::move(field)) {}

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::Syntax, "line " + std::to_string(line_) + ", field '" + field_ + "': " + why);
    }

    template <typename T>
    T integer(const std::string& tok) const {
        T v{};
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size())
            fail("expected an integer, got '" + tok + "'");
        return v;
    }

    std::string identifier(const std::string& tok) const {
        if (!is_identifier(tok)) fail("expected an identifier, got '" + tok + "'");
        return tok;
    }

    Expression expression(std::string_view text) const {
        try {
            return Expression::parse(text);
        } catch (const Error& err) {
            fail(err.what());
        }
    }

    RangeSpec range(const std::string& value) const {
        auto sp = value.find_first_of(" \t");
        if (sp == std::string::npos) fail("expected '<var> <start>:<step>:<stop>'");
        RangeSpec r;
        r.var = identifier(value.substr(0, sp));
        std::string bounds = trim(std::string_view(value).substr(sp));
        std::vector<std::string> parts;
        std::size_t from = 0;
        for (;;) {
            auto c = bounds.find(':', from);
            parts.push_back(bounds.substr(from, c == std::string::npos ? std::string::npos : c - from));
            if (c == std::string::npos) break;
            from = c + 1;
        }
        if (parts.size() != 3) fail("expected '<start>:<step>:<stop>'");
        r.start = expression(parts[0]);
        r.step = expression(parts[1]);
        r.stop = expression(parts[2]);
        return r;
    }

private:
    std::size_t line_;
    std::string field_;
};

}  // namespace

Experiment deserialize(std::string_view text) {
    Experiment e;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    std::set<std::string> seen;
    static const std::set<std::string> singular = {"backend", "machine",  "nthreads", "range",
                                                   "nreps",   "sumrange", "parrange", "counters", "seed"};

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (!header) {
            if (line != kExperimentHeader)
                throw Error(ErrorCode::Syntax, "line " + std::to_string(line_no) + ": expected header '" +
                                                   std::string(kExperimentHeader) + "'");
            header = true;
            continue;
        }
        if (line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorCode::Syntax, "line " + std::to_string(line_no) + ": expected '<field>: <value>'");
        std::string key = trim(std::string_view(line).substr(0, colon));
        std::string value = trim(std::string_view(line).substr(colon + 1));
        FieldParser p(line_no, key);
        if (singular.count(key) && !seen.insert(key).second) p.fail("given more than once");
        auto tokens = split_ws(value);

        if (key == "backend") {
            if (tokens.size() != 1) p.fail("expected one value");
            e.backend = tokens[0];
        } else if (key == "machine") {
            if (tokens.size() != 1) p.fail("expected one value");
            e.machine = tokens[0];
        } else if (key == "nthreads") {
            if (tokens.size() != 1) p.fail("expected an integer or the range variable");
            e.nthreads = tokens[0];
        } else if (key == "range") {
            e.range = p.range(value);
        } else if (key == "nreps") {
            if (tokens.size() != 1) p.fail("expected one integer");
            e.nreps = p.integer<std::int64_t>(tokens[0]);
        } else if (key == "sumrange") {
            e.sumrange = p.range(value);
        } else if (key == "parrange") {
            e.parrange = p.range(value);
        } else if (key == "counters") {
            e.counters = tokens;
        } else if (key == "param") {
            if (tokens.size() != 2) p.fail("expected '<name> <integer>'");
            e.params.emplace_back(p.identifier(tokens[0]), p.integer<std::int64_t>(tokens[1]));
        } else if (key == "seed") {
            if (tokens.size() != 1) p.fail("expected one integer");
            e.seed = p.integer<std::uint64_t>(tokens[0]);
        } else if (key == "call") {
            if (tokens.empty()) p.fail("expected a kernel name");
            e.calls.push_back({tokens[0], {tokens.begin() + 1, tokens.end()}});
        } else if (key == "vary") {
            // vary: <operand> with <a>[,<b>] along <0|1> pad <expr>
            if (tokens.size() < 7 || tokens[1] != "with" || tokens[3] != "along" || tokens[5] != "pad")
                p.fail("expected '<operand> with <rep|var>[,<rep|var>] along <0|1> pad <expr>'");
            VarySpec v;
            v.operand = p.identifier(tokens[0]);
            std::string_view with = tokens[2];
            for (std::size_t from = 0;;) {
                auto c = with.find(',', from);
                v.with.push_back(p.identifier(std::string(with.substr(from, c == std::string_view::npos ? c : c - from))));
                if (c == std::string_view::npos) break;
                from = c + 1;
            }
            v.along = p.integer<int>(tokens[4]);
            std::string pad;
            for (std::size_t i = 6; i < tokens.size(); ++i) pad += tokens[i];
            v.pad = p.expression(pad);
            e.vary.push_back(std::move(v));
        } else {
            throw Error(ErrorCode::Syntax, "line " + std::to_string(line_no) + ": unknown field '" + key + "'");
        }
    }
    if (!header) throw Error(ErrorCode::Syntax, "missing header '" + std::string(kExperimentHeader) + "'");
    return e;
}

Experiment load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read experiment file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

// ---- validation -----------------------------------------------------------------

namespace {

constexpr std::size_t kExhaustiveLimit = 1024;

/// Every point if there are few, otherwise the two extremes.
std::vector<std::int64_t> check_points(const std::vector<std::int64_t>& all) {
    if (all.size() <= kExhaustiveLimit || all.empty()) return all;
    return {all.front(), all.back()};
}

std::string call_label(std::size_t i, const CallSpec& c) {
    return "call " + std::to_string(i + 1) + " (" + c.kernel + ")";
}

}  // namespace

std::vector<std::string> validate(const Experiment& e) {
    std::vector<std::string> diags;
    auto diag = [&](std::string s) { diags.push_back(std::move(s)); };

    static const std::set<std::string> backends = {"local", "shell-script", "batch-template"};
    if (!backends.count(e.backend)) diag("backend '" + e.backend + "' is not one of local, shell-script, batch-template");
    if (e.nreps < 1) diag("nreps must be at least 1");
    if (e.sumrange && e.parrange) diag("one inner range: sumrange and parrange cannot both be given");

    // names
    std::set<std::string> names;
    for (const auto& [k, v] : e.params)
        if (!names.insert(k).second) diag("parameter '" + k + "' is defined twice");
    if (e.range && !names.insert(e.range->var).second)
        diag("range variable '" + e.range->var + "' clashes with a parameter");
    const RangeSpec* inner = e.inner();
    if (inner && !names.insert(inner->var).second)
        diag("inner range variable '" + inner->var + "' clashes with another name");
    if (!diags.empty()) return diags;

    // ranges
    const Bindings params = e.param_bindings();
    std::set<std::string> outer_scope;
    for (const auto& [k, v] : e.params) outer_scope.insert(k);
    auto check_vars = [&](const Expression& x, const std::set<std::string>& scope, const std::string& where) {
        for (const auto& v : x.free_variables())
            if (!scope.count(v)) diag(where + ": unknown variable '" + v + "'");
    };
    std::vector<std::int64_t> range_values{0};
    if (e.range) {
        for (const auto* x : {&e.range->start, &e.range->step, &e.range->stop})
            check_vars(*x, outer_scope, "range");
        if (!diags.empty()) return diags;
        try {
            range_values = e.range->values(params);
        } catch (const Error& err) {
            diag(err.what());
            return diags;
        }
    }
    std::set<std::string> call_scope = outer_scope;
    if (e.range) call_scope.insert(e.range->var);
    if (inner)
        for (const auto* x : {&inner->start, &inner->step, &inner->stop})
            check_vars(*x, call_scope, "inner range");
    if (inner) call_scope.insert(inner->var);

    // thread count
    if (e.threads_ranged()) {
        for (auto v : range_values)
            if (v < 1) {
                diag("thread count " + std::to_string(v) + " from range " + e.range->var + " is below 1");
                break;
            }
    } else {
        try {
            auto x = Expression::parse(e.nthreads);
            if (!x.is_literal()) diag("nthreads must be an integer or the range variable, got '" + e.nthreads + "'");
            else if (x.eval({}) < 1) diag("nthreads must be at least 1");
        } catch (const Error&) {
            diag("nthreads must be an integer or the range variable, got '" + e.nthreads + "'");
        }
    }

    // calls, statically
    if (e.calls.empty()) diag("experiment has no calls");
    std::map<std::string, Dtype> operand_dtype;
    for (std::size_t i = 0; i < e.calls.size(); ++i) {
        const CallSpec& c = e.calls[i];
        if (!has_kernel(c.kernel)) {
            diag(call_label(i, c) + ": unknown kernel");
            continue;
        }
        const Signature& sig = lookup_signature(c.kernel);
        if (c.args.size() != sig.args.size()) {
            diag(call_label(i, c) + ": expected " + std::to_string(sig.args.size()) + " arguments, got " +
                 std::to_string(c.args.size()));
            continue;
        }
        for (std::size_t a = 0; a < sig.args.size(); ++a) {
            const ArgSpec& spec = sig.args[a];
            const std::string& tok = c.args[a];
            const std::string where = call_label(i, c) + ", argument " + spec.name;
            if (const auto* f = std::get_if<FlagArg>(&spec.kind)) {
                if (tok.size() != 1 || f->allowed.find(tok[0]) == std::string::npos)
                    diag(where + ": '" + tok + "' is not one of " + f->allowed);
            } else if (std::holds_alternative<DimArg>(spec.kind) || std::holds_alternative<LdArg>(spec.kind)) {
                try {
                    check_vars(Expression::parse(tok), call_scope, where);
                } catch (const Error& err) {
                    diag(where + ": " + err.what());
                }
            } else if (spec.is_data()) {
                if (!is_identifier(tok)) {
                    diag(where + ": '" + tok + "' is not an operand name");
                } else if (call_scope.count(tok)) {
                    diag(where + ": operand '" + tok + "' clashes with a variable name");
                } else {
                    auto [it, fresh] = operand_dtype.emplace(tok, sig.dtype);
                    if (!fresh && it->second != sig.dtype)
                        diag(where + ": operand '" + tok + "' used with both single and double precision");
                }
            } else if (std::holds_alternative<ScalarArg>(spec.kind)) {
                double v = 0;
                auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (ec != std::errc() || p != tok.data() + tok.size()) diag(where + ": '" + tok + "' is not a number");
            }
        }
    }

    // vary specs
    std::set<std::string> varied;
    for (const auto& v : e.vary) {
        const std::string where = "vary " + v.operand;
        if (!operand_dtype.count(v.operand)) diag(where + ": operand does not appear in any call");
        if (!varied.insert(v.operand).second) diag(where + ": operand varied twice");
        if (v.along != 0 && v.along != 1) diag(where + ": along must be 0 or 1");
        if (v.with.empty()) diag(where + ": 'with' must name rep and/or the inner range variable");
        std::set<std::string> seen;
        for (const auto& w : v.with) {
            if (w != "rep" && !(inner && w == inner->var))
                diag(where + ": cannot vary with '" + w + "' (allowed: rep" + (inner ? ", " + inner->var : "") + ")");
            if (!seen.insert(w).second) diag(where + ": '" + w + "' listed twice");
        }
        std::set<std::string> pad_scope = outer_scope;
        if (e.range) pad_scope.insert(e.range->var);
        check_vars(v.pad, pad_scope, where + " pad");
    }
    if (!diags.empty()) return diags;

    // every (or extreme) point of the iteration space
    for (std::int64_t r : check_points(range_values)) {
        const std::string at = e.range ? " at " + e.range->var + "=" + std::to_string(r) : "";
        std::vector<std::int64_t> inner_vals{0};
        if (inner) {
            try {
                inner_vals = e.inner_values(r);
            } catch (const Error& err) {
                diag(std::string("inner range") + at + ": " + err.what());
                continue;
            }
        }
        for (std::int64_t iv : check_points(inner_vals)) {
            const Bindings pt = e.point(r, inner ? std::optional(iv) : std::nullopt);
            const std::string at_pt = at + (inner ? (at.empty() ? " at " : ", ") + inner->var + "=" + std::to_string(iv) : "");
            for (std::size_t i = 0; i < e.calls.size(); ++i) {
                const CallSpec& c = e.calls[i];
                try {
                    EvaluatedCall ev = evaluate_call(c, pt);
                    auto shapes = derive_shapes(*ev.signature, ev.bindings);
                    std::size_t k = 0;
                    for (const auto& spec : ev.signature->args) {
                        const auto* d = std::get_if<DataArg>(&spec.kind);
                        if (!d) continue;
                        const OperandShape& s = shapes[k++];
                        if (d->ld.empty()) continue;
                        const VarySpec* vs = e.vary_for(c.args[*ev.signature->index_of(spec.name)]);
                        if (vs && vs->along == 0) continue;  // ld is replaced by the plan
                        std::int64_t ldv = ev.bindings.dims.at(d->ld);
                        if (ldv < s.min_ld)
                            diag(call_label(i, c) + ", argument " + d->ld + ": " + std::to_string(ldv) +
                                 " is below the minimum " + std::to_string(s.min_ld) + " for operand " +
                                 s.name + at_pt);
                    }
                } catch (const Error& err) {
                    diag(call_label(i, c) + at_pt + ": " + err.what());
                }
            }
        }
        if (!diags.empty()) return diags;
        try {
            plan_memory(e, r);
        } catch (const Error& err) {
            diag(std::string("memory plan") + at + ": " + err.what());
            return diags;
        }
    }
    return diags;
}

}  // namespace kernbench
