#include "kernbench/unroll.hpp"

#include "kernbench/call_eval.hpp"
#include "kernbench/error.hpp"
#include "kernbench/memory_plan.hpp"

#include <algorithm>
#include <map>

namespace kernbench {

std::size_t CommandStream::call_lines() const {
    std::size_t n = 0;
    for (const auto& c : commands) n += std::holds_alternative<cmd::Call>(c);
    return n - init_lines;
}

std::string CommandStream::text() const {
    std::string s;
    for (const auto& c : commands) {
        s += format_command(c);
        s += '\n';
    }
    return s;
}

namespace {

/// Range values grouped into streams, one per thread count.
std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> stream_groups(const Experiment& e) {
    std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> groups;
    const auto values = e.range_values();
    if (e.threads_ranged()) {
        for (auto v : values) groups.push_back({v, {v}});
    } else {
        groups.push_back({e.thread_count(values.front()), values});
    }
    return groups;
}

/// Operand allocation sizes for a stream (largest over its range values) and the plan
/// at the range value that needs the most memory, used for initialisation.
struct StreamMemory {
    std::vector<std::pair<std::string, std::int64_t>> sizes;
    std::map<std::string, OperandPlan> init_plan;
    std::map<std::int64_t, MemoryPlan> plans;
};

StreamMemory stream_memory(const Experiment& e, const std::vector<std::int64_t>& range_values) {
    StreamMemory m;
    for (auto r : range_values) {
        MemoryPlan p = plan_memory(e, r);
        for (const auto& op : p.operands) {
            auto it = std::find_if(m.sizes.begin(), m.sizes.end(), [&](const auto& s) { return s.first == op.name; });
            if (it == m.sizes.end()) {
                m.sizes.emplace_back(op.name, op.total_elems);
                m.init_plan[op.name] = op;
            } else if (op.total_elems > it->second) {
                it->second = op.total_elems;
                m.init_plan[op.name] = op;
            }
        }
        m.plans.emplace(r, std::move(p));
    }
    return m;
}

/// Initialisation calls: one gerand over a whole general operand, one porand per
/// instance of a symmetric positive definite operand.
std::vector<cmd::Call> init_calls(const StreamMemory& m) {
    std::vector<cmd::Call> out;
    for (const auto& [name, size] : m.sizes) {
        const OperandPlan& op = m.init_plan.at(name);
        const std::int64_t elems = std::max<std::int64_t>(size, 1);
        if (op.structure == Structure::SymmetricPd && op.dtype == Dtype::Double) {
            for (std::int64_t i = 0; i < op.instance_count; ++i)
                out.push_back({"dporand",
                               {std::to_string(op.rows), name + "+" + std::to_string(op.instance_offset(i)),
                                std::to_string(op.ld)}});
        } else {
            const char* kernel = op.dtype == Dtype::Double ? "dgerand" : "sgerand";
            out.push_back({kernel, {std::to_string(elems), "1", name, std::to_string(elems)}});
        }
    }
    return out;
}

std::size_t measured_lines_for(const Experiment& e, std::int64_t range_value) {
    const std::size_t reps = static_cast<std::size_t>(e.nreps);
    if (e.parallel()) return reps;
    return reps * e.inner_values(range_value).size() * e.calls.size();
}

}  // namespace

std::vector<StreamLayout> stream_layout(const Experiment& e) {
    std::vector<StreamLayout> out;
    for (auto& [nthreads, values] : stream_groups(e)) {
        StreamLayout l;
        l.nthreads = nthreads;
        l.range_values = values;
        l.init_lines = init_calls(stream_memory(e, values)).size();
        for (auto r : values) l.measured_lines += measured_lines_for(e, r);
        out.push_back(std::move(l));
    }
    return out;
}

std::vector<CommandStream> unroll(const Experiment& e) {
    std::vector<CommandStream> streams;
    const RangeSpec* inner = e.inner();

    for (auto& [nthreads, values] : stream_groups(e)) {
        CommandStream s;
        s.nthreads = nthreads;
        s.range_values = values;
        if (!e.counters.empty()) s.commands.emplace_back(cmd::SetCounters{e.counters});

        StreamMemory mem = stream_memory(e, values);
        for (const auto& [name, size] : mem.sizes)
            s.commands.emplace_back(cmd::Malloc{mem.init_plan.at(name).dtype, name, std::max<std::int64_t>(size, 1)});
        for (auto& c : init_calls(mem)) {
            s.commands.emplace_back(std::move(c));
            ++s.init_lines;
        }
        s.commands.emplace_back(cmd::Go{});

        for (auto r : values) {
            const MemoryPlan& plan = mem.plans.at(r);
            const auto inner_vals = e.inner_values(r);
            const auto inner_count = static_cast<std::int64_t>(inner_vals.size());
            for (std::int64_t rep = 0; rep < e.nreps; ++rep) {
                if (e.parallel()) s.commands.emplace_back(cmd::ParBegin{});
                for (std::int64_t ii = 0; ii < inner_count; ++ii) {
                    const Bindings pt = e.point(r, inner ? std::optional(inner_vals[ii]) : std::nullopt);
                    for (const CallSpec& c : e.calls) {
                        EvaluatedCall ev = evaluate_call(c, pt);
                        const Signature& sig = *ev.signature;
                        for (std::size_t a = 0; a < sig.args.size(); ++a) {
                            const auto* d = std::get_if<DataArg>(&sig.args[a].kind);
                            if (!d) continue;
                            const OperandPlan* op = plan.find(c.args[a]);
                            if (!op || !op->varying) continue;
                            const VarySpec& v = *e.vary_for(op->name);
                            const std::int64_t idx = instance_index(e, v, rep, ii, inner_count);
                            ev.tokens[a] = op->name + "+" + std::to_string(op->instance_offset(idx));
                            if (op->ld_override && !d->ld.empty())
                                ev.tokens[*sig.index_of(d->ld)] = std::to_string(op->ld);
                        }
                        s.commands.emplace_back(cmd::Call{c.kernel, std::move(ev.tokens)});
                    }
                }
                if (e.parallel()) s.commands.emplace_back(cmd::ParEnd{});
            }
            s.measured_lines += measured_lines_for(e, r);
            s.commands.emplace_back(cmd::Go{});
        }
        streams.push_back(std::move(s));
    }
    return streams;
}

}  // namespace kernbench
