#include "kernbench/memory_plan.hpp"

#include "kernbench/call_eval.hpp"
#include "kernbench/error.hpp"

#include <algorithm>
#include <limits>

namespace kernbench {

const OperandPlan* MemoryPlan::find(std::string_view name) const {
    for (const auto& op : operands)
        if (op.name == name) return &op;
    return nullptr;
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const std::string& what) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r) || r > kOperandCapElems)
        throw Error(ErrorCode::CapacityOverflow,
                    what + " exceeds the per-operand cap of " + std::to_string(kOperandCapElems) + " elements");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const std::string& what) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r) || r > kOperandCapElems)
        throw Error(ErrorCode::CapacityOverflow,
                    what + " exceeds the per-operand cap of " + std::to_string(kOperandCapElems) + " elements");
    return r;
}

}  // namespace

MemoryPlan plan_memory(const Experiment& e, std::int64_t range_value) {
    MemoryPlan plan;
    std::vector<std::int64_t> inner_vals = e.inner_values(range_value);
    const bool has_inner = e.inner() != nullptr;

    // Extent of every operand over all calls and inner-range values.
    for (std::int64_t iv : inner_vals) {
        const Bindings pt = e.point(range_value, has_inner ? std::optional(iv) : std::nullopt);
        for (const CallSpec& c : e.calls) {
            EvaluatedCall ev = evaluate_call(c, pt);
            auto shapes = derive_shapes(*ev.signature, ev.bindings);
            std::size_t k = 0;
            for (std::size_t a = 0; a < ev.signature->args.size(); ++a) {
                const auto* d = std::get_if<DataArg>(&ev.signature->args[a].kind);
                if (!d) continue;
                const OperandShape& s = shapes[k++];
                const std::string& name = c.args[a];
                OperandPlan* op = nullptr;
                for (auto& o : plan.operands)
                    if (o.name == name) op = &o;
                if (!op) {
                    plan.operands.push_back({});
                    op = &plan.operands.back();
                    op->name = name;
                    op->dtype = ev.signature->dtype;
                    op->vector = s.vector;
                }
                op->rows = std::max(op->rows, s.rows);
                op->cols = std::max(op->cols, s.cols);
                if (s.structure == Structure::SymmetricPd) op->structure = Structure::SymmetricPd;
                op->vector = op->vector && s.vector;
                std::int64_t ld = d->ld.empty() ? s.rows : ev.bindings.dims.at(d->ld);
                op->ld = std::max(op->ld, ld);
            }
        }
    }

    const std::int64_t inner_count = has_inner ? static_cast<std::int64_t>(inner_vals.size()) : 1;
    const Bindings pad_point = e.point(range_value, std::nullopt);
    for (auto& op : plan.operands) {
        op.ld = std::max({op.ld, op.rows, std::int64_t{1}});
        const std::string what = "operand '" + op.name + "'";
        if (const VarySpec* v = e.vary_for(op.name)) {
            op.varying = true;
            op.along = v->along;
            op.pad = v->pad.eval(pad_point);
            if (op.pad < 0)
                throw Error(ErrorCode::IllegalArgument, "vary " + op.name + ": pad " + std::to_string(op.pad) +
                                                            " is negative");
            op.instance_count = 1;
            for (const auto& w : v->with) op.instance_count *= w == "rep" ? e.nreps : inner_count;
            if (op.along == 1 || op.vector) {
                // Instances side by side, each a full ld x cols panel plus padding.
                op.instance_elems = op.rows == 0 || op.cols == 0 ? 0 : op.ld * (op.cols - 1) + op.rows;
                op.instance_stride = checked_add(checked_mul(op.ld, op.cols, what), op.pad, what);
                op.total_elems = checked_mul(op.instance_stride, op.instance_count, what);
            } else {
                // Instances stacked in rows of one tall matrix sharing a common ld.
                op.instance_stride = checked_add(op.rows, op.pad, what);
                op.ld = std::max<std::int64_t>(1, checked_mul(op.instance_count, op.instance_stride, what));
                op.ld_override = true;
                op.instance_elems = op.rows == 0 || op.cols == 0 ? 0 : op.ld * (op.cols - 1) + op.rows;
                op.total_elems = checked_mul(op.ld, op.cols, what);
            }
        } else {
            op.instance_elems = op.rows == 0 || op.cols == 0 ? 0 : op.ld * (op.cols - 1) + op.rows;
            op.instance_stride = 0;
            op.total_elems = checked_mul(op.ld, op.cols, what);
        }
    }
    return plan;
}

std::int64_t instance_index(const Experiment& e, const VarySpec& v, std::int64_t rep, std::int64_t inner_index,
                            std::int64_t inner_count) {
    const RangeSpec* inner = e.inner();
    bool with_rep = false, with_inner = false;
    for (const auto& w : v.with) {
        if (w == "rep") with_rep = true;
        else if (inner && w == inner->var) with_inner = true;
    }
    return (with_rep ? rep : 0) * (with_inner ? inner_count : 1) + (with_inner ? inner_index : 0);
}

}  // namespace kernbench
