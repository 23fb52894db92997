#pragma once

#include "kernbench/experiment.hpp"
#include "kernbench/signature.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kernbench {

inline constexpr std::int64_t kOperandCapElems = std::int64_t{1} << 30;

/// Placement of one data operand at one range value.
struct OperandPlan {
    std::string name;
    Dtype dtype = Dtype::Double;
    Structure structure = Structure::General;
    bool vector = false;
    /// Instance extent: maximum over every use and inner-range value.
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    /// Leading dimension the calls must use (vector operands: rows).
    std::int64_t ld = 1;
    /// True when `ld` replaces the calls' own ld arguments (vertical stacking).
    bool ld_override = false;
    bool varying = false;
    int along = 1;
    std::int64_t pad = 0;
    std::int64_t instance_count = 1;
    /// Element offset between consecutive instances.
    std::int64_t instance_stride = 0;
    /// Elements spanned by one instance (rows .. ld * (cols-1) + rows).
    std::int64_t instance_elems = 0;
    std::int64_t total_elems = 0;

    std::int64_t instance_offset(std::int64_t i) const { return i * instance_stride; }
};

struct MemoryPlan {
    /// In allocation order (first appearance in the call list).
    std::vector<OperandPlan> operands;

    const OperandPlan* find(std::string_view name) const;
};

/// Placement for every data operand at `range_value`. Throws Error{CapacityOverflow}
/// above kOperandCapElems per operand, or propagates expression errors.
MemoryPlan plan_memory(const Experiment& e, std::int64_t range_value);

/// Index of the instance used at (repetition, inner index) under a vary spec.
std::int64_t instance_index(const Experiment& e, const VarySpec& v, std::int64_t rep,
                            std::int64_t inner_index, std::int64_t inner_count);

}  // namespace kernbench
