#pragma once

#include "kernbench/expression.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kernbench {

/// start:step:stop, inclusive of stop when it is reached exactly.
struct RangeSpec {
    std::string var;
    Expression start;
    Expression step;
    Expression stop;

    /// Throws Error{IllegalArgument} for step <= 0 or stop < start.
    std::vector<std::int64_t> values(const Bindings& b) const;
    std::string text() const;  // "<var> <start>:<step>:<stop>"

    friend bool operator==(const RangeSpec&, const RangeSpec&) = default;
};

struct VarySpec {
    std::string operand;
    /// Subset of {"rep", inner-range variable}, in the order written.
    std::vector<std::string> with;
    int along = 1;  // 0 = stacked vertically, 1 = horizontally
    Expression pad;

    friend bool operator==(const VarySpec&, const VarySpec&) = default;
};

/// Kernel name plus one token per signature argument (expressions for dims and
/// leading dimensions, operand names for data arguments).
struct CallSpec {
    std::string kernel;
    std::vector<std::string> args;

    friend bool operator==(const CallSpec&, const CallSpec&) = default;
};

struct Experiment {
    std::string backend = "local";
    std::string machine = "default";
    /// Integer literal or the range variable.
    std::string nthreads = "1";
    std::optional<RangeSpec> range;
    std::int64_t nreps = 1;
    std::optional<RangeSpec> sumrange;
    std::optional<RangeSpec> parrange;
    std::vector<std::string> counters;
    std::vector<std::pair<std::string, std::int64_t>> params;
    std::uint64_t seed = 0;
    std::vector<CallSpec> calls;
    std::vector<VarySpec> vary;

    friend bool operator==(const Experiment&, const Experiment&) = default;

    const RangeSpec* inner() const { return parrange ? &*parrange : sumrange ? &*sumrange : nullptr; }
    bool parallel() const { return parrange.has_value(); }
    bool threads_ranged() const { return range && nthreads == range->var; }

    Bindings param_bindings() const;
    /// Range values, or {0} when there is no range.
    std::vector<std::int64_t> range_values() const;
    /// Inner-range values at one range point, or {0} when there is no inner range.
    std::vector<std::int64_t> inner_values(std::int64_t range_value) const;
    /// Bindings for a point of the iteration space.
    Bindings point(std::int64_t range_value, std::optional<std::int64_t> inner_value) const;
    /// Thread count used for a range value.
    std::int64_t thread_count(std::int64_t range_value) const;
    const VarySpec* vary_for(std::string_view operand) const;
};

inline constexpr std::string_view kExperimentHeader = "#KERNBENCH EXPERIMENT v1";

/// Canonical text form; deserialize(serialize(e)) == e.
std::string serialize(const Experiment& e);

/// Throws Error{Syntax} naming the line and field.
Experiment deserialize(std::string_view text);

Experiment load_experiment(const std::string& path);

/// Empty when the experiment is valid.
std::vector<std::string> validate(const Experiment& e);

}  // namespace kernbench
