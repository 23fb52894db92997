#pragma once

#include "kernbench/experiment.hpp"
#include "kernbench/signature.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kernbench {

inline constexpr std::string_view kReportSeparator = "%%%";

struct Measurement {
    std::uint64_t cycles = 0;
    std::vector<std::uint64_t> counters;
    std::uint64_t flops = 0;
    bool failed = false;
};

/// Location of one raw measurement. For a parallel inner range `inner` and `call` are 0
/// and the measurement covers the whole block.
struct Coordinate {
    std::int64_t range_value = 0;
    std::int64_t rep = 0;
    std::size_t inner = 0;
    std::size_t call = 0;

    friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

/// All measurements taken at one range value.
struct RangePoint {
    std::int64_t value = 0;
    std::int64_t nthreads = 1;
    std::vector<std::int64_t> inner_values;
    /// raw[rep][inner][call]
    std::vector<std::vector<std::vector<Measurement>>> raw;
};

struct Report {
    Experiment experiment;
    std::string timer;
    bool counters_available = false;
    std::vector<RangePoint> points;
    std::vector<Coordinate> failures;

    /// Double unless every call is single precision.
    Dtype dtype() const;
    bool ranged() const { return experiment.range.has_value(); }
    const RangePoint& point(std::int64_t range_value) const;
};

/// Text written before the raw result lines of a report.
std::string report_header(const Experiment& e, std::string_view timer, bool counters_available);
std::string segment_line(std::int64_t nthreads);

/// Throws Error{Syntax | MalformedLine | LineCountMismatch}.
Report parse_report(std::string_view text);
Report load_report(const std::string& path);

/// reduced[range index][rep]: inner range and calls accumulated.
std::vector<std::vector<Measurement>> reduce(const Report& r);

/// Per-call view: [range index][rep] with the inner range summed for call `call`.
/// Throws Error{IllegalArgument} for parallel inner ranges.
std::vector<std::vector<Measurement>> reduce_call(const Report& r, std::size_t call);

}  // namespace kernbench
