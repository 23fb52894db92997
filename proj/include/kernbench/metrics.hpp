#pragma once

#include "kernbench/machine.hpp"
#include "kernbench/report.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kernbench {

enum class MetricKind { Cycles, TimeSeconds, GflopsPerSecond, FlopsPerCycle, Efficiency, Counter };

struct Metric {
    MetricKind kind = MetricKind::Cycles;
    /// Counter index for MetricKind::Counter.
    std::size_t counter = 0;

    friend bool operator==(const Metric&, const Metric&) = default;
};

enum class Statistic { Min, Max, Mean, Median, Std };

/// Canonical names: cycles, time-seconds, gflops-per-second, flops-per-cycle, efficiency,
/// counter[k]. Short aliases time, gflops, flops/cycle and counter names from the report
/// are accepted by parse_metric. Throws Error{IllegalArgument}.
std::string metric_name(const Metric& m);
Metric parse_metric(std::string_view name, const std::vector<std::string>& counter_names = {});
/// Metrics that can be computed for a report on a machine (efficiency needs a peak).
std::vector<Metric> applicable_metrics(const Report& r, const MachineSpec& m);

/// min, max, mean, median, std (alias standard-deviation).
std::string statistic_name(Statistic s);
Statistic parse_statistic(std::string_view name);
inline constexpr Statistic kAllStatistics[] = {Statistic::Min, Statistic::Max, Statistic::Mean, Statistic::Median,
                                               Statistic::Std};

/// nullopt marks an undefined value (division by zero cycles). Throws
/// Error{UndefinedMetric} for efficiency without a peak or a counter index out of range.
std::optional<double> apply_metric(const Measurement& m, const Metric& metric, const MachineSpec& machine,
                                   Dtype dtype);

/// Median uses the midpoint of the two central values; std is the population form.
/// Throws Error{EmptyStatistic} when nothing is left after the optional discard.
double apply_statistic(std::span<const double> values, Statistic s, bool discard_first);

struct SeriesPoint {
    std::int64_t x = 0;
    /// nullopt is a gap: every repetition failed or was undefined.
    std::optional<double> y;
};

struct Series {
    std::string label;
    std::vector<SeriesPoint> points;
};

struct SeriesQuery {
    Metric metric;
    Statistic statistic = Statistic::Median;
    bool discard_first = true;
};

/// One point per range value over the reduced per-repetition measurements.
/// Failed repetitions are excluded. Throws Error{EmptyStatistic} when discarding the
/// first repetition leaves none.
Series series(const Report& r, const SeriesQuery& q, const MachineSpec& machine);

/// One series per call (labelled "<index>:<kernel>") followed by the total.
std::vector<Series> breakdown_series(const Report& r, const SeriesQuery& q, const MachineSpec& machine);

/// Shortest text that reads back as exactly the same double.
std::string format_value(double v);

/// Rows "range-value,metric,statistic,value" under a header; gaps leave the value empty.
std::string stats_csv(const Report& r, const std::vector<Metric>& metrics, const std::vector<Statistic>& stats,
                      bool discard_first, const MachineSpec& machine);

}  // namespace kernbench
