#pragma once

#include "kernbench/machine.hpp"
#include "kernbench/metrics.hpp"
#include "kernbench/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kernbench {

enum class PlotStyle { Line, Bar };

struct LabelledReport {
    std::string label;
    const Report* report = nullptr;
};

struct PlotSpec {
    Metric metric;
    std::vector<Statistic> statistics = {Statistic::Min, Statistic::Median, Statistic::Max};
    bool discard_first = true;
    /// Unset: line when every report has a range, bar otherwise.
    std::optional<PlotStyle> style;
    /// One series per call plus the total for each report.
    bool breakdown = false;
};

struct PlotOutput {
    std::string svg;
    /// CSV "series,statistic,range-value,value" of every plotted number.
    std::string series_csv;
};

inline constexpr int kPlotWidth = 800;
inline constexpr int kPlotHeight = 480;

/// Deterministic: identical inputs give byte-identical output. With both min and max
/// among the statistics, a line plot draws them as an envelope and the rest as lines.
/// Throws Error{IllegalArgument} for a line plot of an unranged report or an empty spec.
PlotOutput emit_plot(const PlotSpec& spec, const std::vector<LabelledReport>& reports, const MachineSpec& machine);

}  // namespace kernbench
