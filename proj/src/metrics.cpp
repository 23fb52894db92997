#include "kernbench/metrics.hpp"

#include "kernbench/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace kernbench {

std::string metric_name(const Metric& m) {
    switch (m.kind) {
        case MetricKind::Cycles: return "cycles";
        case MetricKind::TimeSeconds: return "time-seconds";
        case MetricKind::GflopsPerSecond: return "gflops-per-second";
        case MetricKind::FlopsPerCycle: return "flops-per-cycle";
        case MetricKind::Efficiency: return "efficiency";
        case MetricKind::Counter: return "counter[" + std::to_string(m.counter) + "]";
    }
    return "?";
}

Metric parse_metric(std::string_view name, const std::vector<std::string>& counter_names) {
    if (name == "cycles") return {MetricKind::Cycles};
    if (name == "time-seconds" || name == "time") return {MetricKind::TimeSeconds};
    if (name == "gflops-per-second" || name == "gflops" || name == "gflops/s") return {MetricKind::GflopsPerSecond};
    if (name == "flops-per-cycle" || name == "flops/cycle") return {MetricKind::FlopsPerCycle};
    if (name == "efficiency") return {MetricKind::Efficiency};
    if (name.starts_with("counter[") && name.ends_with("]")) {
        auto digits = name.substr(8, name.size() - 9);
        std::size_t k = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (!digits.empty() && ec == std::errc() && p == digits.data() + digits.size())
            return {MetricKind::Counter, k};
    }
    for (std::size_t k = 0; k < counter_names.size(); ++k)
        if (counter_names[k] == name) return {MetricKind::Counter, k};
    throw Error(ErrorCode::IllegalArgument,
                "unknown metric '" + std::string(name) +
                    "' (expected cycles, time-seconds, gflops-per-second, flops-per-cycle, efficiency or counter[k])");
}

std::vector<Metric> applicable_metrics(const Report& r, const MachineSpec& m) {
    std::vector<Metric> out = {{MetricKind::Cycles}, {MetricKind::TimeSeconds}, {MetricKind::GflopsPerSecond},
                               {MetricKind::FlopsPerCycle}};
    if (m.peak(r.dtype())) out.push_back({MetricKind::Efficiency});
    for (std::size_t k = 0; k < r.experiment.counters.size(); ++k) out.push_back({MetricKind::Counter, k});
    return out;
}

std::string statistic_name(Statistic s) {
    switch (s) {
        case Statistic::Min: return "min";
        case Statistic::Max: return "max";
        case Statistic::Mean: return "mean";
        case Statistic::Median: return "median";
        case Statistic::Std: return "std";
    }
    return "?";
}

Statistic parse_statistic(std::string_view name) {
    if (name == "min") return Statistic::Min;
    if (name == "max") return Statistic::Max;
    if (name == "mean" || name == "avg") return Statistic::Mean;
    if (name == "median") return Statistic::Median;
    if (name == "std" || name == "standard-deviation") return Statistic::Std;
    throw Error(ErrorCode::IllegalArgument,
                "unknown statistic '" + std::string(name) + "' (expected min, max, mean, median or std)");
}

std::optional<double> apply_metric(const Measurement& m, const Metric& metric, const MachineSpec& machine,
                                   Dtype dtype) {
    const double cycles = static_cast<double>(m.cycles);
    const double flops = static_cast<double>(m.flops);
    switch (metric.kind) {
        case MetricKind::Cycles: return cycles;
        case MetricKind::TimeSeconds: return cycles / machine.frequency_hz;
        case MetricKind::GflopsPerSecond:
            if (m.cycles == 0) return std::nullopt;
            return flops / (cycles / machine.frequency_hz) / 1e9;
        case MetricKind::FlopsPerCycle:
            if (m.cycles == 0) return std::nullopt;
            return flops / cycles;
        case MetricKind::Efficiency: {
            auto peak = machine.peak(dtype);
            if (!peak)
                throw Error(ErrorCode::UndefinedMetric, std::string("efficiency needs peak_flops_per_cycle_") +
                                                            (dtype == Dtype::Double ? "double" : "single") +
                                                            " in machine '" + machine.name + "'");
            if (m.cycles == 0) return std::nullopt;
            return flops / cycles / *peak;
        }
        case MetricKind::Counter:
            if (metric.counter >= m.counters.size())
                throw Error(ErrorCode::UndefinedMetric, "counter[" + std::to_string(metric.counter) +
                                                            "] does not exist (" + std::to_string(m.counters.size()) +
                                                            " counters recorded)");
            return static_cast<double>(m.counters[metric.counter]);
    }
    return std::nullopt;
}

double apply_statistic(std::span<const double> values, Statistic s, bool discard_first) {
    if (discard_first && !values.empty()) values = values.subspan(1);
    if (values.empty())
        throw Error(ErrorCode::EmptyStatistic, std::string("no values left for ") + statistic_name(s).c_str() +
                                                   (discard_first ? " after discarding the first repetition" : ""));
    const double n = static_cast<double>(values.size());
    switch (s) {
        case Statistic::Min: return *std::min_element(values.begin(), values.end());
        case Statistic::Max: return *std::max_element(values.begin(), values.end());
        case Statistic::Mean: return std::accumulate(values.begin(), values.end(), 0.0) / n;
        case Statistic::Median: {
            std::vector<double> v(values.begin(), values.end());
            std::sort(v.begin(), v.end());
            const std::size_t h = v.size() / 2;
            return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
        }
        case Statistic::Std: {
            const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
            double ss = 0;
            for (double x : values) ss += (x - mean) * (x - mean);
            return std::sqrt(ss / n);
        }
    }
    return 0;
}

namespace {

Series series_from(const Report& r, const std::vector<std::vector<Measurement>>& reduced, const SeriesQuery& q,
                   const MachineSpec& machine, std::string label) {
    Series out{std::move(label), {}};
    const Dtype dtype = r.dtype();
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        const auto& reps = reduced[i];
        if (q.discard_first && reps.size() <= 1)
            throw Error(ErrorCode::EmptyStatistic,
                        "only one repetition: nothing left after discarding the first (keep it instead)");
        std::vector<double> values;
        for (std::size_t rep = q.discard_first ? 1 : 0; rep < reps.size(); ++rep) {
            if (reps[rep].failed) continue;
            if (auto v = apply_metric(reps[rep], q.metric, machine, dtype)) values.push_back(*v);
        }
        SeriesPoint p{r.points[i].value, std::nullopt};
        if (!values.empty()) p.y = apply_statistic(values, q.statistic, false);
        out.points.push_back(p);
    }
    return out;
}

}  // namespace

Series series(const Report& r, const SeriesQuery& q, const MachineSpec& machine) {
    return series_from(r, reduce(r), q, machine, "total");
}

std::vector<Series> breakdown_series(const Report& r, const SeriesQuery& q, const MachineSpec& machine) {
    std::vector<Series> out;
    for (std::size_t c = 0; c < r.experiment.calls.size(); ++c)
        out.push_back(series_from(r, reduce_call(r, c), q, machine,
                                  std::to_string(c + 1) + ":" + r.experiment.calls[c].kernel));
    out.push_back(series(r, q, machine));
    return out;
}

std::string format_value(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string stats_csv(const Report& r, const std::vector<Metric>& metrics, const std::vector<Statistic>& stats,
                      bool discard_first, const MachineSpec& machine) {
    std::string out = "range-value,metric,statistic,value\n";
    for (const auto& m : metrics)
        for (auto s : stats) {
            Series ser = series(r, {m, s, discard_first}, machine);
            for (const auto& p : ser.points) {
                out += std::to_string(p.x) + "," + metric_name(m) + "," + statistic_name(s) + ",";
                if (p.y) out += format_value(*p.y);
                out += '\n';
            }
        }
    return out;
}

}  // namespace kernbench
