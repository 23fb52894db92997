#include "kernbench/plot.hpp"

#include "kernbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace kernbench {

namespace {

constexpr double kLeft = 80, kRight = 190, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Tick step of the form {1, 2, 5} x 10^k giving about `target` intervals.
double nice_step(double span, int target) {
    if (!(span > 0)) return 1;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f <= 1 ? 1 : f <= 2 ? 2 : f <= 5 ? 5 : 10) * mag;
}

struct Axis {
    double lo = 0, hi = 1, step = 1;
    double pixel_lo = 0, pixel_hi = 1;

    double map(double v) const { return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo); }
    std::vector<double> ticks() const {
        std::vector<double> t;
        for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + step * 1e-9; v += step)
            t.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
        return t;
    }
};

Axis make_value_axis(double lo, double hi, double p0, double p1) {
    lo = std::min(lo, 0.0);
    if (!(hi > lo)) hi = lo + 1;
    Axis a;
    a.step = nice_step(hi - lo, 5);
    a.lo = std::floor(lo / a.step) * a.step;
    a.hi = std::ceil(hi / a.step) * a.step;
    if (a.hi <= a.lo) a.hi = a.lo + a.step;
    a.pixel_lo = p0;
    a.pixel_hi = p1;
    return a;
}

struct Group {
    std::string label;
    std::string color;
    std::map<Statistic, Series> stats;
};

}  // namespace

PlotOutput emit_plot(const PlotSpec& spec, const std::vector<LabelledReport>& reports, const MachineSpec& machine) {
    if (reports.empty()) throw Error(ErrorCode::IllegalArgument, "plot needs at least one report");
    if (spec.statistics.empty()) throw Error(ErrorCode::IllegalArgument, "plot needs at least one statistic");
    bool all_ranged = true;
    for (const auto& r : reports) all_ranged = all_ranged && r.report->ranged();
    const PlotStyle style = spec.style.value_or(all_ranged ? PlotStyle::Line : PlotStyle::Bar);
    if (style == PlotStyle::Line && !all_ranged)
        throw Error(ErrorCode::IllegalArgument, "line plot needs ranged reports; use the bar style");

    std::set<Statistic> stat_set(spec.statistics.begin(), spec.statistics.end());
    std::vector<Statistic> stats(stat_set.begin(), stat_set.end());

    // Collect every series.
    std::vector<Group> groups;
    for (const auto& lr : reports) {
        std::map<Statistic, std::vector<Series>> per_stat;
        for (auto s : stats) {
            SeriesQuery q{spec.metric, s, spec.discard_first};
            per_stat[s] = spec.breakdown ? breakdown_series(*lr.report, q, machine)
                                         : std::vector<Series>{series(*lr.report, q, machine)};
        }
        const std::size_t n = per_stat.begin()->second.size();
        for (std::size_t i = 0; i < n; ++i) {
            Group g;
            const std::string& sub = per_stat.begin()->second[i].label;
            g.label = spec.breakdown ? (reports.size() > 1 ? lr.label + " " + sub : sub) : lr.label;
            for (auto& [s, v] : per_stat) g.stats[s] = v[i];
            groups.push_back(std::move(g));
        }
    }
    for (std::size_t i = 0; i < groups.size(); ++i) groups[i].color = kPalette[i % std::size(kPalette)];

    PlotOutput out;
    out.series_csv = "series,statistic,range-value,value\n";
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    std::set<std::int64_t> xs;
    for (const auto& g : groups)
        for (const auto& [s, ser] : g.stats)
            for (const auto& p : ser.points) {
                xs.insert(p.x);
                out.series_csv += g.label + "," + statistic_name(s) + "," + std::to_string(p.x) + ",";
                if (p.y) {
                    out.series_csv += format_value(*p.y);
                    vmin = std::min(vmin, *p.y);
                    vmax = std::max(vmax, *p.y);
                }
                out.series_csv += '\n';
            }
    if (!std::isfinite(vmin)) vmin = 0, vmax = 1;

    const double W = kPlotWidth, H = kPlotHeight;
    const double x0 = kLeft, x1 = W - kRight, y0 = H - kBottom, y1 = kTop;
    const Axis ya = make_value_axis(vmin, vmax, y0, y1);
    const Experiment& first = reports.front().report->experiment;
    const std::string ylabel = metric_name(spec.metric);
    const std::string xlabel = style == PlotStyle::Line && first.range ? first.range->var : "statistic";

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kPlotWidth) + "\" height=\"" +
           std::to_string(kPlotHeight) + "\" viewBox=\"0 0 " + std::to_string(kPlotWidth) + " " +
           std::to_string(kPlotHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kPlotWidth) + "\" height=\"" +
           std::to_string(kPlotHeight) + "\" fill=\"white\"/>\n";

    // Value axis with grid.
    for (double t : ya.ticks()) {
        const std::string y = num(ya.map(t));
        svg += "<line class=\"grid\" x1=\"" + num(x0) + "\" y1=\"" + y + "\" x2=\"" + num(x1) + "\" y2=\"" + y +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(ya.map(t) + 4) + "\" text-anchor=\"end\">" +
               tick_label(t) + "</text>\n";
    }
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) +
           "\" stroke=\"black\"/>\n";
    svg += "<text class=\"axis-label\" x=\"" + num(20) + "\" y=\"" + num((y0 + y1) / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + num((y0 + y1) / 2) + ")\">" + escape(ylabel) +
           "</text>\n";
    svg += "<text class=\"axis-label\" x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(H - 15) +
           "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";

    const bool envelope = style == PlotStyle::Line && stat_set.count(Statistic::Min) && stat_set.count(Statistic::Max);
    auto dash_for = [&](Statistic s) -> std::string {
        switch (s) {
            case Statistic::Mean: return " stroke-dasharray=\"6 3\"";
            case Statistic::Std: return " stroke-dasharray=\"2 3\"";
            case Statistic::Min:
            case Statistic::Max: return " stroke-dasharray=\"1 2\"";
            default: return "";
        }
    };

    if (style == PlotStyle::Line) {
        const double xlo = static_cast<double>(*xs.begin()), xhi = static_cast<double>(*xs.rbegin());
        Axis xa;
        xa.lo = xlo;
        xa.hi = xhi > xlo ? xhi : xlo + 1;
        xa.step = nice_step(xa.hi - xa.lo, 8);
        xa.pixel_lo = x0;
        xa.pixel_hi = x1;
        for (double t : xa.ticks()) {
            svg += "<line x1=\"" + num(xa.map(t)) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(xa.map(t)) + "\" y2=\"" +
                   num(y0 + 5) + "\" stroke=\"black\"/>\n";
            svg += "<text x=\"" + num(xa.map(t)) + "\" y=\"" + num(y0 + 18) + "\" text-anchor=\"middle\">" +
                   tick_label(t) + "</text>\n";
        }
        for (const auto& g : groups) {
            if (envelope) {
                // Polygon per gap-free run of points defined for both min and max.
                const auto& lo = g.stats.at(Statistic::Min).points;
                const auto& hi = g.stats.at(Statistic::Max).points;
                std::size_t i = 0;
                while (i < lo.size()) {
                    if (!lo[i].y || !hi[i].y) {
                        ++i;
                        continue;
                    }
                    std::size_t j = i;
                    while (j < lo.size() && lo[j].y && hi[j].y) ++j;
                    std::string pts;
                    for (std::size_t k = i; k < j; ++k)
                        pts += num(xa.map(static_cast<double>(hi[k].x))) + "," + num(ya.map(*hi[k].y)) + " ";
                    for (std::size_t k = j; k-- > i;)
                        pts += num(xa.map(static_cast<double>(lo[k].x))) + "," + num(ya.map(*lo[k].y)) + " ";
                    pts.pop_back();
                    svg += "<polygon class=\"envelope\" points=\"" + pts + "\" fill=\"" + g.color +
                           "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
                    i = j;
                }
            }
            for (const auto& [s, ser] : g.stats) {
                if (envelope && (s == Statistic::Min || s == Statistic::Max)) continue;
                std::string pts;
                auto flush = [&]() {
                    if (pts.empty()) return;
                    pts.pop_back();
                    svg += "<polyline class=\"series\" data-statistic=\"" + statistic_name(s) + "\" points=\"" + pts +
                           "\" fill=\"none\" stroke=\"" + g.color + "\" stroke-width=\"2\"" + dash_for(s) + "/>\n";
                    pts.clear();
                };
                for (const auto& p : ser.points) {
                    if (!p.y) {
                        flush();
                        continue;
                    }
                    pts += num(xa.map(static_cast<double>(p.x))) + "," + num(ya.map(*p.y)) + " ";
                }
                flush();
            }
        }
    } else {
        // Bars: one cluster per range value, one bar per (group, statistic).
        const std::vector<std::int64_t> cats(xs.begin(), xs.end());
        const double slot = (x1 - x0) / static_cast<double>(cats.size());
        const std::size_t nbars = groups.size() * stats.size();
        const double bw = slot * 0.8 / static_cast<double>(nbars);
        for (std::size_t c = 0; c < cats.size(); ++c) {
            const double cx = x0 + slot * (static_cast<double>(c) + 0.1);
            std::size_t b = 0;
            for (const auto& g : groups)
                for (auto s : stats) {
                    const auto& pts = g.stats.at(s).points;
                    auto it = std::find_if(pts.begin(), pts.end(), [&](const SeriesPoint& p) { return p.x == cats[c]; });
                    const double bx = cx + bw * static_cast<double>(b++);
                    if (it == pts.end() || !it->y) continue;
                    const double top = ya.map(std::max(*it->y, 0.0)), base = ya.map(std::min(*it->y, 0.0));
                    svg += "<rect class=\"bar\" data-statistic=\"" + statistic_name(s) + "\" x=\"" + num(bx) +
                           "\" y=\"" + num(top) + "\" width=\"" + num(bw * 0.9) + "\" height=\"" + num(base - top) +
                           "\" fill=\"" + g.color + "\"/>\n";
                    if (groups.size() * cats.size() == 1 || cats.size() == 1)
                        svg += "<text x=\"" + num(bx + bw * 0.45) + "\" y=\"" + num(y0 + 14) +
                               "\" text-anchor=\"middle\" font-size=\"10\">" + statistic_name(s) + "</text>\n";
                }
            if (cats.size() > 1 || reports.front().report->ranged())
                svg += "<text x=\"" + num(x0 + slot * (static_cast<double>(c) + 0.5)) + "\" y=\"" + num(y0 + 28) +
                       "\" text-anchor=\"middle\">" + std::to_string(cats[c]) + "</text>\n";
        }
    }

    // Legend: one entry per series group, then the statistic key.
    double ly = kTop + 10;
    const double lx = W - kRight + 15;
    for (const auto& g : groups) {
        svg += "<g class=\"legend-entry\"><rect x=\"" + num(lx) + "\" y=\"" + num(ly - 9) +
               "\" width=\"14\" height=\"10\" fill=\"" + g.color + "\"/><text x=\"" + num(lx + 20) + "\" y=\"" +
               num(ly) + "\">" + escape(g.label) + "</text></g>\n";
        ly += 18;
    }
    if (style == PlotStyle::Line) {
        ly += 8;
        for (auto s : stats) {
            if (envelope && s == Statistic::Max) continue;
            const std::string name = envelope && s == Statistic::Min ? "min-max" : statistic_name(s);
            svg += "<g class=\"stat-key\">";
            if (envelope && s == Statistic::Min)
                svg += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 9) +
                       "\" width=\"14\" height=\"10\" fill=\"#444444\" fill-opacity=\"0.2\"/>";
            else
                svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 14) + "\" y2=\"" +
                       num(ly - 4) + "\" stroke=\"#444444\" stroke-width=\"2\"" + dash_for(s) + "/>";
            svg += "<text x=\"" + num(lx + 20) + "\" y=\"" + num(ly) + "\">" + name + "</text></g>\n";
            ly += 16;
        }
    }
    svg += "</svg>\n";
    out.svg = std::move(svg);
    return out;
}

}  // namespace kernbench
