#include "kernbench/report.hpp"

#include "kernbench/call_eval.hpp"
#include "kernbench/command.hpp"
#include "kernbench/error.hpp"
#include "kernbench/kernels.hpp"
#include "kernbench/sampler.hpp"
#include "kernbench/unroll.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace kernbench {

Dtype Report::dtype() const {
    for (const auto& c : experiment.calls)
        if (has_kernel(c.kernel) && lookup_signature(c.kernel).dtype == Dtype::Double) return Dtype::Double;
    return experiment.calls.empty() ? Dtype::Double : Dtype::Single;
}

const RangePoint& Report::point(std::int64_t range_value) const {
    for (const auto& p : points)
        if (p.value == range_value) return p;
    throw Error(ErrorCode::IllegalArgument, "report has no range value " + std::to_string(range_value));
}

std::string report_header(const Experiment& e, std::string_view timer, bool counters_available) {
    std::string s = serialize(e);
    s += kReportSeparator;
    s += "\ntimer: ";
    s += timer;
    s += "\ncounters-available: ";
    s += counters_available ? "yes" : "no";
    s += '\n';
    return s;
}

std::string segment_line(std::int64_t nthreads) {
    return "segment: nthreads=" + std::to_string(nthreads);
}

namespace {

struct RawSegment {
    std::int64_t nthreads = 0;
    std::size_t first_line = 0;
    std::vector<std::pair<std::size_t, std::string>> lines;  // (file line number, text)
};

Measurement parse_result(const std::string& text, std::size_t line_no, std::size_t ncounters) {
    auto tokens = split_ws(text);
    Measurement m;
    if (!tokens.empty() && tokens.back() == kFailureMarker) {
        m.failed = true;
        tokens.pop_back();
    }
    if (tokens.size() != 1 + ncounters)
        throw Error(ErrorCode::MalformedLine, "report line " + std::to_string(line_no) + ": expected " +
                                                  std::to_string(1 + ncounters) + " numbers, got '" + text + "'");
    std::vector<std::uint64_t> v;
    for (const auto& t : tokens) {
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
        if (ec != std::errc() || p != t.data() + t.size())
            throw Error(ErrorCode::MalformedLine,
                        "report line " + std::to_string(line_no) + ": '" + t + "' is not a non-negative integer");
        v.push_back(x);
    }
    m.cycles = v[0];
    m.counters.assign(v.begin() + 1, v.end());
    return m;
}

std::uint64_t call_flops(const CallSpec& c, const Bindings& pt) {
    EvaluatedCall ev = evaluate_call(c, pt);
    return flop_count(*ev.signature, ev.bindings);
}

}  // namespace

Report parse_report(std::string_view text) {
    // Split at the separator line.
    std::istringstream in{std::string(text)};
    std::string line, experiment_text;
    std::size_t line_no = 0;
    bool separated = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == kReportSeparator) {
            separated = true;
            break;
        }
        experiment_text += line;
        experiment_text += '\n';
    }
    if (!separated) throw Error(ErrorCode::Syntax, "report: missing '" + std::string(kReportSeparator) + "' line");

    Report r;
    r.experiment = deserialize(experiment_text);

    std::vector<RawSegment> segments;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens[0] == "segment:") {
            const std::string prefix = "nthreads=";
            std::int64_t n = 0;
            bool ok = tokens.size() == 2 && tokens[1].rfind(prefix, 0) == 0;
            if (ok) {
                auto s = std::string_view(tokens[1]).substr(prefix.size());
                auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
                ok = ec == std::errc() && p == s.data() + s.size();
            }
            if (!ok) throw Error(ErrorCode::MalformedLine, "report line " + std::to_string(line_no) + ": bad segment line");
            segments.push_back({n, line_no, {}});
        } else if (segments.empty()) {
            if (tokens[0] == "timer:" && tokens.size() == 2) r.timer = tokens[1];
            else if (tokens[0] == "counters-available:" && tokens.size() == 2) r.counters_available = tokens[1] == "yes";
            else if (tokens[0].empty() || tokens[0].back() != ':')
                throw Error(ErrorCode::MalformedLine,
                            "report line " + std::to_string(line_no) + ": result line before the first segment");
            // other metadata is ignored
        } else {
            segments.back().lines.emplace_back(line_no, line);
        }
    }

    const auto layout = stream_layout(r.experiment);
    if (segments.size() != layout.size())
        throw Error(ErrorCode::LineCountMismatch, "report: expected " + std::to_string(layout.size()) +
                                                      " segments, found " + std::to_string(segments.size()));

    const Experiment& e = r.experiment;
    const std::size_t ncounters = e.counters.size();
    for (std::size_t s = 0; s < layout.size(); ++s) {
        const StreamLayout& l = layout[s];
        const RawSegment& seg = segments[s];
        const std::size_t expected = l.init_lines + l.measured_lines;
        if (seg.lines.size() != expected)
            throw Error(ErrorCode::LineCountMismatch,
                        "report segment " + std::to_string(s + 1) + " (nthreads=" + std::to_string(seg.nthreads) +
                            "): expected " + std::to_string(expected) + " result lines (" +
                            std::to_string(l.init_lines) + " initialisation + " + std::to_string(l.measured_lines) +
                            " measured), found " + std::to_string(seg.lines.size()));
        if (seg.nthreads != l.nthreads)
            throw Error(ErrorCode::LineCountMismatch, "report segment " + std::to_string(s + 1) + ": expected nthreads=" +
                                                          std::to_string(l.nthreads) + ", found " +
                                                          std::to_string(seg.nthreads));
        std::size_t next = l.init_lines;
        for (auto rv : l.range_values) {
            RangePoint p;
            p.value = rv;
            p.nthreads = l.nthreads;
            const RangeSpec* inner = e.inner();
            p.inner_values = inner ? e.inner_values(rv) : std::vector<std::int64_t>{};
            const std::size_t ninner = inner ? p.inner_values.size() : 1;

            // Flop counts do not depend on the repetition.
            std::vector<std::vector<std::uint64_t>> flops(ninner, std::vector<std::uint64_t>(e.calls.size()));
            for (std::size_t i = 0; i < ninner; ++i) {
                const Bindings pt = e.point(rv, inner ? std::optional(p.inner_values[i]) : std::nullopt);
                for (std::size_t c = 0; c < e.calls.size(); ++c) flops[i][c] = call_flops(e.calls[c], pt);
            }

            p.raw.resize(static_cast<std::size_t>(e.nreps));
            for (std::int64_t rep = 0; rep < e.nreps; ++rep) {
                auto& slot = p.raw[static_cast<std::size_t>(rep)];
                auto take = [&]() {
                    const auto& [ln, txt] = seg.lines[next++];
                    return parse_result(txt, ln, ncounters);
                };
                if (e.parallel()) {
                    Measurement m = take();
                    for (const auto& row : flops)
                        for (auto f : row) m.flops += f;
                    if (m.failed) r.failures.push_back({rv, rep, 0, 0});
                    slot.push_back({std::move(m)});
                } else {
                    slot.resize(ninner);
                    for (std::size_t i = 0; i < ninner; ++i)
                        for (std::size_t c = 0; c < e.calls.size(); ++c) {
                            Measurement m = take();
                            m.flops = flops[i][c];
                            if (m.failed) r.failures.push_back({rv, rep, i, c});
                            slot[i].push_back(std::move(m));
                        }
                }
            }
            r.points.push_back(std::move(p));
        }
    }
    return r;
}

Report load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read report file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_report(ss.str());
}

namespace {

void accumulate(Measurement& into, const Measurement& m) {
    into.cycles += m.cycles;
    into.flops += m.flops;
    into.failed = into.failed || m.failed;
    if (into.counters.size() < m.counters.size()) into.counters.resize(m.counters.size(), 0);
    for (std::size_t k = 0; k < m.counters.size(); ++k) into.counters[k] += m.counters[k];
}

}  // namespace

std::vector<std::vector<Measurement>> reduce(const Report& r) {
    std::vector<std::vector<Measurement>> out;
    for (const auto& p : r.points) {
        std::vector<Measurement> reps;
        for (const auto& rep : p.raw) {
            Measurement total;
            total.counters.assign(r.experiment.counters.size(), 0);
            for (const auto& inner : rep)
                for (const auto& m : inner) accumulate(total, m);
            reps.push_back(std::move(total));
        }
        out.push_back(std::move(reps));
    }
    return out;
}

std::vector<std::vector<Measurement>> reduce_call(const Report& r, std::size_t call) {
    if (r.experiment.parallel())
        throw Error(ErrorCode::IllegalArgument, "per-call breakdown is not available for a parallel inner range");
    if (call >= r.experiment.calls.size())
        throw Error(ErrorCode::IllegalArgument, "call index " + std::to_string(call) + " out of range");
    std::vector<std::vector<Measurement>> out;
    for (const auto& p : r.points) {
        std::vector<Measurement> reps;
        for (const auto& rep : p.raw) {
            Measurement total;
            total.counters.assign(r.experiment.counters.size(), 0);
            for (const auto& inner : rep) accumulate(total, inner[call]);
            reps.push_back(std::move(total));
        }
        out.push_back(std::move(reps));
    }
    return out;
}

}  // namespace kernbench
