#include "kernbench/error.hpp"
#include "kernbench/metrics.hpp"
#include "kernbench/report.hpp"
#include "kernbench/unroll.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>

using namespace kernbench;

namespace {

Experiment example(const std::string& name) {
    return load_experiment(std::string(KERNBENCH_EXPERIMENTS_DIR) + "/" + name + ".kbe");
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Io;
}

/// Report text with `line(k)` as the k-th measured line (init lines read "1").
std::string synthetic(const Experiment& e, const std::function<std::string(std::size_t)>& line,
                      long drop = 0) {
    std::string s = report_header(e, "clock-scaled", false);
    std::size_t k = 0;
    for (const auto& l : stream_layout(e)) {
        s += segment_line(l.nthreads) + "\n";
        for (std::size_t i = 0; i < l.init_lines; ++i) s += "1\n";
        for (std::size_t i = 0; i + (drop > 0 ? static_cast<std::size_t>(drop) : 0) < l.measured_lines; ++i)
            s += line(k++) + "\n";
    }
    return s;
}

Experiment small_gemm(std::int64_t nreps) {
    Experiment e;
    e.nreps = nreps;
    e.calls.push_back({"dgemm", {"N", "N", "10", "10", "10", "1", "A", "10", "B", "10", "0", "C", "10"}});
    return e;
}

}  // namespace

TEST_CASE("metric table for one measurement") {
    Measurement m;
    m.cycles = 272551028;
    m.flops = 2000000000;
    const MachineSpec machine = default_machine();
    REQUIRE(machine.frequency_hz == 2.6e9);
    REQUIRE(machine.peak_double == 8.0);
    auto get = [&](MetricKind k) { return *apply_metric(m, {k, 0}, machine, Dtype::Double); };
    CHECK(std::abs(get(MetricKind::TimeSeconds) * 1e3 - 104.8) <= 0.1);
    CHECK(std::abs(get(MetricKind::GflopsPerSecond) - 19.1) <= 0.05);
    CHECK(std::abs(get(MetricKind::FlopsPerCycle) - 7.3) <= 0.05);
    CHECK(std::abs(get(MetricKind::Efficiency) * 100 - 91.7) <= 0.1);
    CHECK(get(MetricKind::Cycles) == 272551028.0);
}

TEST_CASE("metric edge cases") {
    Measurement zero;
    zero.flops = 100;
    MachineSpec machine = default_machine();
    CHECK_FALSE(apply_metric(zero, {MetricKind::GflopsPerSecond, 0}, machine, Dtype::Double));
    CHECK_FALSE(apply_metric(zero, {MetricKind::FlopsPerCycle, 0}, machine, Dtype::Double));
    CHECK(apply_metric(zero, {MetricKind::TimeSeconds, 0}, machine, Dtype::Double) == 0.0);
    MachineSpec no_peak;
    no_peak.peak_double.reset();
    CHECK(code_of([&] { apply_metric(zero, {MetricKind::Efficiency, 0}, no_peak, Dtype::Double); }) ==
          ErrorCode::UndefinedMetric);
    CHECK(code_of([&] { apply_metric(zero, {MetricKind::Counter, 2}, machine, Dtype::Double); }) ==
          ErrorCode::UndefinedMetric);
    Measurement one;
    one.cycles = 100;
    one.flops = 1600;
    CHECK(*apply_metric(one, {MetricKind::Efficiency, 0}, machine, Dtype::Single) == 1.0);
}

TEST_CASE("metric and statistic names") {
    for (auto k : {MetricKind::Cycles, MetricKind::TimeSeconds, MetricKind::GflopsPerSecond, MetricKind::FlopsPerCycle,
                   MetricKind::Efficiency}) {
        Metric m{k, 0};
        CHECK(parse_metric(metric_name(m)) == m);
    }
    CHECK(parse_metric("gflops") == Metric{MetricKind::GflopsPerSecond, 0});
    CHECK(parse_metric("time") == Metric{MetricKind::TimeSeconds, 0});
    CHECK(parse_metric("counter[1]") == Metric{MetricKind::Counter, 1});
    CHECK(parse_metric("L1_MISS", {"CYC", "L1_MISS"}) == Metric{MetricKind::Counter, 1});
    CHECK(code_of([] { parse_metric("speed"); }) == ErrorCode::IllegalArgument);
    for (auto s : kAllStatistics) CHECK(parse_statistic(statistic_name(s)) == s);
    CHECK(parse_statistic("standard-deviation") == Statistic::Std);
    CHECK(code_of([] { parse_statistic("mode"); }) == ErrorCode::IllegalArgument);
}

TEST_CASE("statistics examples") {
    const std::vector<double> v{9, 1, 4, 2, 3};
    CHECK(apply_statistic(v, Statistic::Min, true) == 1);
    CHECK(apply_statistic(v, Statistic::Max, true) == 4);
    CHECK(apply_statistic(v, Statistic::Max, false) == 9);
    CHECK(apply_statistic(v, Statistic::Median, true) == 2.5);
    CHECK(apply_statistic(v, Statistic::Median, false) == 3);
    CHECK(apply_statistic(v, Statistic::Mean, true) == 2.5);
    CHECK(apply_statistic(v, Statistic::Std, true) == doctest::Approx(std::sqrt(1.25)));
    CHECK(code_of([] { apply_statistic(std::vector<double>{1}, Statistic::Mean, true); }) == ErrorCode::EmptyStatistic);
    CHECK(code_of([] { apply_statistic(std::vector<double>{}, Statistic::Mean, false); }) == ErrorCode::EmptyStatistic);
}

TEST_CASE("statistics over random vectors") {
    std::mt19937_64 g(41);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + g() % 40;
        std::vector<double> v(n);
        for (auto& x : v) x = u(g);
        // a huge first value must never influence discard-first results
        std::vector<double> spiked = v;
        spiked[0] = 1e300;
        const std::vector<double> tail(v.begin() + 1, v.end());
        for (auto s : kAllStatistics) {
            CHECK(apply_statistic(v, s, true) == apply_statistic(tail, s, false));
            CHECK(apply_statistic(spiked, s, true) == apply_statistic(v, s, true));
        }
        // mean identity: n * mean equals the sum
        long double sum = 0;
        for (double x : tail) sum += x;
        const double mean = apply_statistic(v, Statistic::Mean, true);
        CHECK(std::abs(mean * static_cast<double>(tail.size()) - static_cast<double>(sum)) <=
              1e-9 * (1 + std::abs(static_cast<double>(sum))));
        // ordering and the variance identity E[x^2] - mean^2 = std^2
        const double lo = apply_statistic(v, Statistic::Min, true), hi = apply_statistic(v, Statistic::Max, true),
                     med = apply_statistic(v, Statistic::Median, true), sd = apply_statistic(v, Statistic::Std, true);
        CHECK((lo <= med && med <= hi && lo <= mean && mean <= hi));
        long double sq = 0;
        for (double x : tail) sq += static_cast<long double>(x) * x;
        const double var = static_cast<double>(sq / tail.size()) - mean * mean;
        CHECK(sd * sd == doctest::Approx(var).epsilon(1e-6).scale(1e3));
    }
}

TEST_CASE("format_value reads back exactly") {
    std::mt19937_64 g(42);
    for (int i = 0; i < 10000; ++i) {
        double x;
        std::uint64_t bits = g();
        std::memcpy(&x, &bits, sizeof x);
        if (!std::isfinite(x)) continue;
        CHECK(std::strtod(format_value(x).c_str(), nullptr) == x);
    }
    CHECK(format_value(0.5) == "0.5");
    CHECK(format_value(3) == "3");
}

TEST_CASE("parse attaches flops and keeps the raw layout") {
    Experiment e = small_gemm(3);
    Report r = parse_report(synthetic(e, [](std::size_t k) { return std::to_string(1000 + k); }));
    CHECK(r.timer == "clock-scaled");
    CHECK_FALSE(r.counters_available);
    CHECK_FALSE(r.ranged());
    REQUIRE(r.points.size() == 1);
    REQUIRE(r.points[0].raw.size() == 3);
    for (std::size_t rep = 0; rep < 3; ++rep) {
        const Measurement& m = r.points[0].raw[rep].at(0).at(0);
        CHECK(m.cycles == 1000 + rep);
        CHECK(m.flops == 2000);
    }
    CHECK(r.experiment == e);
    CHECK(r.dtype() == Dtype::Double);
    auto red = reduce(r);
    CHECK(red.at(0).at(2).cycles == 1002);
}

TEST_CASE("line count mismatch states expected and found") {
    Experiment e = example("exp7_trinv");
    e.nreps = 1;
    const auto text = synthetic(e, [](std::size_t) { return std::string("5"); }, 1);
    try {
        parse_report(text);
        FAIL("no throw");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::LineCountMismatch);
        const std::string m = err.what();
        CHECK(m.find("30 measured") != std::string::npos);
        CHECK(m.find("found 32") != std::string::npos);
    }
    CHECK(parse_report(synthetic(e, [](std::size_t) { return std::string("5"); })).points.size() == 1);
}

TEST_CASE("malformed reports") {
    Experiment e = small_gemm(2);
    auto ok = synthetic(e, [](std::size_t) { return std::string("7"); });
    CHECK(code_of([&] { parse_report(synthetic(e, [](std::size_t) { return std::string("7 8"); })); }) ==
          ErrorCode::MalformedLine);
    CHECK(code_of([&] { parse_report(synthetic(e, [](std::size_t) { return std::string("-7"); })); }) ==
          ErrorCode::MalformedLine);
    CHECK(code_of([&] { parse_report(ok.substr(0, ok.find("%%%"))); }) == ErrorCode::Syntax);
    auto bad_segment = ok;
    bad_segment.replace(bad_segment.find("nthreads=1"), 10, "nthreads=x");
    CHECK(code_of([&] { parse_report(bad_segment); }) == ErrorCode::MalformedLine);
    auto no_segment = ok;
    no_segment.erase(no_segment.find("segment:"), std::string("segment: nthreads=1\n").size());
    CHECK(code_of([&] { parse_report(no_segment); }) == ErrorCode::MalformedLine);
    CHECK(code_of([] { load_report("/nonexistent.kbr"); }) == ErrorCode::Io);
}

TEST_CASE("failures are recorded and excluded; undefined values become gaps") {
    Experiment e = small_gemm(4);
    Report r = parse_report(synthetic(e, [](std::size_t k) { return k == 2 ? std::string("999999 FAIL") : std::to_string(100 * (k + 1)); }));
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0] == Coordinate{0, 2, 0, 0});
    Series s = series(r, {{MetricKind::Cycles, 0}, Statistic::Max, true}, default_machine());
    CHECK(*s.points.at(0).y == 400);  // rep 2 failed, rep 0 discarded
    Report zero = parse_report(synthetic(e, [](std::size_t) { return std::string("0"); }));
    Series z = series(zero, {{MetricKind::GflopsPerSecond, 0}, Statistic::Median, true}, default_machine());
    CHECK_FALSE(z.points.at(0).y);
    Report single = parse_report(synthetic(small_gemm(1), [](std::size_t) { return std::string("10"); }));
    CHECK(code_of([&] { series(single, {{MetricKind::Cycles, 0}, Statistic::Median, true}, default_machine()); }) ==
          ErrorCode::EmptyStatistic);
    CHECK(*series(single, {{MetricKind::Cycles, 0}, Statistic::Median, false}, default_machine()).points[0].y == 10);
}

TEST_CASE("series lengths, breakdowns and csv") {
    Experiment e = example("exp5_range");
    e.nreps = 3;
    Report r = parse_report(synthetic(e, [](std::size_t k) { return std::to_string(1000 + k); }));
    Series s = series(r, {{MetricKind::FlopsPerCycle, 0}, Statistic::Median, true}, default_machine());
    REQUIRE(s.points.size() == 40);
    CHECK(s.points.front().x == 50);
    CHECK(s.points.back().x == 2000);
    CHECK(s.label == "total");

    Experiment lin = example("exp4_linsys");
    lin.nreps = 2;
    Report lr = parse_report(synthetic(lin, [](std::size_t k) { return std::to_string(100 + k); }));
    auto b = breakdown_series(lr, {{MetricKind::Cycles, 0}, Statistic::Min, true}, default_machine());
    REQUIRE(b.size() == 4);
    CHECK(b[0].label == "1:dgetrf");
    CHECK(b[1].label == "2:dtrsm");
    CHECK(b[2].label == "3:dtrsm");
    CHECK(b[3].label == "total");
    // rep 1 holds lines 3, 4, 5
    CHECK(*b[0].points[0].y == 103);
    CHECK(*b[3].points[0].y == 103 + 104 + 105);

    Report par = parse_report(synthetic(example("exp9_partrsv"), [](std::size_t) { return std::string("50"); }));
    CHECK(code_of([&] { breakdown_series(par, {{MetricKind::Cycles, 0}, Statistic::Min, true}, default_machine()); }) ==
          ErrorCode::IllegalArgument);
    // a parallel block carries the flops of all its calls: 8 solves of order 2000
    CHECK(reduce(par)[0][0].flops == 8ull * 2000 * 2000);

    const std::string csv = stats_csv(lr, {{MetricKind::Cycles, 0}}, {Statistic::Min, Statistic::Max}, false,
                                      default_machine());
    CHECK(csv == "range-value,metric,statistic,value\n0,cycles,min,303\n0,cycles,max,312\n");
}

TEST_CASE("inner sum range accumulates calls and inner values") {
    Experiment e = example("exp7_trinv");
    e.nreps = 2;
    Report r = parse_report(synthetic(e, [](std::size_t) { return std::string("3"); }));
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].inner_values.size() == 10);
    auto red = reduce(r);
    CHECK(red[0][1].cycles == 90);
    // flops: sum over j of trmm nb j^2 + syrk nb(nb+1)j + trti2 (nb^3 + 2 nb)/3
    std::uint64_t want = 0;
    for (std::uint64_t j = 0; j <= 900; j += 100) want += 100 * j * j + 100 * 101 * j + (1000000 + 200) / 3;
    CHECK(red[0][1].flops == want);
}
