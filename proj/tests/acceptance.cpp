// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "kernbench/blas.hpp"
#include "kernbench/error.hpp"
#include "kernbench/experiment.hpp"
#include "kernbench/kernels.hpp"
#include "kernbench/metrics.hpp"
#include "kernbench/plot.hpp"
#include "kernbench/report.hpp"
#include "kernbench/sampler.hpp"
#include "kernbench/service.hpp"
#include "kernbench/submit.hpp"
#include "kernbench/unroll.hpp"

#include "oracles.hpp"
#include "vary_check.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <unistd.h>

using namespace kernbench;
using oracle::Matrix;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

Experiment example(const std::string& name) {
    return load_experiment(std::string(KERNBENCH_EXPERIMENTS_DIR) + "/" + name + ".kbe");
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects the reasons a criterion failed.
struct Check {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
    }
};

// 1. metric table ------------------------------------------------------------

std::string metric_table(Check& c) {
    Measurement m;
    m.cycles = 272551028;
    m.flops = 2000000000;
    const MachineSpec machine = default_machine();
    auto get = [&](MetricKind k) { return apply_metric(m, {k, 0}, machine, Dtype::Double).value(); };
    const double ms = get(MetricKind::TimeSeconds) * 1e3, gf = get(MetricKind::GflopsPerSecond),
                 fpc = get(MetricKind::FlopsPerCycle), eff = get(MetricKind::Efficiency) * 100;
    c.expect(std::abs(ms - 104.8) <= 0.1, "time " + std::to_string(ms) + " ms");
    c.expect(std::abs(gf - 19.1) <= 0.05, "gflops/s " + std::to_string(gf));
    c.expect(std::abs(fpc - 7.3) <= 0.05, "flops/cycle " + std::to_string(fpc));
    c.expect(std::abs(eff - 91.7) <= 0.1, "efficiency " + std::to_string(eff) + "%");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.1f ms, %.2f Gflops/s, %.2f flops/cycle, %.1f%% efficiency", ms, gf, fpc, eff);
    return buf;
}

// 2. unroll counts -----------------------------------------------------------

std::string unroll_counts(Check& c) {
    auto e5 = unroll(example("exp5_range"));
    const std::size_t n5 = e5.size() == 1 ? e5[0].call_lines() : 0;
    c.expect(n5 == 400, "range experiment: " + std::to_string(n5) + " call lines");

    auto e7 = unroll(example("exp7_trinv"));
    std::size_t n7 = 0, groups = 0;
    if (e7.size() == 1) {
        n7 = e7[0].call_lines();
        // groups of identical call sequences, one per repetition
        std::vector<std::string> calls;
        bool measured = false;
        for (const auto& cmd : e7[0].commands) {
            if (std::holds_alternative<cmd::Go>(cmd)) measured = true;
            else if (measured)
                if (const auto* call = std::get_if<cmd::Call>(&cmd)) calls.push_back(format_command(*call));
        }
        const std::size_t per = calls.size() / 10;
        bool same = per > 0 && calls.size() % per == 0;
        for (std::size_t i = per; same && i < calls.size(); ++i) same = calls[i] == calls[i % per];
        groups = same ? calls.size() / per : 0;
    }
    c.expect(n7 == 300, "inner-range experiment: " + std::to_string(n7) + " call lines");
    c.expect(groups == 10, "inner-range experiment: " + std::to_string(groups) + " repetition groups");

    auto e9 = unroll(example("exp9_partrsv"));
    const std::size_t n9 = e9.size() == 1 ? e9[0].measured_lines : 0;
    c.expect(n9 == 10, "parallel experiment: " + std::to_string(n9) + " result lines");
    return std::to_string(n5) + " / " + std::to_string(n7) + " in " + std::to_string(groups) + " groups / " +
           std::to_string(n9);
}

// 3. kernel oracles ----------------------------------------------------------

DataRef ref_of(Matrix& m) { return {reinterpret_cast<std::byte*>(m.data()), m.v.size(), Dtype::Double}; }

void run_kernel(std::string_view name, std::vector<ArgValue> values) {
    ExecContext ctx{CounterRng(1), nullptr};
    execute_kernel({&lookup_signature(name), std::move(values)}, ctx);
}

std::string kernel_oracles(Check& c) {
    const auto t0 = Clock::now();
    std::mt19937_64 g(2024);
    auto dim = [&](std::int64_t lo) { return std::uniform_int_distribution<std::int64_t>(lo, 64)(g); };
    double worst_gemm = 0, worst_lu = 0, worst_gesv = 0, worst_inv = 0;
    for (int inst = 0; inst < 200; ++inst) {
        switch (inst % 5) {
            case 0: {
                const char ta = "NT"[g() % 2], tb = "NT"[g() % 2];
                const std::int64_t m = dim(1), n = dim(1), k = dim(1);
                Matrix a = ta == 'N' ? oracle::random_matrix(g, m, k, m + 3) : oracle::random_matrix(g, k, m, k + 3);
                Matrix b = tb == 'N' ? oracle::random_matrix(g, k, n, k + 1) : oracle::random_matrix(g, n, k, n + 1);
                Matrix cm = oracle::random_matrix(g, m, n, m + 2), want = cm;
                oracle::gemm(ta, tb, m, n, k, 1.25, a, b, 0.5, want);
                run_kernel("dgemm", {ta, tb, m, n, k, 1.25, ref_of(a), a.ld, ref_of(b), b.ld, 0.5, ref_of(cm), cm.ld});
                worst_gemm = std::max(worst_gemm, oracle::diff_frobenius(cm, want) / oracle::frobenius(want));
                break;
            }
            case 1: {
                const std::int64_t m = dim(1), n = dim(1), mn = std::min(m, n);
                Matrix a = oracle::random_matrix(g, m, n, m + 1), a0 = oracle::window(a);
                std::vector<ref::index_t> piv(static_cast<std::size_t>(mn));
                c.expect(ref::getrf<double>(m, n, a.data(), a.ld, piv.data()) == 0, "getrf reported singular");
                Matrix l(m, mn), u(mn, n);
                for (std::int64_t i = 0; i < m; ++i)
                    for (std::int64_t j = 0; j < mn; ++j) l(i, j) = i == j ? 1.0 : i > j ? a(i, j) : 0.0;
                for (std::int64_t i = 0; i < mn; ++i)
                    for (std::int64_t j = i; j < n; ++j) u(i, j) = a(i, j);
                for (std::int64_t k = 0; k < mn; ++k)
                    for (std::int64_t j = 0; j < n; ++j) std::swap(a0(k, j), a0(piv[static_cast<std::size_t>(k)], j));
                worst_lu = std::max(worst_lu, oracle::diff_frobenius(oracle::multiply(l, u), a0) / oracle::frobenius(a0));
                break;
            }
            case 2: {
                const std::int64_t n = dim(1), nrhs = dim(1);
                Matrix a = oracle::random_matrix(g, n, n, n + 2), a0 = oracle::window(a);
                Matrix b = oracle::random_matrix(g, n, nrhs, n), b0 = b;
                run_kernel("dgesv", {n, nrhs, ref_of(a), a.ld, ref_of(b), b.ld});
                Matrix ax = oracle::multiply(a0, b);
                // normwise backward error ||A X - B|| / (||A|| ||X||)
                worst_gesv = std::max(worst_gesv, oracle::diff_frobenius(ax, b0) /
                                                      (oracle::frobenius(a0) * oracle::frobenius(b)));
                break;
            }
            default: {
                const bool lower = g() % 2, unit = g() % 2, blocked = inst % 5 == 4;
                const std::int64_t n = dim(1);
                Matrix a = oracle::random_triangular(g, n, lower, n + 1);
                const Matrix t = oracle::triangle(oracle::window(a), lower, unit);
                const char uplo = lower ? 'L' : 'U', diag = unit ? 'U' : 'N';
                if (blocked)
                    ref::trtri<double>(uplo, diag, n, a.data(), a.ld, std::uniform_int_distribution<std::int64_t>(1, 32)(g));
                else
                    run_kernel("dtrti2", {uplo, diag, n, ref_of(a), a.ld});
                const Matrix inv = oracle::triangle(oracle::window(a), lower, unit);
                const Matrix prod = oracle::multiply(t, inv);
                worst_inv = std::max(worst_inv, oracle::diff_frobenius(prod, oracle::identity(n)) /
                                                    (oracle::frobenius(t) * oracle::frobenius(inv)));
            }
        }
    }
    c.expect(worst_gemm <= 1e-13, "gemm relative error " + std::to_string(worst_gemm));
    c.expect(worst_lu <= 1e-10, "P A - L U relative residual " + std::to_string(worst_lu));
    c.expect(worst_gesv <= 1e-8, "gesv scaled residual " + std::to_string(worst_gesv));
    c.expect(worst_inv <= 1e-10, "triangular inverse residual " + std::to_string(worst_inv));

    // blocked inverse through the sampler: the trmm/trti2 block steps as a command stream
    auto max_abs = [](const Matrix& x, const Matrix& y) {
        double d = 0;
        for (std::int64_t j = 0; j < x.cols; ++j)
            for (std::int64_t i = 0; i < x.rows; ++i) d = std::max(d, std::abs(x(i, j) - y(i, j)));
        return d;
    };
    const std::int64_t n = 200;
    const fs::path file = fs::temp_directory_path() / ("kernbench-acceptance-" + std::to_string(::getpid()) + ".bin");
    double worst_block = 0;
    for (std::int64_t nb : {20, 50, 100}) {
        const Matrix a = oracle::random_triangular(g, n, true);
        std::ofstream(file, std::ios::binary)
            .write(reinterpret_cast<const char*>(a.v.data()), static_cast<std::streamsize>(a.v.size() * sizeof(double)));
        std::string stream = "dmalloc A 40000\ndreadfile " + file.string() + " 40000 A\ngo\n";
        for (std::int64_t j = 0; j < n; j += nb) {
            const std::string diag = "A+" + std::to_string(j + j * n);
            stream += "dtrmm R L N N " + std::to_string(nb) + " " + std::to_string(j) + " 1 A 200 A+" +
                      std::to_string(j) + " 200\n";
            stream += "dtrti2 L N " + std::to_string(nb) + " " + diag + " 200\n";
            stream += "dtrmm L L N N " + std::to_string(nb) + " " + std::to_string(j) + " -1 " + diag + " 200 A+" +
                      std::to_string(j) + " 200\n";
        }
        stream += "go\n";
        NullCounterProvider np;
        SamplerConfig cfg;
        cfg.timer = TimerBackend::ClockScaled;
        Sampler sampler(cfg, np);
        std::istringstream in(stream);
        std::ostringstream out;
        sampler.run_text(in, out);
        Matrix blocked(n, n);
        const auto bytes = sampler.memory().bytes("A");
        std::memcpy(blocked.data(), bytes.data(), std::min(bytes.size(), blocked.v.size() * sizeof(double)));

        Matrix unblocked = a, library = a;
        ref::trti2<double>('L', 'N', n, unblocked.data(), unblocked.ld);
        ref::trtri<double>('L', 'N', n, library.data(), library.ld, nb);
        worst_block = std::max({worst_block, max_abs(oracle::triangle(blocked, true, false), unblocked),
                                max_abs(oracle::triangle(library, true, false), unblocked)});
    }
    fs::remove(file);
    c.expect(worst_block <= 1e-9, "blocked vs unblocked inverse " + std::to_string(worst_block));
    const double secs = seconds_since(t0);
    c.expect(secs < 30, "took " + std::to_string(secs) + " s");
    char buf[200];
    std::snprintf(buf, sizeof buf, "gemm %.1e, lu %.1e, gesv %.1e, inverse %.1e, blocked %.1e, %.2f s", worst_gemm,
                  worst_lu, worst_gesv, worst_inv, worst_block, secs);
    return buf;
}

// 4. memory placement ----------------------------------------------------------

std::string memory_placement(Check& c) {
    const auto t0 = Clock::now();
    std::mt19937_64 g(77);
    int plans = 0, guards = 0;
    for (int trial = 0; trial < 300; ++trial) {
        varycheck::Generated gen = varycheck::random_vary(g);
        c.expect(validate(gen.e).empty(), "generated experiment invalid");
        MemoryPlan plan = plan_memory(gen.e, 0);
        const OperandPlan* op = plan.find(gen.varied);
        const bool ok = op && op->instance_count == gen.count && op->instance_count <= 16 &&
                        varycheck::windows_disjoint_and_inside(*op);
        c.expect(ok, "instances overlap or leave the block:\n" + serialize(gen.e));
        plans += ok;
        if (trial % 3 == 0) {
            varycheck::GuardResult r = varycheck::guard_run(gen);
            const bool clean = !r.out_of_bounds && r.changed_outside == 0 && r.changed_inside > 0 &&
                               static_cast<std::int64_t>(r.instances) == gen.count;
            c.expect(clean, "ld guard violated:\n" + serialize(gen.e));
            guards += clean;
        }
    }

    // ld guard across the kernels: sentinels around and between the operand columns
    const double sentinel = -31.0;
    std::mt19937_64 h(78);
    int kernels = 0;
    auto guarded = [&](std::int64_t rows, std::int64_t cols, std::int64_t ld) {
        Matrix m = oracle::random_triangular(h, std::max(rows, cols), true);
        Matrix out(rows, cols, ld);
        out.v.assign(static_cast<std::size_t>(ld * cols + 8), sentinel);
        for (std::int64_t j = 0; j < cols; ++j)
            for (std::int64_t i = 0; i < rows; ++i) out(i, j) = m(i, j) + (i == j ? 0.0 : 0.1);
        return out;
    };
    auto intact = [&](const Matrix& m) {
        for (std::size_t p = 0; p < m.v.size(); ++p) {
            const auto q = static_cast<std::int64_t>(p);
            const bool inside = q / m.ld < m.cols && q % m.ld < m.rows;
            if (!inside && m.v[p] != sentinel) return false;
        }
        return true;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t m = 1 + static_cast<std::int64_t>(h() % 20), n = 1 + static_cast<std::int64_t>(h() % 20);
        Matrix a = guarded(m, m, m + 3), b = guarded(m, n, m + 2), s = guarded(n, n, n + 4);
        run_kernel("dgemm", {'N', 'N', m, n, m, 1.0, ref_of(a), a.ld, ref_of(b), b.ld, 1.0, ref_of(b), b.ld});
        run_kernel("dtrsm", {'L', 'L', 'N', 'N', m, n, 1.0, ref_of(a), a.ld, ref_of(b), b.ld});
        run_kernel("dtrmm", {'R', 'U', 'T', 'N', m, n, 1.0, ref_of(s), s.ld, ref_of(b), b.ld});
        run_kernel("dsyrk", {'L', 'N', m, n, 1.0, ref_of(b), b.ld, 1.0, ref_of(a), a.ld});
        run_kernel("dgetrf", {m, n, ref_of(b), b.ld});
        run_kernel("dtrtri", {'U', 'N', n, ref_of(s), s.ld});
        run_kernel("dgesv", {m, n, ref_of(a), a.ld, ref_of(b), b.ld});
        const bool ok = intact(a) && intact(b) && intact(s);
        c.expect(ok, "kernel wrote outside an operand window");
        kernels += ok;
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 10, "took " + std::to_string(secs) + " s");
    return std::to_string(plans) + " plans disjoint, " + std::to_string(guards) + " unrolled runs and " +
           std::to_string(kernels) + " kernel sequences left the padding untouched";
}

// 5. statistics ----------------------------------------------------------------

/// Direct reference statistics: sort for the median, two-pass population deviation.
double reference_statistic(std::vector<double> v, Statistic s) {
    std::sort(v.begin(), v.end());
    long double sum = 0;
    for (double x : v) sum += x;
    const long double mean = sum / static_cast<long double>(v.size());
    switch (s) {
        case Statistic::Min: return v.front();
        case Statistic::Max: return v.back();
        case Statistic::Mean: return static_cast<double>(mean);
        case Statistic::Median: {
            const std::size_t h = v.size() / 2;
            return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
        }
        case Statistic::Std: {
            long double ss = 0;
            for (double x : v) ss += (x - mean) * (x - mean);
            return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size())));
        }
    }
    return 0;
}

std::string statistics(Check& c) {
    std::mt19937_64 g(99);
    std::uniform_real_distribution<double> u(0, 1e6);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + g() % 50;
        std::vector<double> v(n);
        for (auto& x : v) x = u(g);
        const std::vector<double> tail(v.begin() + 1, v.end());
        std::vector<double> spiked = v;
        spiked[0] = -1e300;
        for (auto s : kAllStatistics) {
            for (const std::vector<double>* data : std::array<const std::vector<double>*, 2>{&v, &tail}) {
                const double want = reference_statistic(*data, s), got = apply_statistic(*data, s, false);
                const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
                worst = std::max(worst, err);
                c.expect(err <= 1e-12, statistic_name(s) + " differs from the reference");
            }
            c.expect(apply_statistic(v, s, true) == apply_statistic(tail, s, false), "discard-first kept index 0");
            c.expect(apply_statistic(spiked, s, true) == apply_statistic(v, s, true), "index 0 influenced the result");
        }
        long double sum = 0;
        for (double x : tail) sum += x;
        const double mean = apply_statistic(v, Statistic::Mean, true);
        c.expect(std::abs(static_cast<long double>(mean) * tail.size() - sum) <= 1e-9L * sum, "mean identity");
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "1000 vectors, worst relative difference %.1e", worst);
    return buf;
}

// 6. determinism ----------------------------------------------------------------

std::string determinism(Check& c) {
    const auto t0 = Clock::now();
    const Experiment e = example("exp2_repetitions");

    // same seed, same memory contents after the whole stream
    auto contents = [&] {
        NullCounterProvider np;
        SamplerConfig cfg;
        cfg.seed = e.seed;
        cfg.timer = TimerBackend::ClockScaled;
        Sampler s(cfg, np);
        for (const auto& stream : unroll(e)) (void)s.run(stream.commands);
        std::vector<std::byte> all;
        for (const auto& name : s.memory().names()) {
            auto b = s.memory().bytes(name);
            all.insert(all.end(), b.begin(), b.end());
        }
        return all;
    };
    const auto m1 = contents(), m2 = contents();
    c.expect(!m1.empty() && m1 == m2, "memory contents differ between runs");

    // same structure and flops from two local runs through the sampler executable
    const Report r1 = parse_report(run_local(e, KERNBENCH_SAMPLER_PATH, default_machine()));
    const Report r2 = parse_report(run_local(e, KERNBENCH_SAMPLER_PATH, default_machine()));
    bool same = r1.experiment == r2.experiment && r1.points.size() == r2.points.size();
    for (std::size_t p = 0; same && p < r1.points.size(); ++p) {
        same = r1.points[p].raw.size() == r2.points[p].raw.size();
        for (std::size_t rep = 0; same && rep < r1.points[p].raw.size(); ++rep)
            for (std::size_t i = 0; same && i < r1.points[p].raw[rep].size(); ++i)
                for (std::size_t k = 0; same && k < r1.points[p].raw[rep][i].size(); ++k)
                    same = r1.points[p].raw[rep][i][k].flops == r2.points[p].raw[rep][i][k].flops;
    }
    c.expect(same, "structure or flops differ between runs");

    // parse -> stats -> plot is a pure function of the report text
    const std::string text = run_local(e, KERNBENCH_SAMPLER_PATH, default_machine());
    auto render = [&] {
        const Report r = parse_report(text);
        PlotSpec spec;
        spec.metric = parse_metric("gflops-per-second");
        const auto out = emit_plot(spec, {{"exp2", &r}}, default_machine());
        return stats_csv(r, applicable_metrics(r, default_machine()),
                         {std::begin(kAllStatistics), std::end(kAllStatistics)}, true, default_machine()) +
               out.svg + out.series_csv;
    };
    c.expect(render() == render(), "plot output differs");
    const double secs = seconds_since(t0);
    c.expect(secs < 10, "took " + std::to_string(secs) + " s");
    char buf[80];
    std::snprintf(buf, sizeof buf, "%zu bytes of operands identical, %.2f s", m1.size(), secs);
    return buf;
}

// 7. CLI and HTTP API agree ------------------------------------------------------

std::string cli_api(Check& c) {
    const fs::path dir = fs::temp_directory_path() / ("kernbench-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.report_dir = (dir / "reports").string();
    cfg.sampler = KERNBENCH_SAMPLER_PATH;
    Service service(cfg);
    service.start();
    httplib::Client client("127.0.0.1", service.port());

    const std::string experiment =
        "#KERNBENCH EXPERIMENT v1\n"
        "range: n 8:8:64\n"
        "nreps: 5\n"
        "seed: 11\n"
        "call: dgesv n 4 A n B n\n";
    auto posted = client.Post("/api/jobs", experiment, "text/plain");
    c.expect(posted && posted->status == 202, "job not accepted");
    service.drain();
    const fs::path report = dir / "reports" / "r0001.kbr";
    c.expect(fs::exists(report), "report not stored");

    std::size_t compared = 0;
    const Report r = load_report(report.string());
    for (const Metric& m : applicable_metrics(r, default_machine())) {
        for (Statistic s : kAllStatistics) {
            const std::string command = std::string(KERNBENCH_CLI_PATH) + " stats " + report.string() +
                                        " --metric " + metric_name(m) + " --stat " + statistic_name(s);
            std::string out;
            if (FILE* p = ::popen(command.c_str(), "r")) {
                char buf[4096];
                for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
                ::pclose(p);
            }
            std::vector<std::pair<std::int64_t, std::string>> cli_rows;
            std::istringstream in(out);
            std::string line;
            std::getline(in, line);  // header
            while (std::getline(in, line)) {
                auto c1 = line.find(','), c3 = line.rfind(',');
                cli_rows.emplace_back(std::stoll(line.substr(0, c1)), line.substr(c3 + 1));
            }
            auto res = client.Get("/api/reports/r0001/series?metric=" + metric_name(m) + "&stat=" + statistic_name(s));
            if (!res || res->status != 200) {
                c.expect(false, "series request failed for " + metric_name(m));
                continue;
            }
            const auto pts = nlohmann::json::parse(res->body)["series"][0]["points"];
            c.expect(pts.size() == cli_rows.size(), "row count differs for " + metric_name(m));
            for (std::size_t i = 0; i < std::min(pts.size(), cli_rows.size()); ++i) {
                const bool gap = pts[i]["y"].is_null();
                const bool equal = pts[i]["x"].get<std::int64_t>() == cli_rows[i].first &&
                                   (gap ? cli_rows[i].second.empty()
                                        : !cli_rows[i].second.empty() &&
                                              std::strtod(cli_rows[i].second.c_str(), nullptr) ==
                                                  pts[i]["y"].get<double>());
                c.expect(equal, metric_name(m) + " " + statistic_name(s) + " differs at x=" +
                                    std::to_string(cli_rows[i].first));
                ++compared;
            }
        }
    }
    service.stop();
    fs::remove_all(dir);
    c.expect(compared == 5 * 5 * 8, "compared " + std::to_string(compared) + " values");
    return std::to_string(compared) + " values bit-identical";
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<std::string(Check&)> run;
    };
    const Criterion criteria[] = {
        {"metric-table", metric_table},   {"unroll-counts", unroll_counts}, {"kernel-oracles", kernel_oracles},
        {"memory-placement", memory_placement}, {"statistics-oracle", statistics}, {"determinism", determinism},
        {"cli-api-equality", cli_api},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check c;
        std::string detail;
        try {
            detail = cr.run(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        if (c.failures.empty()) {
            std::cout << "PASS " << cr.name << ": " << detail << '\n';
        } else {
            ++failed;
            std::cout << "FAIL " << cr.name << ":";
            for (const auto& f : c.failures) std::cout << ' ' << f << ';';
            std::cout << '\n';
        }
    }
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all passed")
              << std::endl;
    return failed ? 1 : 0;
}
