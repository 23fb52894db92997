// Command-line front end: validate, run, submit, stats, plot, kernels, unroll, serve.

#include "kernbench/error.hpp"
#include "kernbench/experiment.hpp"
#include "kernbench/kernels.hpp"
#include "kernbench/machine.hpp"
#include "kernbench/metrics.hpp"
#include "kernbench/plot.hpp"
#include "kernbench/report.hpp"
#include "kernbench/service.hpp"
#include "kernbench/submit.hpp"
#include "kernbench/unroll.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <pthread.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace kernbench;

namespace {

std::string default_sampler() {
    if (const char* env = std::getenv("KERNBENCH_SAMPLER"); env && *env) return env;
    std::error_code ec;
    fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (ec) return "kernbench-sampler";
    return (self.parent_path() / "kernbench-sampler").string();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernbench: declarative performance experiments for dense linear algebra kernels"};
    app.require_subcommand(1);

    std::string machine_file, sampler = default_sampler();
    auto machine = [&]() { return machine_file.empty() ? default_machine() : load_machine(machine_file); };
    auto add_machine = [&](CLI::App* c) {
        c->add_option("--machine", machine_file, "machine file (frequency and peak flops per cycle)")
            ->check(CLI::ExistingFile);
    };
    auto add_sampler = [&](CLI::App* c) { c->add_option("--sampler", sampler, "sampler executable"); };

    // validate
    std::string exp_path;
    auto* validate_cmd = app.add_subcommand("validate", "check an experiment and print diagnostics");
    validate_cmd->add_option("experiment", exp_path, "experiment file (.kbe)")->required();

    // run
    std::string out_path;
    auto* run_cmd = app.add_subcommand("run", "run an experiment locally and write its report");
    run_cmd->add_option("experiment", exp_path, "experiment file (.kbe)")->required();
    run_cmd->add_option("--out", out_path, "report file (.kbr)")->required();
    add_machine(run_cmd);
    add_sampler(run_cmd);

    // submit
    std::string backend, template_file, job_name = "kernbench", time_limit = "01:00:00";
    auto* submit_cmd = app.add_subcommand("submit", "run locally or write a shell or batch script");
    submit_cmd->add_option("experiment", exp_path, "experiment file (.kbe)")->required();
    submit_cmd->add_option("--out", out_path, "report file (local) or output directory (scripts)")->required();
    submit_cmd->add_option("--backend", backend, "override the experiment's backend")
        ->check(CLI::IsMember({"local", "shell-script", "batch-template"}));
    submit_cmd->add_option("--template", template_file, "batch header with {{job_name}} {{cores}} {{time_limit}}")
        ->check(CLI::ExistingFile);
    submit_cmd->add_option("--job-name", job_name, "batch job name");
    submit_cmd->add_option("--time-limit", time_limit, "batch time limit");
    add_machine(submit_cmd);
    add_sampler(submit_cmd);

    // stats
    std::string report_path;
    std::vector<std::string> metric_names, stat_names;
    bool keep_first = false;
    auto add_query = [&](CLI::App* c) {
        c->add_option("--metric", metric_names, "metric (repeatable; default: every applicable metric)");
        c->add_option("--stat", stat_names, "min, max, mean, median, std (repeatable)");
        auto* d = c->add_flag("--discard-first{false},!--keep-first", keep_first,
                              "drop repetition 0 before statistics (default) or keep it");
        (void)d;
    };
    auto* stats_cmd = app.add_subcommand("stats", "statistics per range value as comma-separated text");
    stats_cmd->add_option("report", report_path, "report file (.kbr)")->required()->check(CLI::ExistingFile);
    stats_cmd->add_option("--out", out_path, "output file (default: standard output)");
    add_query(stats_cmd);
    add_machine(stats_cmd);

    // plot
    std::vector<std::string> report_paths, labels;
    std::string style;
    bool breakdown = false;
    auto* plot_cmd = app.add_subcommand("plot", "SVG plot plus a sidecar file with the plotted series");
    plot_cmd->add_option("reports", report_paths, "report files (.kbr), overlaid")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("--out", out_path, "SVG file; the series go to <out>.csv")->required();
    plot_cmd->add_option("--label", labels, "legend label per report (default: file name)");
    plot_cmd->add_option("--style", style, "line or bar (default: line for ranged reports)")
        ->check(CLI::IsMember({"line", "bar"}));
    plot_cmd->add_flag("--breakdown", breakdown, "one series per call plus the total");
    add_query(plot_cmd);
    add_machine(plot_cmd);

    // kernels
    std::string kernel_name;
    auto* kernels_cmd = app.add_subcommand("kernels", "list kernel signatures");
    kernels_cmd->add_option("name", kernel_name, "show one kernel in detail");

    // unroll
    auto* unroll_cmd = app.add_subcommand("unroll", "print the sampler command streams of an experiment");
    unroll_cmd->add_option("experiment", exp_path, "experiment file (.kbe)")->required();

    // serve
    ServiceConfig svc;
    auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
    serve_cmd->add_option("--host", svc.host, "listen address");
    serve_cmd->add_option("--port", svc.port, "listen port");
    serve_cmd->add_option("--reports", svc.report_dir, "report directory");
    serve_cmd->add_option("--webui", svc.webui_dir, "static files to serve under /");
    add_machine(serve_cmd);
    add_sampler(serve_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) {
            Experiment e = load_experiment(exp_path);
            auto diags = validate(e);
            for (const auto& d : diags) std::cout << exp_path << ": " << d << '\n';
            if (!diags.empty()) return 1;
            std::cout << exp_path << ": ok\n";
        } else if (*run_cmd) {
            SubmitOptions o;
            o.sampler = sampler;
            o.machine = machine();
            o.output = out_path;
            o.backend = "local";
            submit(load_experiment(exp_path), o);
            std::cout << "wrote " << out_path << '\n';
        } else if (*submit_cmd) {
            SubmitOptions o;
            o.sampler = sampler;
            o.machine = machine();
            o.output = out_path;
            if (!backend.empty()) o.backend = backend;
            if (!template_file.empty()) o.batch_template = read_text(template_file);
            o.job_name = job_name;
            o.time_limit = time_limit;
            JobHandle h = submit(load_experiment(exp_path), o);
            if (h.complete) std::cout << "wrote " << h.report_path << '\n';
            else std::cout << "wrote " << h.script_path << "\nreport will be written to " << h.report_path << '\n';
        } else if (*stats_cmd) {
            Report r = load_report(report_path);
            MachineSpec m = machine();
            std::vector<Metric> metrics;
            for (const auto& n : metric_names) metrics.push_back(parse_metric(n, r.experiment.counters));
            if (metrics.empty()) metrics = applicable_metrics(r, m);
            std::vector<Statistic> stats;
            for (const auto& n : stat_names) stats.push_back(parse_statistic(n));
            if (stats.empty()) stats.assign(std::begin(kAllStatistics), std::end(kAllStatistics));
            write_text(out_path, stats_csv(r, metrics, stats, !keep_first, m));
        } else if (*plot_cmd) {
            std::vector<Report> reports;
            for (const auto& p : report_paths) reports.push_back(load_report(p));
            std::vector<LabelledReport> lr;
            for (std::size_t i = 0; i < reports.size(); ++i)
                lr.push_back({i < labels.size() ? labels[i] : fs::path(report_paths[i]).stem().string(), &reports[i]});
            PlotSpec spec;
            if (metric_names.size() > 1) throw Error(ErrorCode::IllegalArgument, "plot takes one --metric");
            spec.metric = parse_metric(metric_names.empty() ? "gflops-per-second" : metric_names[0],
                                       reports[0].experiment.counters);
            if (!stat_names.empty()) {
                spec.statistics.clear();
                for (const auto& n : stat_names) spec.statistics.push_back(parse_statistic(n));
            }
            spec.discard_first = !keep_first;
            if (!style.empty()) spec.style = style == "line" ? PlotStyle::Line : PlotStyle::Bar;
            spec.breakdown = breakdown;
            PlotOutput out = emit_plot(spec, lr, machine());
            write_text(out_path, out.svg);
            write_text(out_path + ".csv", out.series_csv);
            std::cout << "wrote " << out_path << " and " << out_path << ".csv\n";
        } else if (*kernels_cmd) {
            for (const Signature* s : all_signatures()) {
                if (!kernel_name.empty() && s->name != kernel_name) continue;
                std::cout << s->name;
                for (const auto& a : s->args) std::cout << ' ' << a.name;
                std::cout << "\n    " << s->description << "; flops " << s->flops.text << '\n';
                if (!kernel_name.empty())
                    for (const auto& a : s->args) std::cout << "    " << a.name << ": " << kind_name(a.kind) << '\n';
            }
            if (!kernel_name.empty()) lookup_signature(kernel_name);
        } else if (*unroll_cmd) {
            Experiment e = load_experiment(exp_path);
            for (const auto& s : unroll(e)) {
                std::cout << "# stream nthreads=" << s.nthreads << " init-lines=" << s.init_lines
                          << " measured-lines=" << s.measured_lines << '\n'
                          << s.text();
            }
        } else if (*serve_cmd) {
            svc.sampler = sampler;
            svc.machine = machine();
            // Block the stop signals before any thread starts, then wait for one here.
            sigset_t stop_signals;
            sigemptyset(&stop_signals);
            sigaddset(&stop_signals, SIGINT);
            sigaddset(&stop_signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
            Service service(svc);
            service.start();
            std::cout << "listening on http://" << svc.host << ":" << service.port() << std::endl;
            int sig = 0;
            sigwait(&stop_signals, &sig);
            service.stop();
        }
    } catch (const Error& e) {
        std::cerr << "kernbench: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "kernbench: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
