#include "kernbench/submit.hpp"

#include "kernbench/error.hpp"
#include "kernbench/metrics.hpp"
#include "kernbench/unroll.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace kernbench {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write to '" + p.string() + "' failed");
}

/// Scratch directory removed on scope exit.
class ScratchDir {
public:
    ScratchDir() {
        static std::atomic<unsigned> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = fs::temp_directory_path() /
                ("kernbench-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" +
                 std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct ProcessResult {
    int status = 0;
    std::string err;
};

/// Runs `argv` with stdin/stdout redirected to files and extra environment entries.
ProcessResult run_process(const std::vector<std::string>& argv, const std::vector<std::string>& extra_env,
                          const fs::path& in, const fs::path& out, const fs::path& err) {
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_addopen(&fa, 0, in.c_str(), O_RDONLY, 0);
    posix_spawn_file_actions_addopen(&fa, 1, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addopen(&fa, 2, err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);

    std::vector<std::string> env;
    for (char** e = environ; *e; ++e) {
        std::string_view kv(*e);
        bool overridden = false;
        for (const auto& x : extra_env)
            if (kv.substr(0, kv.find('=') + 1) == std::string_view(x).substr(0, x.find('=') + 1)) overridden = true;
        if (!overridden) env.emplace_back(kv);
    }
    env.insert(env.end(), extra_env.begin(), extra_env.end());
    std::vector<char*> envp, args;
    for (auto& s : env) envp.push_back(s.data());
    envp.push_back(nullptr);
    std::vector<std::string> argv_copy = argv;
    for (auto& s : argv_copy) args.push_back(s.data());
    args.push_back(nullptr);

    pid_t pid = 0;
    int rc = posix_spawn(&pid, args[0], &fa, nullptr, args.data(), envp.data());
    posix_spawn_file_actions_destroy(&fa);
    if (rc != 0) throw Error(ErrorCode::SamplerMissing, "cannot start '" + argv[0] + "': " + std::strerror(rc));
    int status = 0;
    while (waitpid(pid, &status, 0) < 0)
        if (errno != EINTR) throw Error(ErrorCode::SamplerFailed, "waitpid failed");
    ProcessResult r;
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    r.err = read_file(err);
    return r;
}

std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t p = 0; (p = s.find(from, p)) != std::string::npos; p += to.size()) s.replace(p, from.size(), to);
    return s;
}

std::vector<std::string> stream_env(const Experiment& e, std::int64_t nthreads, const MachineSpec& machine) {
    return {"KERNBENCH_NTHREADS=" + std::to_string(nthreads), "KERNBENCH_SEED=" + std::to_string(e.seed),
            "KERNBENCH_FREQUENCY_HZ=" + format_value(machine.frequency_hz)};
}

void require_valid(const Experiment& e) {
    auto diags = validate(e);
    if (diags.empty()) return;
    std::string msg = "experiment is invalid:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw Error(ErrorCode::InvalidExperiment, msg);
}

}  // namespace

void check_sampler(const std::string& path) {
    std::error_code ec;
    if (path.empty() || !fs::is_regular_file(path, ec) || ::access(path.c_str(), X_OK) != 0)
        throw Error(ErrorCode::SamplerMissing, "sampler executable not found: '" + path + "'");
}

std::string run_local(const Experiment& e, const std::string& sampler, const MachineSpec& machine) {
    check_sampler(sampler);
    ScratchDir dir;
    const fs::path empty = dir.path() / "empty", info = dir.path() / "info", err = dir.path() / "err";
    write_file(empty, "");

    auto fail = [&](const std::string& what, const ProcessResult& r) {
        throw Error(ErrorCode::SamplerFailed,
                    what + " exited with status " + std::to_string(r.status) + (r.err.empty() ? "" : ": " + r.err));
    };
    ProcessResult ir = run_process({sampler, "--info"}, stream_env(e, 1, machine), empty, info, err);
    if (ir.status != 0) fail("sampler --info", ir);
    std::string timer = "unknown";
    bool counters = false;
    std::istringstream is(read_file(info));
    for (std::string line; std::getline(is, line);) {
        if (line.rfind("timer: ", 0) == 0) timer = line.substr(7);
        if (line.rfind("counters-available: ", 0) == 0) counters = line.substr(20) == "yes";
    }

    std::string report = report_header(e, timer, counters);
    const auto streams = unroll(e);
    for (std::size_t i = 0; i < streams.size(); ++i) {
        const fs::path in = dir.path() / ("stream" + std::to_string(i)), out = dir.path() / ("out" + std::to_string(i));
        write_file(in, streams[i].text());
        ProcessResult r = run_process({sampler}, stream_env(e, streams[i].nthreads, machine), in, out, err);
        if (r.status != 0) fail("sampler (stream " + std::to_string(i + 1) + ")", r);
        report += segment_line(streams[i].nthreads) + '\n';
        report += read_file(out);
    }
    return report;
}

std::string default_batch_template() {
    return "#!/bin/sh\n"
           "#SBATCH --job-name={{job_name}}\n"
           "#SBATCH --nodes=1\n"
           "#SBATCH --cpus-per-task={{cores}}\n"
           "#SBATCH --time={{time_limit}}\n";
}

JobHandle submit(const Experiment& e, const SubmitOptions& options) {
    require_valid(e);
    const std::string backend = options.backend.value_or(e.backend);
    JobHandle job;
    job.backend = backend;

    if (backend == "local") {
        std::string text = run_local(e, options.sampler, options.machine);
        write_file(options.output, text);
        job.report_path = options.output;
        job.complete = true;
        return job;
    }
    if (backend != "shell-script" && backend != "batch-template")
        throw Error(ErrorCode::IllegalArgument, "unknown backend '" + backend + "'");

    // Script backends: stream files plus a script assembling the report next to them.
    check_sampler(options.sampler);
    const fs::path dir = fs::absolute(options.output);
    fs::create_directories(dir);
    const auto streams = unroll(e);
    std::int64_t cores = 1;
    for (const auto& s : streams) cores = std::max(cores, s.nthreads);

    std::string script;
    if (backend == "batch-template") {
        std::string header = options.batch_template.value_or(default_batch_template());
        header = replace_all(header, "{{job_name}}", options.job_name);
        header = replace_all(header, "{{cores}}", std::to_string(cores));
        header = replace_all(header, "{{time_limit}}", options.time_limit);
        if (!header.empty() && header.back() != '\n') header += '\n';
        script = header;
    } else {
        script = "#!/bin/sh\n";
    }
    const fs::path report = dir / (options.job_name + ".kbr");
    const fs::path header_file = dir / "report-header.txt";
    write_file(header_file, serialize(e) + std::string(kReportSeparator) + '\n');

    script += "set -e\n";
    script += "SAMPLER=" + shell_quote(fs::absolute(options.sampler).string()) + "\n";
    script += "DIR=" + shell_quote(dir.string()) + "\n";
    script += "REPORT=" + shell_quote(report.string()) + "\n";
    script += "export KERNBENCH_SEED=" + std::to_string(e.seed) + "\n";
    script += "export KERNBENCH_FREQUENCY_HZ=" + format_value(options.machine.frequency_hz) + "\n";
    script += "cat \"$DIR/report-header.txt\" > \"$REPORT.partial\"\n";
    script += "KERNBENCH_NTHREADS=1 \"$SAMPLER\" --info | grep -E '^(timer|counters-available):' >> \"$REPORT.partial\"\n";
    for (std::size_t i = 0; i < streams.size(); ++i) {
        const std::string name = "stream" + std::to_string(i + 1) + ".txt";
        write_file(dir / name, streams[i].text());
        script += "echo " + shell_quote(segment_line(streams[i].nthreads)) + " >> \"$REPORT.partial\"\n";
        script += "KERNBENCH_NTHREADS=" + std::to_string(streams[i].nthreads) + " \"$SAMPLER\" < \"$DIR/" + name +
                  "\" >> \"$REPORT.partial\"\n";
    }
    script += "mv \"$REPORT.partial\" \"$REPORT\"\n";

    const fs::path script_path = dir / (options.job_name + ".sh");
    write_file(script_path, script);
    fs::permissions(script_path, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                    fs::perm_options::add);
    job.script_path = script_path.string();
    job.report_path = report.string();
    job.complete = false;
    return job;
}

Report collect(const JobHandle& job) {
    if (!fs::exists(job.report_path))
        throw Error(ErrorCode::Io, "report '" + job.report_path + "' does not exist yet" +
                                       (job.script_path.empty() ? "" : " (run " + job.script_path + " first)"));
    return load_report(job.report_path);
}

}  // namespace kernbench
