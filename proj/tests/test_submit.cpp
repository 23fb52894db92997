#include "kernbench/error.hpp"
#include "kernbench/metrics.hpp"
#include "kernbench/submit.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace kernbench;
namespace fs = std::filesystem;

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

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("kernbench-test-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

/// Thread-count range with small matrices so scripts run quickly.
Experiment small_threads() {
    Experiment e = example("exp6_threads");
    e.range->stop = Expression(3);
    e.nreps = 2;
    e.calls[0].args = {"N", "N", "40", "40", "40", "1", "A", "40", "B", "40", "0", "C", "40"};
    return e;
}

}  // namespace

TEST_CASE("local run of the repetition experiment yields a complete report") {
    TempDir dir("local");
    SubmitOptions o;
    o.sampler = KERNBENCH_SAMPLER_PATH;
    o.output = (dir.path / "exp2.kbr").string();
    JobHandle h = submit(example("exp2_repetitions"), o);
    CHECK(h.complete);
    CHECK(h.backend == "local");
    CHECK(h.script_path.empty());
    Report r = collect(h);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].raw.size() == 10);
    for (const auto& rep : r.points[0].raw) {
        CHECK(rep.at(0).at(0).flops == 2'000'000);
        CHECK(rep.at(0).at(0).cycles > 0);
    }
    CHECK((r.timer == "invariant-tsc" || r.timer == "clock-scaled"));
    auto s = series(r, {parse_metric("gflops"), Statistic::Median, true}, default_machine());
    CHECK(s.points.at(0).y.value() > 0);
}

TEST_CASE("shell script backend writes one sampler invocation per thread count") {
    TempDir dir("shell");
    SubmitOptions o;
    o.sampler = KERNBENCH_SAMPLER_PATH;
    o.output = dir.path.string();
    o.backend = "shell-script";
    o.job_name = "threads";
    JobHandle h = submit(small_threads(), o);
    CHECK_FALSE(h.complete);
    const std::string script = slurp(h.script_path);
    CHECK(script.rfind("#!/bin/sh\n", 0) == 0);
    CHECK(count(script, "\"$SAMPLER\" < ") == 3);
    for (int t = 1; t <= 3; ++t) CHECK(count(script, "KERNBENCH_NTHREADS=" + std::to_string(t) + " \"$SAMPLER\" <") == 1);
    CHECK(code_of([&] { collect(h); }) == ErrorCode::Io);

    REQUIRE(std::system(("/bin/sh " + h.script_path).c_str()) == 0);
    Report r = collect(h);
    REQUIRE(r.points.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.points[i].nthreads == static_cast<std::int64_t>(i + 1));
        CHECK(r.points[i].raw.size() == 2);
    }
}

TEST_CASE("batch template placeholders are filled in") {
    TempDir dir("batch");
    SubmitOptions o;
    o.sampler = KERNBENCH_SAMPLER_PATH;
    o.output = dir.path.string();
    o.backend = "batch-template";
    o.job_name = "trsm";
    o.time_limit = "00:10:00";
    JobHandle h = submit(example("exp8_trsm"), o);
    std::string script = slurp(h.script_path);
    CHECK(script.find("#SBATCH --job-name=trsm\n") != std::string::npos);
    CHECK(script.find("#SBATCH --cpus-per-task=8\n") != std::string::npos);
    CHECK(script.find("#SBATCH --time=00:10:00\n") != std::string::npos);
    CHECK(script.find("{{") == std::string::npos);
    CHECK(count(script, "\"$SAMPLER\" < ") == 1);

    o.batch_template = "#!/bin/bash\n#PBS -N {{job_name}} -l nodes=1:ppn={{cores}},walltime={{time_limit}}";
    h = submit(example("exp8_trsm"), o);
    script = slurp(h.script_path);
    CHECK(script.rfind("#!/bin/bash\n#PBS -N trsm -l nodes=1:ppn=8,walltime=00:10:00\n", 0) == 0);
}

TEST_CASE("missing sampler and invalid experiments are reported") {
    TempDir dir("errors");
    SubmitOptions o;
    o.sampler = (dir.path / "no-such-sampler").string();
    o.output = (dir.path / "x.kbr").string();
    CHECK(code_of([&] { submit(example("exp2_repetitions"), o); }) == ErrorCode::SamplerMissing);
    o.backend = "shell-script";
    CHECK(code_of([&] { submit(example("exp2_repetitions"), o); }) == ErrorCode::SamplerMissing);
    const std::string plain = (dir.path / "plain.txt").string();
    std::ofstream(plain) << "not a program\n";
    fs::permissions(plain, fs::perms::owner_read | fs::perms::owner_write);
    CHECK(code_of([&] { check_sampler(plain); }) == ErrorCode::SamplerMissing);

    Experiment bad = example("exp2_repetitions");
    bad.calls[0].args[7] = "10";
    o.sampler = KERNBENCH_SAMPLER_PATH;
    try {
        submit(bad, o);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidExperiment);
        CHECK(std::string(e.what()).find("argument ldA") != std::string::npos);
    }
}

TEST_CASE("a failing sampler reports its error output") {
    TempDir dir("fail");
    const fs::path fake = dir.path / "sampler.sh";
    {
        std::ofstream out(fake);
        out << "#!/bin/sh\necho 'boom: broken sampler' >&2\nexit 3\n";
    }
    fs::permissions(fake, fs::perms::owner_all);
    try {
        run_local(example("exp2_repetitions"), fake.string(), default_machine());
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SamplerFailed);
        CHECK(std::string(e.what()).find("boom: broken sampler") != std::string::npos);
        CHECK(std::string(e.what()).find("status 3") != std::string::npos);
    }
}
