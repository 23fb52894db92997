#pragma once

#include "kernbench/command.hpp"
#include "kernbench/counters.hpp"
#include "kernbench/memory.hpp"
#include "kernbench/timer.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kernbench {

class ThreadPool;

struct SamplerConfig {
    std::size_t nthreads = 1;
    std::uint64_t seed = 0;
    /// Unset: invariant TSC when available, else the scaled clock.
    std::optional<TimerBackend> timer;
    double frequency_hz = 2.6e9;
    std::size_t arena_cap_elems = MemoryManager::kDefaultArenaCap;

    /// Reads KERNBENCH_NTHREADS, KERNBENCH_SEED, KERNBENCH_FREQUENCY_HZ and
    /// KERNBENCH_TIMER (auto | tsc | clock).
    static SamplerConfig from_environment();
};

/// One measured unit: a sequential call or a whole parallel block.
struct ResultLine {
    std::uint64_t cycles = 0;
    std::vector<std::uint64_t> counters;
    /// Set when the unit hit a numerical failure; the line then ends in "FAIL".
    bool failed = false;

    friend bool operator==(const ResultLine&, const ResultLine&) = default;
};

inline constexpr const char* kFailureMarker = "FAIL";

std::string format_result_line(const ResultLine& line);

class Sampler {
public:
    Sampler(SamplerConfig config, CounterProvider& counters);
    ~Sampler();

    /// Consumes one command. Memory commands and set_counters act immediately; calls
    /// and parallel blocks are buffered until `go`, whose result lines are appended to `out`.
    /// Throws Error naming the offending buffered call index; the sampler is then unusable.
    void feed(const Command& command, std::vector<ResultLine>& out);

    std::vector<ResultLine> run(const std::vector<Command>& commands);

    /// Streams `in` line by line, printing result lines to `out` as each `go` completes.
    void run_text(std::istream& in, std::ostream& out);

    const MemoryManager& memory() const { return memory_; }
    TimerBackend timer_backend() const { return timer_.backend(); }
    const CycleTimer& timer() const { return timer_; }
    std::size_t counter_count() const { return counter_names_.size(); }

private:
    struct Unit {
        bool parallel = false;
        std::vector<std::pair<std::size_t, cmd::Call>> calls;  // (buffer index, call)
    };

    void execute_buffer(std::vector<ResultLine>& out);
    ResultLine execute_unit(const Unit& unit);

    SamplerConfig config_;
    CounterProvider& counters_;
    CycleTimer timer_;
    MemoryManager memory_;
    CounterRng rng_;
    std::unique_ptr<ThreadPool> pool_;
    std::vector<std::string> counter_names_;
    std::vector<Unit> buffer_;
    bool in_block_ = false;
    std::size_t buffered_calls_ = 0;
};

/// `sampler --info` output: timer backend and counter availability.
std::string sampler_info(const Sampler& s, const CounterProvider& counters);

}  // namespace kernbench
