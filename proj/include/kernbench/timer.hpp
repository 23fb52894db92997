#pragma once

#include <cstdint>
#include <string>

namespace kernbench {

enum class TimerBackend {
    /// x86 time-stamp counter; only chosen when the CPU reports it as invariant.
    InvariantTsc,
    /// steady_clock nanoseconds scaled by the configured frequency.
    ClockScaled,
};

const char* to_string(TimerBackend b);

/// True when the platform exposes an invariant cycle counter.
bool invariant_tsc_available();

class CycleTimer {
public:
    /// Picks InvariantTsc when available, otherwise ClockScaled.
    explicit CycleTimer(double frequency_hz);
    CycleTimer(TimerBackend backend, double frequency_hz);

    /// Monotonically nondecreasing.
    std::uint64_t read_cycles() const;

    TimerBackend backend() const { return backend_; }
    double frequency_hz() const { return frequency_hz_; }

private:
    TimerBackend backend_;
    double frequency_hz_;
};

}  // namespace kernbench
