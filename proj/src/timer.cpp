#include "kernbench/timer.hpp"

#include <chrono>

#if defined(__x86_64__) || defined(__i386__)
#include <cpuid.h>
#include <x86intrin.h>
#define KERNBENCH_HAVE_TSC 1
#endif

namespace kernbench {

const char* to_string(TimerBackend b) {
    return b == TimerBackend::InvariantTsc ? "invariant-tsc" : "clock-scaled";
}

bool invariant_tsc_available() {
#ifdef KERNBENCH_HAVE_TSC
    unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
    if (__get_cpuid(0x80000000u, &eax, &ebx, &ecx, &edx) == 0 || eax < 0x80000007u) return false;
    __get_cpuid(0x80000007u, &eax, &ebx, &ecx, &edx);
    return (edx & (1u << 8)) != 0;
#else
    return false;
#endif
}

CycleTimer::CycleTimer(double frequency_hz)
    : CycleTimer(invariant_tsc_available() ? TimerBackend::InvariantTsc : TimerBackend::ClockScaled,
                 frequency_hz) {}

CycleTimer::CycleTimer(TimerBackend backend, double frequency_hz)
    : backend_(backend), frequency_hz_(frequency_hz) {
#ifndef KERNBENCH_HAVE_TSC
    backend_ = TimerBackend::ClockScaled;
#endif
}

std::uint64_t CycleTimer::read_cycles() const {
#ifdef KERNBENCH_HAVE_TSC
    if (backend_ == TimerBackend::InvariantTsc) {
        unsigned aux = 0;
        return __rdtscp(&aux);
    }
#endif
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                  std::chrono::steady_clock::now().time_since_epoch())
                  .count();
    return static_cast<std::uint64_t>(static_cast<long double>(ns) * frequency_hz_ * 1e-9L);
}

}  // namespace kernbench
