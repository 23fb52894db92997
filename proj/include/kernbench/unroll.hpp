#pragma once

#include "kernbench/command.hpp"
#include "kernbench/experiment.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kernbench {

/// Complete sampler input for one thread count.
struct CommandStream {
    std::int64_t nthreads = 1;
    /// Range values measured by this stream, in order.
    std::vector<std::int64_t> range_values;
    std::vector<Command> commands;
    /// Result lines produced by operand initialisation before the first measurement.
    std::size_t init_lines = 0;
    /// Result lines produced by the measured part.
    std::size_t measured_lines = 0;

    /// Kernel calls in the measured part (initialisation calls excluded).
    std::size_t call_lines() const;
    std::string text() const;
};

/// Shape of each stream without generating commands; used to read reports back.
struct StreamLayout {
    std::int64_t nthreads = 1;
    std::vector<std::int64_t> range_values;
    std::size_t init_lines = 0;
    std::size_t measured_lines = 0;
};

std::vector<StreamLayout> stream_layout(const Experiment& e);

/// One stream per thread-count value. Throws on expression or plan errors.
std::vector<CommandStream> unroll(const Experiment& e);

}  // namespace kernbench
