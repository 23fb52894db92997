#pragma once

#include "kernbench/signature.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace kernbench {

/// Hardware facts needed to turn cycles into time and efficiency.
struct MachineSpec {
    std::string name = "default";
    double frequency_hz = 2.6e9;
    std::optional<double> peak_double;
    std::optional<double> peak_single;

    std::optional<double> peak(Dtype d) const { return d == Dtype::Double ? peak_double : peak_single; }
};

/// 2.6 GHz with 8 (double) and 16 (single) flops per cycle.
MachineSpec default_machine();

/// Lines `name:`, `frequency_hz:`, `peak_flops_per_cycle_double:`,
/// `peak_flops_per_cycle_single:`; `#` starts a comment. Peaks are optional.
/// Throws Error{Syntax} for unknown fields or non-positive values.
MachineSpec parse_machine(std::string_view text);
MachineSpec load_machine(const std::string& path);
std::string format_machine(const MachineSpec& m);

}  // namespace kernbench
