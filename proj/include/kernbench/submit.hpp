#pragma once

#include "kernbench/experiment.hpp"
#include "kernbench/machine.hpp"
#include "kernbench/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kernbench {

struct SubmitOptions {
    std::string sampler;
    MachineSpec machine = default_machine();
    /// Report file for the local backend; output directory for script backends.
    std::string output;
    /// Overrides the experiment's own backend field when set.
    std::optional<std::string> backend;
    std::string job_name = "kernbench";
    std::string time_limit = "01:00:00";
    /// Header with {{job_name}}, {{cores}} and {{time_limit}}; default_batch_template() when unset.
    std::optional<std::string> batch_template;
};

struct JobHandle {
    std::string backend;
    /// Where the report is (local) or will be once the script has run.
    std::string report_path;
    /// Empty for the local backend.
    std::string script_path;
    bool complete = false;
};

/// Throws Error{SamplerMissing} when `path` is not an executable file.
void check_sampler(const std::string& path);

/// Runs every command stream through the sampler and returns the report text.
/// Throws Error{SamplerMissing | SamplerFailed} with the sampler's stderr attached.
std::string run_local(const Experiment& e, const std::string& sampler, const MachineSpec& machine);

std::string default_batch_template();

/// Validates, then runs locally or writes a script plus stream files.
/// Throws Error{InvalidExperiment} listing the diagnostics.
JobHandle submit(const Experiment& e, const SubmitOptions& options);

/// Parses the report of a finished job. Throws Error{Io} while it does not exist yet.
Report collect(const JobHandle& job);

}  // namespace kernbench
