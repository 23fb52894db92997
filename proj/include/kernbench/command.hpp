#pragma once

#include "kernbench/signature.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kernbench {

namespace cmd {

struct Malloc {
    Dtype dtype;
    std::string name;
    std::int64_t elems;
    friend bool operator==(const Malloc&, const Malloc&) = default;
};
struct Offset {
    Dtype dtype;
    std::string source;
    std::int64_t offset;
    std::string name;
    friend bool operator==(const Offset&, const Offset&) = default;
};
struct Free {
    std::string name;
    friend bool operator==(const Free&, const Free&) = default;
};
struct Call {
    std::string kernel;
    std::vector<std::string> args;
    friend bool operator==(const Call&, const Call&) = default;
};
struct ParBegin {
    friend bool operator==(const ParBegin&, const ParBegin&) = default;
};
struct ParEnd {
    friend bool operator==(const ParEnd&, const ParEnd&) = default;
};
struct SetCounters {
    std::vector<std::string> counters;
    friend bool operator==(const SetCounters&, const SetCounters&) = default;
};
struct Go {
    friend bool operator==(const Go&, const Go&) = default;
};

}  // namespace cmd

using Command = std::variant<cmd::Malloc, cmd::Offset, cmd::Free, cmd::Call, cmd::ParBegin,
                             cmd::ParEnd, cmd::SetCounters, cmd::Go>;

/// One line of sampler input. Blank lines and `#` comments yield nullopt.
/// Throws Error{MalformedLine} naming `line_no`. Unknown kernels are not detected here.
std::optional<Command> parse_command(std::string_view line, std::size_t line_no = 0);

std::string format_command(const Command& c);

std::vector<std::string> split_ws(std::string_view text);

}  // namespace kernbench
