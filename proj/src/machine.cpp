#include "kernbench/machine.hpp"

#include "kernbench/command.hpp"
#include "kernbench/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace kernbench {

MachineSpec default_machine() {
    MachineSpec m;
    m.peak_double = 8.0;
    m.peak_single = 16.0;
    return m;
}

MachineSpec parse_machine(std::string_view text) {
    MachineSpec m;
    m.name.clear();
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool have_frequency = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw Error(ErrorCode::Syntax, "machine file line " + std::to_string(line_no) + ": " + why);
        };
        const std::string key = tokens[0];
        if (key.empty() || key.back() != ':') fail("expected '<field>: <value>'");
        if (tokens.size() < 2) fail("missing value for " + key);
        auto number = [&]() {
            double v = 0;
            auto [p, ec] = std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), v);
            if (tokens.size() != 2 || ec != std::errc() || p != tokens[1].data() + tokens[1].size())
                fail(key + " expects one number");
            if (!(v > 0)) fail(key + " must be positive");
            return v;
        };
        if (key == "name:") {
            m.name = tokens[1];
            for (std::size_t i = 2; i < tokens.size(); ++i) m.name += " " + tokens[i];
        } else if (key == "frequency_hz:") {
            m.frequency_hz = number();
            have_frequency = true;
        } else if (key == "peak_flops_per_cycle_double:") {
            m.peak_double = number();
        } else if (key == "peak_flops_per_cycle_single:") {
            m.peak_single = number();
        } else {
            fail("unknown field '" + key.substr(0, key.size() - 1) + "'");
        }
    }
    if (!have_frequency) throw Error(ErrorCode::Syntax, "machine file: frequency_hz is required");
    if (m.name.empty()) m.name = "unnamed";
    return m;
}

MachineSpec load_machine(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read machine file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_machine(ss.str());
}

std::string format_machine(const MachineSpec& m) {
    std::ostringstream os;
    os.precision(17);
    os << "name: " << m.name << '\n' << "frequency_hz: " << m.frequency_hz << '\n';
    if (m.peak_double) os << "peak_flops_per_cycle_double: " << *m.peak_double << '\n';
    if (m.peak_single) os << "peak_flops_per_cycle_single: " << *m.peak_single << '\n';
    return os.str();
}

}  // namespace kernbench
