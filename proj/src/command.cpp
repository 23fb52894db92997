#include "kernbench/command.hpp"

#include "kernbench/error.hpp"

#include <charconv>
#include <sstream>

namespace kernbench {

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + why);
}

std::int64_t parse_count(const std::string& tok, std::size_t line_no) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || v < 0)
        malformed(line_no, "expected a nonnegative integer, got '" + tok + "'");
    return v;
}

char dtype_prefix(Dtype d) { return d == Dtype::Single ? 's' : 'd'; }

}  // namespace

std::optional<Command> parse_command(std::string_view line, std::size_t line_no) {
    auto tokens = split_ws(line);
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (tokens[i].front() == '#') {
            tokens.resize(i);
            break;
        }
    if (tokens.empty()) return std::nullopt;
    const std::string& head = tokens[0];
    auto expect = [&](std::size_t n) {
        if (tokens.size() != n)
            malformed(line_no, "'" + head + "' takes " + std::to_string(n - 1) + " arguments");
    };

    if (head == "go") {
        expect(1);
        return cmd::Go{};
    }
    if (head == "{omp") {
        expect(1);
        return cmd::ParBegin{};
    }
    if (head == "}") {
        expect(1);
        return cmd::ParEnd{};
    }
    if (head == "set_counters") return cmd::SetCounters{{tokens.begin() + 1, tokens.end()}};
    if (head == "free") {
        expect(2);
        return cmd::Free{tokens[1]};
    }
    if (head.size() > 1) {
        auto dt = dtype_from_prefix(head[0]);
        std::string_view rest = std::string_view(head).substr(1);
        if (dt && rest == "malloc") {
            expect(3);
            return cmd::Malloc{*dt, tokens[1], parse_count(tokens[2], line_no)};
        }
        if (dt && rest == "offset") {
            expect(4);
            return cmd::Offset{*dt, tokens[1], parse_count(tokens[2], line_no), tokens[3]};
        }
    }
    return cmd::Call{head, {tokens.begin() + 1, tokens.end()}};
}

std::string format_command(const Command& c) {
    std::ostringstream os;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, cmd::Malloc>)
                os << dtype_prefix(v.dtype) << "malloc " << v.name << ' ' << v.elems;
            else if constexpr (std::is_same_v<T, cmd::Offset>)
                os << dtype_prefix(v.dtype) << "offset " << v.source << ' ' << v.offset << ' ' << v.name;
            else if constexpr (std::is_same_v<T, cmd::Free>)
                os << "free " << v.name;
            else if constexpr (std::is_same_v<T, cmd::Call>) {
                os << v.kernel;
                for (const auto& a : v.args) os << ' ' << a;
            } else if constexpr (std::is_same_v<T, cmd::ParBegin>)
                os << "{omp";
            else if constexpr (std::is_same_v<T, cmd::ParEnd>)
                os << "}";
            else if constexpr (std::is_same_v<T, cmd::SetCounters>) {
                os << "set_counters";
                for (const auto& a : v.counters) os << ' ' << a;
            } else
                os << "go";
        },
        c);
    return os.str();
}

}  // namespace kernbench
