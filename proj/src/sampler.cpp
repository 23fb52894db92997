#include "kernbench/sampler.hpp"

#include "kernbench/error.hpp"
#include "kernbench/kernels.hpp"
#include "kernbench/thread_pool.hpp"

#include <atomic>
#include <charconv>
#include <functional>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace kernbench {

namespace {

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

template <typename T>
T parse_env_number(const char* name, const std::string& text) {
    T v{};
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        throw Error(ErrorCode::IllegalArgument, std::string(name) + ": not a number: '" + text + "'");
    return v;
}

ArgValue parse_scalar_token(const ArgSpec& spec, const std::string& tok) {
    auto bad = [&](const char* what) {
        throw Error(ErrorCode::IllegalArgument,
                    "argument " + spec.name + ": expected " + what + ", got '" + tok + "'");
    };
    if (std::holds_alternative<FlagArg>(spec.kind)) {
        if (tok.size() != 1) bad("a single character");
        return tok[0];
    }
    if (std::holds_alternative<DimArg>(spec.kind) || std::holds_alternative<LdArg>(spec.kind)) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size()) bad("an integer");
        return v;
    }
    if (std::holds_alternative<ScalarArg>(spec.kind)) {
        double v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size()) bad("a real number");
        return v;
    }
    return tok;  // path
}

}  // namespace

SamplerConfig SamplerConfig::from_environment() {
    SamplerConfig c;
    if (auto v = env("KERNBENCH_NTHREADS")) c.nthreads = parse_env_number<std::size_t>("KERNBENCH_NTHREADS", *v);
    if (c.nthreads == 0) c.nthreads = 1;
    if (auto v = env("KERNBENCH_SEED")) c.seed = parse_env_number<std::uint64_t>("KERNBENCH_SEED", *v);
    if (auto v = env("KERNBENCH_FREQUENCY_HZ"))
        c.frequency_hz = parse_env_number<double>("KERNBENCH_FREQUENCY_HZ", *v);
    if (auto v = env("KERNBENCH_TIMER")) {
        if (*v == "tsc") c.timer = TimerBackend::InvariantTsc;
        else if (*v == "clock") c.timer = TimerBackend::ClockScaled;
        else if (*v != "auto")
            throw Error(ErrorCode::IllegalArgument, "KERNBENCH_TIMER must be auto, tsc or clock");
    }
    return c;
}

std::string format_result_line(const ResultLine& line) {
    std::string s = std::to_string(line.cycles);
    for (auto c : line.counters) {
        s += ' ';
        s += std::to_string(c);
    }
    if (line.failed) {
        s += ' ';
        s += kFailureMarker;
    }
    return s;
}

Sampler::Sampler(SamplerConfig config, CounterProvider& counters)
    : config_(config),
      counters_(counters),
      timer_(config.timer ? CycleTimer(*config.timer, config.frequency_hz) : CycleTimer(config.frequency_hz)),
      memory_(config.arena_cap_elems),
      rng_(config.seed) {
    if (config_.nthreads > 1) pool_ = std::make_unique<ThreadPool>(config_.nthreads);
    counters_.configure(counter_names_);
}

Sampler::~Sampler() = default;

void Sampler::feed(const Command& command, std::vector<ResultLine>& out) {
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, cmd::Malloc>) {
                memory_.malloc(c.dtype, c.name, c.elems, rng_);
            } else if constexpr (std::is_same_v<T, cmd::Offset>) {
                memory_.offset(c.dtype, c.source, c.offset, c.name);
            } else if constexpr (std::is_same_v<T, cmd::Free>) {
                memory_.free(c.name);
            } else if constexpr (std::is_same_v<T, cmd::Call>) {
                if (in_block_) {
                    buffer_.back().calls.emplace_back(buffered_calls_++, c);
                } else {
                    Unit u;
                    u.calls.emplace_back(buffered_calls_++, c);
                    buffer_.push_back(std::move(u));
                }
            } else if constexpr (std::is_same_v<T, cmd::ParBegin>) {
                if (in_block_)
                    throw Error(ErrorCode::NestingViolation, "nested '{omp' (parallel blocks do not nest)");
                in_block_ = true;
                Unit u;
                u.parallel = true;
                buffer_.push_back(std::move(u));
            } else if constexpr (std::is_same_v<T, cmd::ParEnd>) {
                if (!in_block_) throw Error(ErrorCode::NestingViolation, "'}' without matching '{omp'");
                in_block_ = false;
            } else if constexpr (std::is_same_v<T, cmd::SetCounters>) {
                counter_names_ = c.counters;
                counters_.configure(counter_names_);
            } else {
                if (in_block_) throw Error(ErrorCode::NestingViolation, "'go' inside a parallel block");
                execute_buffer(out);
            }
        },
        command);
}

void Sampler::execute_buffer(std::vector<ResultLine>& out) {
    std::vector<Unit> units = std::move(buffer_);
    buffer_.clear();
    buffered_calls_ = 0;
    for (const Unit& u : units) out.push_back(execute_unit(u));
}

ResultLine Sampler::execute_unit(const Unit& unit) {
    // Resolve everything up front so timing covers only kernel execution.
    std::vector<KernelCall> calls;
    std::vector<CounterRng> rngs;
    std::vector<std::pair<std::size_t, Dtype>> dynamic_requests;
    std::vector<std::pair<std::size_t, std::size_t>> dynamic_slots;  // (call, arg)

    for (const auto& [index, c] : unit.calls) {
        auto fail = [&, idx = index, name = c.kernel](const Error& e) {
            throw Error(e.code(), "buffered call #" + std::to_string(idx) + " (" + name + "): " + e.what());
        };
        try {
            const Signature& sig = lookup_signature(c.kernel);
            if (c.args.size() != sig.args.size())
                throw Error(ErrorCode::IllegalArgument, "expected " + std::to_string(sig.args.size()) +
                                                            " arguments, got " + std::to_string(c.args.size()));
            KernelCall kc{&sig, {}};
            for (std::size_t a = 0; a < sig.args.size(); ++a) {
                const ArgSpec& spec = sig.args[a];
                const std::string& tok = c.args[a];
                if (!spec.is_data()) {
                    kc.values.push_back(parse_scalar_token(spec, tok));
                } else if (is_dynamic_token(tok)) {
                    std::size_t n = 0;
                    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
                    if (ec != std::errc())
                        throw Error(ErrorCode::IllegalArgument, "dynamic size '" + tok + "' out of range");
                    dynamic_requests.emplace_back(n, sig.dtype);
                    dynamic_slots.emplace_back(calls.size(), a);
                    kc.values.emplace_back(DataRef{});
                } else {
                    kc.values.emplace_back(memory_.resolve_named(tok));
                }
            }
            calls.push_back(std::move(kc));
        } catch (const Error& e) {
            fail(e);
        }
    }

    auto dyn = memory_.acquire_dynamic(dynamic_requests, rng_);
    for (std::size_t i = 0; i < dyn.size(); ++i)
        calls[dynamic_slots[i].first].values[dynamic_slots[i].second] = dyn[i];

    for (std::size_t i = 0; i < calls.size(); ++i) {
        try {
            check_call(calls[i]);
            rngs.push_back(rng_.split(random_draws(*calls[i].signature, calls[i].bindings())));
        } catch (const Error& e) {
            throw Error(e.code(), "buffered call #" + std::to_string(unit.calls[i].first) + " (" +
                                      unit.calls[i].second.kernel + "): " + e.what());
        }
    }

    ResultLine line;
    std::atomic<bool> failed{false};
    auto run_one = [&](std::size_t i, ThreadPool* pool) {
        ExecContext ctx{rngs[i], pool};
        try {
            execute_kernel(calls[i], ctx);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NumericalFailure)
                throw Error(e.code(), "buffered call #" + std::to_string(unit.calls[i].first) + " (" +
                                          unit.calls[i].second.kernel + "): " + e.what());
            failed = true;
        }
    };

    counters_.start();
    const std::uint64_t t0 = timer_.read_cycles();
    if (!unit.parallel) {
        run_one(0, pool_.get());
    } else if (!calls.empty()) {
        if (pool_) {
            std::vector<std::function<void()>> tasks;
            for (std::size_t i = 0; i < calls.size(); ++i) tasks.emplace_back([&, i] { run_one(i, nullptr); });
            pool_->run_all(std::move(tasks));
        } else {
            for (std::size_t i = 0; i < calls.size(); ++i) run_one(i, nullptr);
        }
    }
    const std::uint64_t t1 = timer_.read_cycles();
    line.counters = counters_.stop();
    line.cycles = t1 >= t0 ? t1 - t0 : 0;
    line.counters.resize(counter_names_.size(), 0);
    line.failed = failed;
    return line;
}

std::vector<ResultLine> Sampler::run(const std::vector<Command>& commands) {
    std::vector<ResultLine> out;
    for (const auto& c : commands) feed(c, out);
    return out;
}

void Sampler::run_text(std::istream& in, std::ostream& out) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<ResultLine> lines;
    while (std::getline(in, line)) {
        ++line_no;
        auto c = parse_command(line, line_no);
        if (!c) continue;
        feed(*c, lines);
        for (const auto& r : lines) out << format_result_line(r) << '\n';
        if (!lines.empty()) out.flush();
        lines.clear();
    }
    if (in_block_) throw Error(ErrorCode::NestingViolation, "input ended inside a parallel block");
}

std::string sampler_info(const Sampler& s, const CounterProvider& counters) {
    std::ostringstream os;
    os << "timer: " << to_string(s.timer_backend()) << '\n'
       << "counters-available: " << (counters.available() ? "yes" : "no") << '\n'
       << "counter-provider: " << counters.name() << '\n';
    return os.str();
}

}  // namespace kernbench
