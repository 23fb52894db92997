#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kernbench {

/// Hardware-counter backend. The sampler calls configure() on set_counters and
/// start()/stop() around every measured unit.
class CounterProvider {
public:
    virtual ~CounterProvider() = default;

    virtual std::string name() const = 0;
    virtual bool available() const = 0;
    virtual void configure(const std::vector<std::string>& counters) = 0;
    virtual void start() = 0;
    /// One value per configured counter.
    virtual std::vector<std::uint64_t> stop() = 0;
};

/// Portable default: reports zeros and flags itself unavailable.
class NullCounterProvider final : public CounterProvider {
public:
    std::string name() const override { return "none"; }
    bool available() const override { return false; }
    void configure(const std::vector<std::string>& counters) override { size_ = counters.size(); }
    void start() override {}
    std::vector<std::uint64_t> stop() override { return std::vector<std::uint64_t>(size_, 0); }

private:
    std::size_t size_ = 0;
};

}  // namespace kernbench
