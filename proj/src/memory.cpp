#include "kernbench/memory.hpp"

#include "kernbench/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <new>

namespace kernbench {

namespace {

constexpr std::size_t kAlign = 64;

std::size_t round_up(std::size_t n) { return (n + kAlign - 1) / kAlign * kAlign; }

void fill_uniform(std::byte* base, std::size_t elems, Dtype dtype, CounterRng& rng) {
    if (dtype == Dtype::Double) {
        auto* p = reinterpret_cast<double*>(base);
        for (std::size_t i = 0; i < elems; ++i) p[i] = rng.next_open01();
    } else {
        auto* p = reinterpret_cast<float*>(base);
        for (std::size_t i = 0; i < elems; ++i) p[i] = static_cast<float>(rng.next_open01());
    }
}

}  // namespace

AlignedBlock::AlignedBlock(std::size_t bytes)
    : data_(static_cast<std::byte*>(::operator new(round_up(std::max<std::size_t>(bytes, 1)),
                                                   std::align_val_t{kAlign}))),
      size_(bytes) {}

void AlignedBlock::Deleter::operator()(std::byte* p) const {
    ::operator delete(p, std::align_val_t{kAlign});
}

MemoryManager::MemoryManager(std::size_t arena_cap_elems) : arena_cap_(arena_cap_elems) {}

void MemoryManager::malloc(Dtype dtype, const std::string& name, std::int64_t elems, CounterRng& rng) {
    if (named_.count(name))
        throw Error(ErrorCode::IllegalArgument, "variable '" + name + "' already exists");
    auto n = static_cast<std::size_t>(elems);
    Region r;
    r.storage = std::make_shared<AlignedBlock>(n * element_size(dtype));
    r.elems = n;
    r.dtype = dtype;
    CounterRng sub = rng.split(n);
    fill_uniform(r.storage->data(), n, dtype, sub);
    named_.emplace(name, std::move(r));
}

void MemoryManager::offset(Dtype dtype, const std::string& source, std::int64_t offset,
                           const std::string& name) {
    const Region& src = find(source);
    if (src.dtype != dtype)
        throw Error(ErrorCode::IllegalArgument, "offset of '" + source + "' uses a different dtype");
    if (offset < 0 || static_cast<std::size_t>(offset) > src.elems)
        throw Error(ErrorCode::CapacityOverflow, "offset " + std::to_string(offset) + " lies outside '" +
                                                     source + "' (" + std::to_string(src.elems) + " elements)");
    if (named_.count(name))
        throw Error(ErrorCode::IllegalArgument, "variable '" + name + "' already exists");
    Region r = src;
    r.byte_offset += static_cast<std::size_t>(offset) * element_size(dtype);
    r.elems -= static_cast<std::size_t>(offset);
    named_.emplace(name, std::move(r));
}

void MemoryManager::free(const std::string& name) {
    if (named_.erase(name) == 0)
        throw Error(ErrorCode::AllocationMissing, "free of unknown variable '" + name + "'");
}

bool MemoryManager::contains(std::string_view name) const { return named_.count(name) != 0; }

const MemoryManager::Region& MemoryManager::find(std::string_view name) const {
    auto it = named_.find(name);
    if (it == named_.end())
        throw Error(ErrorCode::AllocationMissing, "unknown variable '" + std::string(name) + "'");
    return it->second;
}

DataRef MemoryManager::resolve_named(std::string_view token) const {
    std::string_view name = token;
    std::size_t off = 0;
    if (auto plus = token.find('+'); plus != std::string_view::npos) {
        name = token.substr(0, plus);
        auto digits = token.substr(plus + 1);
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), off);
        if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size())
            throw Error(ErrorCode::IllegalArgument, "malformed offset token '" + std::string(token) + "'");
    }
    const Region& r = find(name);
    if (off > r.elems)
        throw Error(ErrorCode::CapacityOverflow, "offset token '" + std::string(token) + "' exceeds '" +
                                                     std::string(name) + "' (" + std::to_string(r.elems) +
                                                     " elements)");
    return {r.storage->data() + r.byte_offset + off * element_size(r.dtype), r.elems - off, r.dtype};
}

std::span<const std::byte> MemoryManager::bytes(std::string_view name) const {
    const Region& r = find(name);
    return {r.storage->data() + r.byte_offset, r.elems * element_size(r.dtype)};
}

std::vector<std::string> MemoryManager::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : named_) out.push_back(k);
    return out;
}

std::vector<DataRef> MemoryManager::acquire_dynamic(
    const std::vector<std::pair<std::size_t, Dtype>>& requests, CounterRng& rng) {
    std::size_t total_elems = 0, total_bytes = 0;
    for (const auto& [n, dt] : requests) {
        total_elems += n;
        total_bytes += round_up(n * element_size(dt));
    }
    if (total_elems > arena_cap_)
        throw Error(ErrorCode::ArenaExhausted, "dynamic memory request of " + std::to_string(total_elems) +
                                                   " elements exceeds the arena cap of " +
                                                   std::to_string(arena_cap_));
    if (arena_.size() < total_bytes) arena_ = AlignedBlock(total_bytes);
    std::vector<DataRef> out;
    std::size_t cursor = 0;
    for (const auto& [n, dt] : requests) {
        std::byte* base = arena_.data() + cursor;
        CounterRng sub = rng.split(n);
        fill_uniform(base, n, dt, sub);
        out.push_back({base, n, dt});
        cursor += round_up(n * element_size(dt));
    }
    return out;
}

bool is_dynamic_token(std::string_view token) {
    return !token.empty() &&
           std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace kernbench
