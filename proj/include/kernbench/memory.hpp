#pragma once

#include "kernbench/kernels.hpp"
#include "kernbench/rng.hpp"
#include "kernbench/signature.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kernbench {

/// 64-byte aligned, uninitialised byte block.
class AlignedBlock {
public:
    AlignedBlock() = default;
    explicit AlignedBlock(std::size_t bytes);

    std::byte* data() const { return data_.get(); }
    std::size_t size() const { return size_; }

private:
    struct Deleter {
        void operator()(std::byte* p) const;
    };
    std::unique_ptr<std::byte[], Deleter> data_;
    std::size_t size_ = 0;
};

/// Named regions (malloc/offset/free) plus a per-unit dynamic arena for
/// integer-sized anonymous operands.
class MemoryManager {
public:
    static constexpr std::size_t kDefaultArenaCap = std::size_t{1} << 31;

    explicit MemoryManager(std::size_t arena_cap_elems = kDefaultArenaCap);

    /// Allocates and fills with uniform (0, 1) values drawn from `rng`.
    void malloc(Dtype dtype, const std::string& name, std::int64_t elems, CounterRng& rng);
    /// View of `source` starting `offset` elements in; shares its storage.
    void offset(Dtype dtype, const std::string& source, std::int64_t offset, const std::string& name);
    void free(const std::string& name);

    bool contains(std::string_view name) const;
    /// Resolves `name` or `name+K`. Throws Error{AllocationMissing | IllegalArgument}.
    DataRef resolve_named(std::string_view token) const;

    /// Bytes of a named region, for inspection.
    std::span<const std::byte> bytes(std::string_view name) const;
    std::vector<std::string> names() const;

    /// Hands out pairwise-disjoint buffers of the requested element counts, valid
    /// until the next call. Contents are refilled from `rng`.
    /// Throws Error{ArenaExhausted} beyond the arena cap.
    std::vector<DataRef> acquire_dynamic(const std::vector<std::pair<std::size_t, Dtype>>& requests,
                                         CounterRng& rng);

    std::size_t arena_cap() const { return arena_cap_; }

private:
    struct Region {
        std::shared_ptr<AlignedBlock> storage;
        std::size_t byte_offset = 0;
        std::size_t elems = 0;
        Dtype dtype = Dtype::Double;
    };

    const Region& find(std::string_view name) const;

    std::map<std::string, Region, std::less<>> named_;
    AlignedBlock arena_;
    std::size_t arena_cap_;
};

/// Token forms for data arguments: identifier, identifier+K, or unsigned integer.
bool is_dynamic_token(std::string_view token);

}  // namespace kernbench
