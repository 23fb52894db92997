#pragma once

#include "kernbench/rng.hpp"
#include "kernbench/signature.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace kernbench {

class ThreadPool;

/// A typed window onto sampler memory.
struct DataRef {
    std::byte* base = nullptr;
    std::size_t elems = 0;
    Dtype dtype = Dtype::Double;

    template <typename T>
    T* as() const { return reinterpret_cast<T*>(base); }
};

using ArgValue = std::variant<char, std::int64_t, double, DataRef, std::string>;

/// A fully concrete call: one value per signature argument, in order.
struct KernelCall {
    const Signature* signature = nullptr;
    std::vector<ArgValue> values;

    CallBindings bindings() const;
};

struct ExecContext {
    CounterRng rng;
    /// Used by gemm to split rows of C; null means single-threaded.
    ThreadPool* pool = nullptr;
};

/// Throws Error{UnknownKernel}.
const Signature& lookup_signature(std::string_view name);
bool has_kernel(std::string_view name);
std::vector<const Signature*> all_signatures();

/// Random draws a call consumes (gerand/porand), so the caller can reserve them up front.
std::uint64_t random_draws(const Signature& sig, const CallBindings& b);

/// Checks value kinds, leading dimensions, region capacities and dtypes.
/// Throws Error{IllegalArgument | ShapeMismatch | CapacityOverflow}.
void check_call(const KernelCall& call);

/// Runs check_call, then the reference implementation.
/// Throws Error{NumericalFailure} for exactly singular getrf/gesv/trti2/trtri inputs.
void execute_kernel(const KernelCall& call, ExecContext& ctx);

/// Raw little-endian IEEE-754 file I/O used by readfile/writefile.
void write_binary(const std::string& path, const std::byte* data, std::size_t bytes);
void read_binary(const std::string& path, std::byte* data, std::size_t bytes);

}  // namespace kernbench
