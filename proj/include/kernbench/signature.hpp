#pragma once

#include "kernbench/expression.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace kernbench {

enum class Dtype { Single, Double };
enum class Structure { General, Lower, Upper, SymmetricPd };

const char* to_string(Dtype d);
const char* to_string(Structure s);
std::size_t element_size(Dtype d);
/// 's' -> Single, 'd' -> Double.
std::optional<Dtype> dtype_from_prefix(char c);

/// Flag and dim/ld values bound for one call.
struct CallBindings {
    std::map<std::string, char, std::less<>> flags;
    Bindings dims;
};

/// Either a plain expression or `flag=C ? then : otherwise`.
struct ShapeRule {
    std::optional<std::pair<std::string, char>> condition;
    Expression then_expr;
    Expression else_expr;

    static ShapeRule plain(std::string_view expr);
    static ShapeRule when(std::string flag, char value, std::string_view then_expr,
                          std::string_view else_expr);

    std::int64_t eval(const CallBindings& b) const;
    std::string text() const;
    std::set<std::string> identifiers() const;
};

struct FlagArg {
    std::string allowed;
};
struct DimArg {
    std::int64_t min_value = 0;
};
struct ScalarArg {};
/// Minimum value is the row count of the operand named by `serves`.
struct LdArg {
    std::string serves;
};
struct DataArg {
    ShapeRule rows;
    ShapeRule cols;
    Structure structure = Structure::General;
    /// Name of the serving ld argument; empty for contiguous vectors.
    std::string ld;
    /// When set, the structure is Lower or Upper according to this flag's value.
    std::string uplo_flag;
};
/// File path (readfile/writefile only).
struct PathArg {};

using ArgKind = std::variant<FlagArg, DimArg, ScalarArg, LdArg, DataArg, PathArg>;

const char* kind_name(const ArgKind& k);

struct ArgSpec {
    std::string name;
    ArgKind kind;

    bool is_data() const { return std::holds_alternative<DataArg>(kind); }
};

struct FlopRule {
    std::string text;
    std::function<std::uint64_t(const CallBindings&)> count;
};

struct Signature {
    std::string name;
    Dtype dtype = Dtype::Double;
    std::vector<ArgSpec> args;
    FlopRule flops;
    std::string description;

    const ArgSpec* find(std::string_view arg) const;
    std::optional<std::size_t> index_of(std::string_view arg) const;
};

struct OperandShape {
    std::string name;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::int64_t min_ld = 1;
    Structure structure = Structure::General;
    bool vector = false;

    /// Elements a region must hold for this operand given its leading dimension.
    std::int64_t footprint(std::int64_t ld) const {
        if (rows == 0 || cols == 0) return 0;
        return ld * (cols - 1) + rows;
    }
};

/// Checks flags against their allowed sets and dims against their minimum.
/// Throws Error{IllegalArgument}.
void check_bindings(const Signature& sig, const CallBindings& b);

/// Per data operand, in signature order. min_ld is max(1, rows).
std::vector<OperandShape> derive_shapes(const Signature& sig, const CallBindings& b);

std::uint64_t flop_count(const Signature& sig, const CallBindings& b);

}  // namespace kernbench
