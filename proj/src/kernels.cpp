#include "kernbench/kernels.hpp"

#include "kernbench/blas.hpp"
#include "kernbench/error.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <memory>

namespace kernbench {

namespace {

using Runner = std::function<void(const KernelCall&, ExecContext&)>;
using DrawCount = std::function<std::uint64_t(const CallBindings&)>;

struct Kernel {
    Signature signature;
    Runner run;
    DrawCount draws;
};

// ---- signature building blocks ------------------------------------------------

ArgSpec flag(std::string name, std::string allowed) { return {std::move(name), FlagArg{std::move(allowed)}}; }
ArgSpec dim(std::string name) { return {std::move(name), DimArg{0}}; }
ArgSpec inc(std::string name) { return {std::move(name), DimArg{1}}; }
ArgSpec scalar(std::string name) { return {std::move(name), ScalarArg{}}; }
ArgSpec ld(std::string name, std::string serves) { return {std::move(name), LdArg{std::move(serves)}}; }
ArgSpec path(std::string name) { return {std::move(name), PathArg{}}; }

ArgSpec matrix(std::string name, ShapeRule rows, ShapeRule cols, std::string ld_name,
               Structure s = Structure::General, std::string uplo_flag = "") {
    return {std::move(name),
            DataArg{std::move(rows), std::move(cols), s, std::move(ld_name), std::move(uplo_flag)}};
}

ArgSpec vector_arg(std::string name, std::string_view length) {
    return {std::move(name), DataArg{ShapeRule::plain(length), ShapeRule::plain("1"),
                                     Structure::General, "", ""}};
}

ShapeRule P(std::string_view e) { return ShapeRule::plain(e); }
ShapeRule If(std::string f, char v, std::string_view a, std::string_view b) {
    return ShapeRule::when(std::move(f), v, a, b);
}

std::uint64_t u(const CallBindings& b, const char* name) {
    return static_cast<std::uint64_t>(b.dims.at(name));
}
char fl(const CallBindings& b, const char* name) { return b.flags.at(name); }

// ---- exact flop counts (non-unit diagonal convention) --------------------------
//   gemm        2 m n k
//   gemv        2 m n
//   axpy        2 n
//   trsm, trmm  m^2 n (left) / m n^2 (right)
//   trsv        n^2
//   syrk        n (n+1) k          one multiply and one add per product in the triangle
//   getrf       sum_{k<min(m,n)} (m-k-1) (1 + 2 (n-k-1))   = 2n^3/3 - n^2/2 - n/6 for m = n
//   gesv        getrf(n, n) + nrhs (2 n^2 - n)
//   trti2/trtri (n^3 + 2n) / 3
std::uint64_t getrf_flops(std::uint64_t m, std::uint64_t n) {
    std::uint64_t total = 0;
    for (std::uint64_t k = 0; k < std::min(m, n); ++k) total += (m - k - 1) * (1 + 2 * (n - k - 1));
    return total;
}

std::uint64_t trinv_flops(std::uint64_t n) { return (n * n * n + 2 * n) / 3; }

// ---- argument access ----------------------------------------------------------

struct Args {
    const KernelCall& call;
    std::int64_t i(std::size_t k) const { return std::get<std::int64_t>(call.values[k]); }
    char f(std::size_t k) const { return std::get<char>(call.values[k]); }
    double s(std::size_t k) const { return std::get<double>(call.values[k]); }
    template <typename T>
    T* d(std::size_t k) const { return std::get<DataRef>(call.values[k]).as<T>(); }
    const DataRef& ref(std::size_t k) const { return std::get<DataRef>(call.values[k]); }
    const std::string& p(std::size_t k) const { return std::get<std::string>(call.values[k]); }
};

[[noreturn]] void numerical_failure(const std::string& kernel, ref::index_t info) {
    throw Error(ErrorCode::NumericalFailure,
                kernel + ": exactly zero pivot at position " + std::to_string(info));
}

template <typename T>
void fill_random(T* a, ref::index_t m, ref::index_t n, ref::index_t lda, CounterRng& rng) {
    for (ref::index_t j = 0; j < n; ++j)
        for (ref::index_t i = 0; i < m; ++i) a[i + j * lda] = static_cast<T>(rng.next_open01());
}

/// Symmetric positive definite: G^T G + n I with G uniform in (0, 1).
void porand(ref::index_t n, double* a, ref::index_t lda, CounterRng& rng) {
    std::vector<double> g(static_cast<std::size_t>(n * n));
    fill_random(g.data(), n, n, n, rng);
    for (ref::index_t j = 0; j < n; ++j)
        for (ref::index_t i = j; i < n; ++i) {
            double s = 0;
            for (ref::index_t p = 0; p < n; ++p) s += g[p + i * n] * g[p + j * n];
            if (i == j) s += static_cast<double>(n);
            a[i + j * lda] = s;
            a[j + i * lda] = s;
        }
}

// ---- registry -------------------------------------------------------------------

template <typename T>
Kernel make_gemm(const char* name, Dtype dt) {
    Signature s{name, dt,
                {flag("transA", "NT"), flag("transB", "NT"), dim("m"), dim("n"), dim("k"),
                 scalar("alpha"), matrix("A", If("transA", 'N', "m", "k"), If("transA", 'N', "k", "m"), "ldA"),
                 ld("ldA", "A"),
                 matrix("B", If("transB", 'N', "k", "n"), If("transB", 'N', "n", "k"), "ldB"),
                 ld("ldB", "B"), scalar("beta"), matrix("C", P("m"), P("n"), "ldC"), ld("ldC", "C")},
                {"2*m*n*k", [](const CallBindings& b) { return 2 * u(b, "m") * u(b, "n") * u(b, "k"); }},
                "general matrix-matrix product C := alpha op(A) op(B) + beta C"};
    return {std::move(s),
            [](const KernelCall& c, ExecContext& ctx) {
                Args a{c};
                ref::gemm<T>(a.f(0), a.f(1), a.i(2), a.i(3), a.i(4), static_cast<T>(a.s(5)), a.d<T>(6),
                             a.i(7), a.d<T>(8), a.i(9), static_cast<T>(a.s(10)), a.d<T>(11), a.i(12), ctx.pool);
            },
            nullptr};
}

template <typename T>
Kernel make_memset(const char* name, Dtype dt) {
    Signature s{name, dt, {scalar("value"), dim("n"), vector_arg("X", "n")}, {"0", nullptr},
                "fills every entry of X with value"};
    return {std::move(s),
            [](const KernelCall& c, ExecContext&) {
                Args a{c};
                std::fill_n(a.d<T>(2), a.i(1), static_cast<T>(a.s(0)));
            },
            nullptr};
}

template <typename T>
Kernel make_gerand(const char* name, Dtype dt) {
    Signature s{name, dt, {dim("m"), dim("n"), matrix("A", P("m"), P("n"), "ldA"), ld("ldA", "A")},
                {"0", nullptr}, "fills A with uniform random values in (0, 1)"};
    return {std::move(s),
            [](const KernelCall& c, ExecContext& ctx) {
                Args a{c};
                fill_random(a.d<T>(2), a.i(0), a.i(1), a.i(3), ctx.rng);
            },
            [](const CallBindings& b) { return u(b, "m") * u(b, "n"); }};
}

Kernel make_triangular_mm(const char* name, bool solve) {
    Signature s{name, Dtype::Double,
                {flag("side", "LR"), flag("uplo", "LU"), flag("transA", "NT"), flag("diag", "NU"),
                 dim("m"), dim("n"), scalar("alpha"),
                 matrix("A", If("side", 'L', "m", "n"), If("side", 'L', "m", "n"), "ldA", Structure::Lower, "uplo"),
                 ld("ldA", "A"), matrix("B", P("m"), P("n"), "ldB"), ld("ldB", "B")},
                {"side=L ? m*m*n : m*n*n",
                 [](const CallBindings& b) {
                     auto m = u(b, "m"), n = u(b, "n");
                     return fl(b, "side") == 'L' ? m * m * n : m * n * n;
                 }},
                solve ? "triangular solve with multiple right-hand sides B := alpha op(A)^-1 B"
                      : "triangular matrix-matrix product B := alpha op(A) B"};
    Runner run = [solve](const KernelCall& c, ExecContext&) {
        Args a{c};
        auto f = solve ? &ref::trsm<double> : &ref::trmm<double>;
        f(a.f(0), a.f(1), a.f(2), a.f(3), a.i(4), a.i(5), a.s(6), a.d<double>(7), a.i(8),
          a.d<double>(9), a.i(10));
    };
    return {std::move(s), std::move(run), nullptr};
}

std::map<std::string, Kernel, std::less<>> build_registry() {
    std::map<std::string, Kernel, std::less<>> r;
    auto add = [&r](Kernel k) {
        std::string key = k.signature.name;
        r.emplace(std::move(key), std::move(k));
    };

    add(make_gemm<double>("dgemm", Dtype::Double));
    add(make_gemm<float>("sgemm", Dtype::Single));
    add(make_triangular_mm("dtrsm", true));
    add(make_triangular_mm("dtrmm", false));

    add({{"dtrsv", Dtype::Double,
          {flag("uplo", "LU"), flag("trans", "NT"), flag("diag", "NU"), dim("n"),
           matrix("A", P("n"), P("n"), "ldA", Structure::Lower, "uplo"), ld("ldA", "A"),
           vector_arg("x", "1+(n-1)*incx"), inc("incx")},
          {"n*n", [](const CallBindings& b) { return u(b, "n") * u(b, "n"); }},
          "triangular solve with one right-hand side x := op(A)^-1 x"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             ref::trsv<double>(a.f(0), a.f(1), a.f(2), a.i(3), a.d<double>(4), a.i(5), a.d<double>(6), a.i(7));
         },
         nullptr});

    add({{"dsyrk", Dtype::Double,
          {flag("uplo", "LU"), flag("trans", "NT"), dim("n"), dim("k"), scalar("alpha"),
           matrix("A", If("trans", 'N', "n", "k"), If("trans", 'N', "k", "n"), "ldA"), ld("ldA", "A"),
           scalar("beta"), matrix("C", P("n"), P("n"), "ldC", Structure::Lower, "uplo"), ld("ldC", "C")},
          {"n*(n+1)*k", [](const CallBindings& b) { return u(b, "n") * (u(b, "n") + 1) * u(b, "k"); }},
          "symmetric rank-k update C := alpha op(A) op(A)^T + beta C"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             ref::syrk<double>(a.f(0), a.f(1), a.i(2), a.i(3), a.s(4), a.d<double>(5), a.i(6), a.s(7),
                               a.d<double>(8), a.i(9));
         },
         nullptr});

    add({{"dgetrf", Dtype::Double,
          {dim("m"), dim("n"), matrix("A", P("m"), P("n"), "ldA"), ld("ldA", "A")},
          {"sum_{k<min(m,n)} (m-k-1)*(1+2*(n-k-1))",
           [](const CallBindings& b) { return getrf_flops(u(b, "m"), u(b, "n")); }},
          "LU factorization with partial pivoting (pivot vector kept internal)"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             std::vector<ref::index_t> ipiv(static_cast<std::size_t>(std::min(a.i(0), a.i(1))));
             if (auto info = ref::getrf<double>(a.i(0), a.i(1), a.d<double>(2), a.i(3), ipiv.data()))
                 numerical_failure("dgetrf", info);
         },
         nullptr});

    add({{"dgesv", Dtype::Double,
          {dim("n"), dim("nrhs"), matrix("A", P("n"), P("n"), "ldA"), ld("ldA", "A"),
           matrix("B", P("n"), P("nrhs"), "ldB"), ld("ldB", "B")},
          {"getrf(n,n) + nrhs*(2*n*n-n)",
           [](const CallBindings& b) {
               auto n = u(b, "n");
               return getrf_flops(n, n) + u(b, "nrhs") * (2 * n * n - n);
           }},
          "solves A X = B via LU with partial pivoting"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             if (auto info = ref::gesv<double>(a.i(0), a.i(1), a.d<double>(2), a.i(3), a.d<double>(4), a.i(5)))
                 numerical_failure("dgesv", info);
         },
         nullptr});

    for (bool blocked : {false, true}) {
        const char* name = blocked ? "dtrtri" : "dtrti2";
        add({{name, Dtype::Double,
              {flag("uplo", "LU"), flag("diag", "NU"), dim("n"),
               matrix("A", P("n"), P("n"), "ldA", Structure::Lower, "uplo"), ld("ldA", "A")},
              {"(n*n*n+2*n)/3", [](const CallBindings& b) { return trinv_flops(u(b, "n")); }},
              blocked ? "blocked triangular inverse" : "unblocked triangular inverse"},
             [blocked, name](const KernelCall& c, ExecContext&) {
                 Args a{c};
                 auto info = blocked ? ref::trtri<double>(a.f(0), a.f(1), a.i(2), a.d<double>(3), a.i(4))
                                     : ref::trti2<double>(a.f(0), a.f(1), a.i(2), a.d<double>(3), a.i(4));
                 if (info) numerical_failure(name, info);
             },
             nullptr});
    }

    add({{"daxpy", Dtype::Double,
          {dim("n"), scalar("alpha"), vector_arg("x", "1+(n-1)*incx"), inc("incx"),
           vector_arg("y", "1+(n-1)*incy"), inc("incy")},
          {"2*n", [](const CallBindings& b) { return 2 * u(b, "n"); }},
          "y := alpha x + y"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             ref::axpy<double>(a.i(0), a.s(1), a.d<double>(2), a.i(3), a.d<double>(4), a.i(5));
         },
         nullptr});

    add({{"dgemv", Dtype::Double,
          {flag("trans", "NT"), dim("m"), dim("n"), scalar("alpha"),
           matrix("A", P("m"), P("n"), "ldA"), ld("ldA", "A"),
           {"x", DataArg{If("trans", 'N', "1+(n-1)*incx", "1+(m-1)*incx"), P("1"), Structure::General, "", ""}},
           inc("incx"), scalar("beta"),
           {"y", DataArg{If("trans", 'N', "1+(m-1)*incy", "1+(n-1)*incy"), P("1"), Structure::General, "", ""}},
           inc("incy")},
          {"2*m*n", [](const CallBindings& b) { return 2 * u(b, "m") * u(b, "n"); }},
          "matrix-vector product y := alpha op(A) x + beta y"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             ref::gemv<double>(a.f(0), a.i(1), a.i(2), a.s(3), a.d<double>(4), a.i(5), a.d<double>(6),
                               a.i(7), a.s(8), a.d<double>(9), a.i(10));
         },
         nullptr});

    add(make_memset<double>("dmemset", Dtype::Double));
    add(make_memset<float>("smemset", Dtype::Single));
    add(make_gerand<double>("dgerand", Dtype::Double));
    add(make_gerand<float>("sgerand", Dtype::Single));

    add({{"dporand", Dtype::Double,
          {dim("n"), matrix("A", P("n"), P("n"), "ldA", Structure::SymmetricPd), ld("ldA", "A")},
          {"0", nullptr},
          "random symmetric positive definite matrix G^T G + n I"},
         [](const KernelCall& c, ExecContext& ctx) {
             Args a{c};
             porand(a.i(0), a.d<double>(1), a.i(2), ctx.rng);
         },
         [](const CallBindings& b) { return u(b, "n") * u(b, "n"); }});

    add({{"dreadfile", Dtype::Double, {path("file"), dim("n"), vector_arg("X", "n")}, {"0", nullptr},
          "reads n raw little-endian doubles from file into X"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             read_binary(a.p(0), a.ref(2).base, static_cast<std::size_t>(a.i(1)) * sizeof(double));
         },
         nullptr});
    add({{"dwritefile", Dtype::Double, {path("file"), dim("n"), vector_arg("X", "n")}, {"0", nullptr},
          "writes the first n entries of X to file as raw little-endian doubles"},
         [](const KernelCall& c, ExecContext&) {
             Args a{c};
             write_binary(a.p(0), a.ref(2).base, static_cast<std::size_t>(a.i(1)) * sizeof(double));
         },
         nullptr});
    return r;
}

const std::map<std::string, Kernel, std::less<>>& registry() {
    static const auto r = build_registry();
    return r;
}

const Kernel& lookup_kernel(std::string_view name) {
    auto it = registry().find(name);
    if (it == registry().end())
        throw Error(ErrorCode::UnknownKernel, "unknown kernel '" + std::string(name) + "'");
    return it->second;
}

bool value_matches(const ArgKind& kind, const ArgValue& v) {
    if (std::holds_alternative<FlagArg>(kind)) return std::holds_alternative<char>(v);
    if (std::holds_alternative<DimArg>(kind) || std::holds_alternative<LdArg>(kind))
        return std::holds_alternative<std::int64_t>(v);
    if (std::holds_alternative<ScalarArg>(kind)) return std::holds_alternative<double>(v);
    if (std::holds_alternative<DataArg>(kind)) return std::holds_alternative<DataRef>(v);
    return std::holds_alternative<std::string>(v);
}

}  // namespace

CallBindings KernelCall::bindings() const {
    CallBindings b;
    for (std::size_t i = 0; i < signature->args.size() && i < values.size(); ++i) {
        const auto& a = signature->args[i];
        if (const auto* c = std::get_if<char>(&values[i])) b.flags[a.name] = *c;
        else if (const auto* n = std::get_if<std::int64_t>(&values[i])) b.dims[a.name] = *n;
    }
    return b;
}

const Signature& lookup_signature(std::string_view name) { return lookup_kernel(name).signature; }

bool has_kernel(std::string_view name) { return registry().count(name) != 0; }

std::vector<const Signature*> all_signatures() {
    std::vector<const Signature*> out;
    for (const auto& [name, k] : registry()) out.push_back(&k.signature);
    return out;
}

std::uint64_t random_draws(const Signature& sig, const CallBindings& b) {
    const auto& k = lookup_kernel(sig.name);
    return k.draws ? k.draws(b) : 0;
}

void check_call(const KernelCall& call) {
    if (!call.signature) throw Error(ErrorCode::IllegalArgument, "call without signature");
    const Signature& sig = *call.signature;
    if (call.values.size() != sig.args.size())
        throw Error(ErrorCode::IllegalArgument, sig.name + ": expected " + std::to_string(sig.args.size()) +
                                                    " arguments, got " + std::to_string(call.values.size()));
    for (std::size_t i = 0; i < sig.args.size(); ++i)
        if (!value_matches(sig.args[i].kind, call.values[i]))
            throw Error(ErrorCode::IllegalArgument, sig.name + ": argument " + sig.args[i].name +
                                                        " must be of kind " + kind_name(sig.args[i].kind));
    CallBindings b = call.bindings();
    auto shapes = derive_shapes(sig, b);
    std::size_t next = 0;
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
        const auto* d = std::get_if<DataArg>(&sig.args[i].kind);
        if (!d) continue;
        const OperandShape& shape = shapes[next++];
        const DataRef& region = std::get<DataRef>(call.values[i]);
        if (region.dtype != sig.dtype)
            throw Error(ErrorCode::IllegalArgument, sig.name + ": operand " + shape.name + " has dtype " +
                                                        to_string(region.dtype) + ", expected " +
                                                        to_string(sig.dtype));
        std::int64_t ldv = shape.rows;
        if (!d->ld.empty()) {
            ldv = b.dims.at(d->ld);
            if (ldv < shape.min_ld)
                throw Error(ErrorCode::ShapeMismatch, sig.name + ": " + d->ld + "=" + std::to_string(ldv) +
                                                          " below minimum " + std::to_string(shape.min_ld));
        }
        auto need = static_cast<std::size_t>(shape.footprint(ldv));
        if (region.elems < need)
            throw Error(ErrorCode::CapacityOverflow, sig.name + ": operand " + shape.name + " needs " +
                                                         std::to_string(need) + " elements, region holds " +
                                                         std::to_string(region.elems));
    }
}

void execute_kernel(const KernelCall& call, ExecContext& ctx) {
    check_call(call);
    lookup_kernel(call.signature->name).run(call, ctx);
}

static_assert(std::endian::native == std::endian::little, "raw file I/O assumes a little-endian host");

void write_binary(const std::string& file, const std::byte* data, std::size_t bytes) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + file + "' for writing");
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw Error(ErrorCode::Io, "write to '" + file + "' failed");
}

void read_binary(const std::string& file, std::byte* data, std::size_t bytes) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + file + "' for reading");
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes)
        throw Error(ErrorCode::Io, "'" + file + "' holds fewer than " + std::to_string(bytes) + " bytes");
}

}  // namespace kernbench
