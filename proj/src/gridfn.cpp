#include "clab/gridfn.hpp"
#include "clab/error.hpp"
#include "clab/numeric.hpp"
#include "clab/rng.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace clab {

namespace {

constexpr char kMagic[8] = {'C', 'L', 'A', 'B', 'G', 'R', 'I', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kMaxValues = std::size_t{1} << 31;

template <class T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>)
        bits = std::bit_cast<std::uint64_t>(value);
    else
        bits = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw InvalidInput("grid file truncated");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>)
        return std::bit_cast<double>(bits);
    else
        return static_cast<T>(bits);
}

}  // namespace

std::size_t grid_size(std::int64_t modulus, std::size_t dim) {
    if (modulus < 1) throw InvalidInput("grid modulus must be >= 1");
    if (dim < 1) throw InvalidInput("grid dimension must be >= 1");
    std::size_t n = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        if (n > kMaxValues / static_cast<std::size_t>(modulus))
            throw InvalidInput("grid N^d = " + std::to_string(modulus) + "^" + std::to_string(dim) +
                               " is too large for dense storage");
        n *= static_cast<std::size_t>(modulus);
    }
    return n;
}

GridFunction::GridFunction(std::int64_t modulus, std::size_t dim, double fill)
    : modulus_(modulus), dim_(dim), values_(grid_size(modulus, dim), fill) {
    if (!std::isfinite(fill)) throw InvalidInput("grid values must be finite");
    nonnegative_ = fill >= 0.0;
}

GridFunction::GridFunction(std::int64_t modulus, std::size_t dim, std::vector<double> values)
    : modulus_(modulus), dim_(dim), values_(std::move(values)) {
    if (values_.size() != grid_size(modulus, dim)) throw InvalidInput("grid value count must equal N^d");
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidInput("grid values must be finite");
        if (v < 0.0) nonnegative_ = false;
    }
}

GridFunction GridFunction::from_fn(std::int64_t modulus, std::size_t dim,
                                   const std::function<double(std::span<const std::int64_t>)>& fn) {
    std::vector<double> values(grid_size(modulus, dim));
    std::vector<std::int64_t> x(dim, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = fn(x);
        for (std::size_t j = 0; j < dim; ++j) {
            if (++x[j] < modulus) break;
            x[j] = 0;
        }
    }
    return GridFunction(modulus, dim, std::move(values));
}

std::size_t GridFunction::index_of(std::span<const std::int64_t> x) const {
    if (x.size() != dim_) throw InvalidInput("coordinate count does not match grid dimension");
    std::size_t idx = 0;
    for (std::size_t j = dim_; j-- > 0;)
        idx = idx * static_cast<std::size_t>(modulus_) + static_cast<std::size_t>(mod_floor(x[j], modulus_));
    return idx;
}

void GridFunction::coords_of(std::size_t index, std::span<std::int64_t> out) const {
    for (std::size_t j = 0; j < dim_; ++j) {
        out[j] = static_cast<std::int64_t>(index % static_cast<std::size_t>(modulus_));
        index /= static_cast<std::size_t>(modulus_);
    }
}

double expectation(const GridFunction& f) {
    return stable_sum(f.values()) / static_cast<double>(f.size());
}

GridFunction tensor(std::span<const GridFunction> factors) {
    if (factors.empty()) throw InvalidInput("tensor: no factors");
    const std::int64_t n = factors.front().modulus();
    for (const auto& f : factors) {
        if (f.dim() != 1) throw InvalidInput("tensor: factors must be one-dimensional");
        if (f.modulus() != n) throw InvalidInput("tensor: mismatched moduli");
    }
    const std::size_t d = factors.size();
    std::vector<double> values(grid_size(n, d));
    // Build axis by axis: after step k the first N^k entries hold the k-fold product.
    values[0] = 1.0;
    std::size_t filled = 1;
    for (std::size_t k = 0; k < d; ++k) {
        const auto fv = factors[k].values();
        for (std::size_t a = static_cast<std::size_t>(n); a-- > 0;)
            for (std::size_t i = 0; i < filled; ++i) values[a * filled + i] = values[i] * fv[a];
        filled *= static_cast<std::size_t>(n);
    }
    return GridFunction(n, d, std::move(values));
}

GridFunction linear_combination(double a, const GridFunction& f, double b, const GridFunction& g) {
    if (!f.same_shape(g)) throw InvalidInput("linear_combination: shape mismatch");
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i] + b * g[i];
    return GridFunction(f.modulus(), f.dim(), std::move(out));
}

GridFunction scaled(const GridFunction& f, double c) {
    std::vector<double> out(f.values().begin(), f.values().end());
    for (auto& v : out) v *= c;
    return GridFunction(f.modulus(), f.dim(), std::move(out));
}

GridFunction pointwise_product(const GridFunction& f, const GridFunction& g) {
    if (!f.same_shape(g)) throw InvalidInput("pointwise_product: shape mismatch");
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * g[i];
    return GridFunction(f.modulus(), f.dim(), std::move(out));
}

GridFunction random_probe(const GridFunction& bound, std::uint64_t seed) {
    if (!bound.nonnegative()) throw InvalidInput("random_probe: bound has negative entries");
    Rng rng(seed);
    std::vector<double> out(bound.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = bound[i] * rng.signed_unit();
    return GridFunction(bound.modulus(), bound.dim(), std::move(out));
}

GridFunction random_fraction_probe(const GridFunction& bound, std::uint64_t seed) {
    if (!bound.nonnegative()) throw InvalidInput("random_fraction_probe: bound has negative entries");
    Rng rng(seed);
    std::vector<double> out(bound.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = bound[i] * rng.uniform01();
    return GridFunction(bound.modulus(), bound.dim(), std::move(out));
}

void write_binary(std::ostream& out, const GridFunction& f) {
    out.write(kMagic, sizeof kMagic);
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(f.modulus()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.dim()));
    put_le<std::uint32_t>(out, f.nonnegative() ? 1u : 0u);
    for (double v : f.values()) put_le<double>(out, v);
    if (!out) throw InvalidInput("write_binary: stream failure");
}

GridFunction read_binary(std::istream& in) {
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw InvalidInput("read_binary: bad magic");
    if (get_le<std::uint32_t>(in) != kVersion) throw InvalidInput("read_binary: unsupported version");
    const auto n = static_cast<std::int64_t>(get_le<std::uint64_t>(in));
    const auto d = get_le<std::uint32_t>(in);
    const auto flags = get_le<std::uint32_t>(in);
    std::vector<double> values(grid_size(n, d));
    for (auto& v : values) v = get_le<double>(in);
    GridFunction f(n, d, std::move(values));
    if ((flags & 1u) && !f.nonnegative()) throw InvalidInput("read_binary: nonnegative flag contradicts data");
    return f;
}

void write_csv(std::ostream& out, const GridFunction& f) {
    if (f.dim() > 2) throw InvalidInput("write_csv: only d <= 2 is supported");
    out << (f.dim() == 1 ? "x1,value\n" : "x1,x2,value\n");
    out.precision(17);
    std::int64_t x[2];
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.coords_of(i, std::span<std::int64_t>(x, f.dim()));
        out << x[0] << ',';
        if (f.dim() == 2) out << x[1] << ',';
        out << f[i] << '\n';
    }
}

}  // namespace clab
