#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace clab {

/// A real-valued function on Z_N^d stored densely.
///
/// Index of (x_1, ..., x_d) is x_1 + N x_2 + ... + N^{d-1} x_d (x_1 fastest).
/// Values are immutable after construction; every operation returns a new
/// function.
class GridFunction {
public:
    GridFunction(std::int64_t modulus, std::size_t dim, double fill = 0.0);
    GridFunction(std::int64_t modulus, std::size_t dim, std::vector<double> values);

    static GridFunction constant(std::int64_t modulus, std::size_t dim, double c) {
        return GridFunction(modulus, dim, c);
    }
    /// Builds f(x) = fn(x) for every x in Z_N^d.
    static GridFunction from_fn(std::int64_t modulus, std::size_t dim,
                                const std::function<double(std::span<const std::int64_t>)>& fn);

    std::int64_t modulus() const noexcept { return modulus_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Reduces every coordinate mod N.
    std::size_t index_of(std::span<const std::int64_t> x) const;
    void coords_of(std::size_t index, std::span<std::int64_t> out) const;
    double at(std::span<const std::int64_t> x) const { return values_[index_of(x)]; }

    bool nonnegative() const noexcept { return nonnegative_; }
    bool same_shape(const GridFunction& other) const noexcept {
        return modulus_ == other.modulus_ && dim_ == other.dim_;
    }

    std::vector<double> release() && { return std::move(values_); }

private:
    std::int64_t modulus_;
    std::size_t dim_;
    std::vector<double> values_;
    bool nonnegative_ = true;
};

/// N^d, throwing when it does not fit in memory-addressable size.
std::size_t grid_size(std::int64_t modulus, std::size_t dim);

/// Mean of all N^d values (blockwise compensated summation).
double expectation(const GridFunction& f);

/// output(x_1..x_d) = prod_i factor_i(x_i). Factors must be one-dimensional
/// with a common modulus.
GridFunction tensor(std::span<const GridFunction> factors);

/// a f + b g
GridFunction linear_combination(double a, const GridFunction& f, double b, const GridFunction& g);
GridFunction scaled(const GridFunction& f, double c);
GridFunction pointwise_product(const GridFunction& f, const GridFunction& g);

/// f(x) = bound(x) * u_x with u_x independent and uniform on [-1, 1], drawn
/// in index order from Rng(seed). Deterministic given the seed.
GridFunction random_probe(const GridFunction& bound, std::uint64_t seed);

/// Same with u_x uniform on [0, 1] (nonnegative probes 0 <= f <= bound).
GridFunction random_fraction_probe(const GridFunction& bound, std::uint64_t seed);

/// Binary format: "CLABGRID" magic, u32 version, u64 N, u32 d, u32 flags, then
/// N^d little-endian IEEE-754 doubles. Flag bit 0: nonnegative.
void write_binary(std::ostream& out, const GridFunction& f);
GridFunction read_binary(std::istream& in);

/// CSV export for d <= 2: header "x1,value" or "x1,x2,value".
void write_csv(std::ostream& out, const GridFunction& f);

}  // namespace clab
