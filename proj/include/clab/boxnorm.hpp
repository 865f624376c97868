#pragma once

#include "clab/gridfn.hpp"
#include "clab/lattice.hpp"
#include "clab/numeric.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace clab {

enum class BoxStrategy { Naive, Factored, MonteCarlo };

/// How to evaluate a box norm with respect to `basis`.
struct BoxNormPlan {
    Basis basis;
    BoxStrategy strategy = BoxStrategy::Factored;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;

    static BoxNormPlan naive(Basis b) { return {std::move(b), BoxStrategy::Naive, 0, 0}; }
    static BoxNormPlan factored(Basis b) { return {std::move(b), BoxStrategy::Factored, 0, 0}; }
    static BoxNormPlan monte_carlo(Basis b, std::uint64_t samples, std::uint64_t seed) {
        return {std::move(b), BoxStrategy::MonteCarlo, samples, seed};
    }
};

// Inner products and norms take a family of 2^d functions indexed by
// omega in {0,1}^d; family[w] is f_omega where bit i of w is omega_{i+1}.

/// Negative inner values down to this threshold are treated as roundoff.
inline constexpr double kNegativeClamp = 1e-10;

/// E( prod_omega f_omega(x + omega t e) : x, t in Z_N^d ) by direct enumeration.
double box_inner_naive(std::span<const GridFunction> family, const Basis& e);

/// Same value through change of basis and iterated axis contraction.
double box_inner_factored(std::span<const GridFunction> family, const Basis& e);

/// Uniform (x, t) sampling in fixed blocks with per-block substreams.
Estimate box_inner_monte_carlo(std::span<const GridFunction> family, const Basis& e,
                               std::uint64_t samples, std::uint64_t seed);

double box_inner(std::span<const GridFunction> family, const BoxNormPlan& plan);

/// ||f||_{Box(e)^d}. Throws NumericalFailure when an exact strategy returns an
/// inner value below -kNegativeClamp.
double box_norm(const GridFunction& f, const BoxNormPlan& plan);

/// 2^d-th power of the norm (the raw inner value, clamped as in box_norm).
double box_norm_power(const GridFunction& f, const BoxNormPlan& plan);

/// (f o T)(x) = f(T x mod N), T the matrix with columns e_i.
GridFunction change_of_basis(const GridFunction& f, const Basis& e);

/// Permutation p with p[index(x)] = index(T x mod N).
std::vector<std::size_t> basis_permutation(std::int64_t modulus, const Basis& e);

}  // namespace clab
