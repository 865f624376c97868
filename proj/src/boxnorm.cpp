#include "clab/boxnorm.hpp"
#include "box_kernels.hpp"
#include "clab/error.hpp"
#include "clab/parallel.hpp"
#include "clab/rng.hpp"

#include <cmath>
#include <string>

namespace clab {

namespace {

constexpr std::uint64_t kSampleBlock = 1 << 16;

void check_family(std::span<const GridFunction> family, const Basis& e) {
    if (family.empty()) throw InvalidInput("box inner product: empty family");
    const GridFunction& first = family.front();
    const std::size_t d = first.dim();
    if (family.size() != (std::size_t{1} << d))
        throw InvalidInput("box inner product: family must have 2^d = " + std::to_string(1u << d) + " members");
    for (const auto& f : family)
        if (!f.same_shape(first)) throw InvalidInput("box inner product: mismatched shapes in family");
    if (e.count() != d || e.dim() != d) throw InvalidInput("box inner product: basis must have d vectors in Z^d");
    if (e.modulus() != 0 && e.modulus() != first.modulus())
        throw InvalidInput("box inner product: basis modulus differs from the grid modulus");
}

// Offsets omega t e (mod N) for every omega, as coordinate vectors.
void vertex_offsets(const std::vector<VecZd>& reduced, std::span<const std::int64_t> t, std::int64_t n,
                    std::vector<VecZd>& out) {
    const std::size_t d = reduced.size();
    const std::size_t corners = std::size_t{1} << d;
    for (std::size_t w = 0; w < corners; ++w) {
        VecZd& o = out[w];
        std::fill(o.begin(), o.end(), 0);
        for (std::size_t i = 0; i < d; ++i) {
            if (!(w >> i & 1)) continue;
            for (std::size_t c = 0; c < d; ++c) o[c] = (o[c] + t[i] * reduced[i][c]) % n;
        }
    }
}

std::size_t shifted_index(std::span<const std::int64_t> x, const VecZd& offset, std::int64_t n) {
    std::size_t idx = 0;
    for (std::size_t j = x.size(); j-- > 0;) {
        std::int64_t c = x[j] + offset[j];
        if (c >= n) c -= n;
        idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
    }
    return idx;
}

}  // namespace

std::vector<std::size_t> basis_permutation(std::int64_t modulus, const Basis& e) {
    const std::size_t d = e.dim();
    if (e.count() != d) throw InvalidInput("change of basis: need d vectors in Z^d");
    if (!e.with_modulus(modulus).invertible_mod_n())
        throw InvalidInput("change of basis: det(T) is not invertible mod N");
    const auto reduced = e.with_modulus(modulus).reduced();
    const std::size_t size = grid_size(modulus, d);
    std::vector<std::size_t> perm(size);
    VecZd x(d, 0), image(d);
    for (std::size_t idx = 0; idx < size; ++idx) {
        std::fill(image.begin(), image.end(), 0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t c = 0; c < d; ++c) image[c] = (image[c] + x[i] * reduced[i][c]) % modulus;
        std::size_t target = 0;
        for (std::size_t j = d; j-- > 0;) target = target * static_cast<std::size_t>(modulus) + image[j];
        perm[idx] = target;
        for (std::size_t j = 0; j < d; ++j) {
            if (++x[j] < modulus) break;
            x[j] = 0;
        }
    }
    return perm;
}

GridFunction change_of_basis(const GridFunction& f, const Basis& e) {
    if (e.dim() != f.dim()) throw InvalidInput("change of basis: basis dimension differs from grid dimension");
    const auto perm = basis_permutation(f.modulus(), e);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[perm[i]];
    return GridFunction(f.modulus(), f.dim(), std::move(out));
}

double box_inner_naive(std::span<const GridFunction> family, const Basis& e) {
    check_family(family, e);
    const std::int64_t n = family.front().modulus();
    const std::size_t d = family.front().dim();
    const std::size_t corners = family.size();
    const std::size_t size = family.front().size();
    const auto reduced = e.with_modulus(n).reduced();

    // one block per t; per-t sums are reduced in t order
    std::vector<double> per_t(size);
    for_each_block(size, [&](std::size_t t_index) {
        VecZd t(d), x(d, 0);
        family.front().coords_of(t_index, t);
        std::vector<VecZd> offsets(corners, VecZd(d));
        vertex_offsets(reduced, t, n, offsets);
        CompensatedSum sum;
        for (std::size_t xi = 0; xi < size; ++xi) {
            double prod = 1.0;
            for (std::size_t w = 0; w < corners; ++w) prod *= family[w][shifted_index(x, offsets[w], n)];
            sum.add(prod);
            for (std::size_t j = 0; j < d; ++j) {
                if (++x[j] < n) break;
                x[j] = 0;
            }
        }
        per_t[t_index] = sum.value();
    });
    CompensatedSum total;
    for (double v : per_t) total.add(v);
    return total.value() / (static_cast<double>(size) * static_cast<double>(size));
}

double box_inner_factored(std::span<const GridFunction> family, const Basis& e) {
    check_family(family, e);
    const std::int64_t n = family.front().modulus();
    const std::size_t d = family.front().dim();
    const auto perm = basis_permutation(n, e);
    std::vector<std::vector<double>> transformed(family.size(), std::vector<double>(perm.size()));
    std::vector<std::span<const double>> views;
    for (std::size_t w = 0; w < family.size(); ++w) {
        for (std::size_t i = 0; i < perm.size(); ++i) transformed[w][i] = family[w][perm[i]];
        views.emplace_back(transformed[w]);
    }
    return detail::std_box_inner(views, n, d);
}

Estimate box_inner_monte_carlo(std::span<const GridFunction> family, const Basis& e, std::uint64_t samples,
                               std::uint64_t seed) {
    check_family(family, e);
    if (samples < 1) throw InvalidInput("monte-carlo box inner product: samples must be >= 1");
    const std::int64_t n = family.front().modulus();
    const std::size_t d = family.front().dim();
    const std::size_t corners = family.size();
    const auto reduced = e.with_modulus(n).reduced();
    const std::uint64_t blocks = (samples + kSampleBlock - 1) / kSampleBlock;
    std::vector<MeanAccumulator> partial(blocks);
    for_each_block(blocks, [&](std::size_t b) {
        Rng rng(block_seed(seed, b));
        const std::uint64_t count = std::min<std::uint64_t>(kSampleBlock, samples - b * kSampleBlock);
        VecZd x(d), t(d);
        std::vector<VecZd> offsets(corners, VecZd(d));
        MeanAccumulator acc;
        for (std::uint64_t s = 0; s < count; ++s) {
            for (auto& c : x) c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
            for (auto& c : t) c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
            vertex_offsets(reduced, t, n, offsets);
            double prod = 1.0;
            for (std::size_t w = 0; w < corners; ++w) prod *= family[w][shifted_index(x, offsets[w], n)];
            acc.add(prod);
        }
        partial[b] = acc;
    });
    MeanAccumulator total;
    for (const auto& p : partial) total.merge(p);
    return {total.mean(), total.stderr_of_mean(), total.count(), false};
}

double box_inner(std::span<const GridFunction> family, const BoxNormPlan& plan) {
    switch (plan.strategy) {
        case BoxStrategy::Naive:
            return box_inner_naive(family, plan.basis);
        case BoxStrategy::Factored:
            return box_inner_factored(family, plan.basis);
        case BoxStrategy::MonteCarlo:
            return box_inner_monte_carlo(family, plan.basis, plan.samples, plan.seed).value;
    }
    throw InvalidInput("unknown box strategy");
}

double box_norm_power(const GridFunction& f, const BoxNormPlan& plan) {
    const std::vector<GridFunction> family(std::size_t{1} << f.dim(), f);
    const double inner = box_inner(family, plan);
    if (plan.strategy == BoxStrategy::MonteCarlo) return std::max(inner, 0.0);
    if (inner < -kNegativeClamp)
        throw NumericalFailure("box norm: inner value " + std::to_string(inner) + " is negative beyond roundoff");
    return std::max(inner, 0.0);
}

double box_norm(const GridFunction& f, const BoxNormPlan& plan) {
    return std::pow(box_norm_power(f, plan), 1.0 / static_cast<double>(std::size_t{1} << f.dim()));
}

}  // namespace clab
