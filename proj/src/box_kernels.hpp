#pragma once

// Standard-basis kernels shared by boxnorm and dual.
//
// With the standard basis, the pair (x_j, x_j + t_j) ranges over Z_N^2
// uniformly, so a box average is an average over independent pairs
// (u_j^0, u_j^1). Splitting off the last axis (the slowest index, hence
// contiguous slices):
//
//   box_k({g_w}) = E_{a,a'} box_{k-1}({ g_{(w',0)}(., a) * g_{(w',1)}(., a') })
//
// and the same recursion with u^0 held fixed gives the dual. Cost is
// O(2^k N^{2k-1}); for k = 2 this is the O(N^3) Gram contraction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace clab::detail {

/// family: 2^k views of length N^k. Returns E_{u^0,u^1} prod_w g_w(u^w).
double std_box_inner(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k);

/// out(y) = E_{u^1} prod_w g_w(u^w) with u^0 = y; out has length N^k.
void std_dual(std::span<const std::span<const double>> family, std::int64_t n, std::size_t k,
              std::span<double> out);

}  // namespace clab::detail
