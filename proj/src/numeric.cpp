#include "clab/numeric.hpp"
#include "clab/error.hpp"
#include "clab/parallel.hpp"

#include <cstdlib>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>

namespace clab {

unsigned worker_count() {
    static const unsigned count = [] {
        if (const char* env = std::getenv("CLAB_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : hw;
    }();
    return count;
}

double stable_sum(std::span<const double> values) {
    const std::size_t blocks = (values.size() + kReduceBlock - 1) / kReduceBlock;
    std::vector<CompensatedSum> partial(blocks);
    for_each_block(blocks, [&](std::size_t b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = std::min(values.size(), lo + kReduceBlock);
        CompensatedSum s;
        for (std::size_t i = lo; i < hi; ++i) s.add(values[i]);
        partial[b] = s;
    });
    CompensatedSum total;
    for (const auto& s : partial) total.add(s);
    return total.value();
}

namespace {

using Matrix128 = std::vector<std::vector<__int128>>;

Matrix128 widen(const std::vector<std::vector<std::int64_t>>& rows) {
    Matrix128 m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) m[i].assign(rows[i].begin(), rows[i].end());
    return m;
}

// Fraction-free elimination; returns (rank, sign-adjusted last pivot).
std::pair<std::size_t, __int128> bareiss(Matrix128& m) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    __int128 prev = 1;
    int sign = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && m[pivot][c] == 0) ++pivot;
        if (pivot == rows) continue;
        if (pivot != r) {
            std::swap(m[pivot], m[r]);
            sign = -sign;
        }
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j)
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            m[i][c] = 0;
        }
        prev = m[r][c];
        ++r;
    }
    return {r, sign * prev};
}

}  // namespace

__int128 determinant(const std::vector<std::vector<std::int64_t>>& rows) {
    for (const auto& row : rows)
        if (row.size() != rows.size()) throw InvalidInput("determinant: matrix is not square");
    if (rows.empty()) return 1;
    auto m = widen(rows);
    auto [rank, last] = bareiss(m);
    return rank == rows.size() ? last : 0;
}

std::size_t rank_over_q(const std::vector<std::vector<std::int64_t>>& rows) {
    auto m = widen(rows);
    return bareiss(m).first;
}

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t mod) {
    __int128 result = 1 % mod;
    __int128 b = mod_floor(base, mod);
    while (exp > 0) {
        if (exp & 1) result = result * b % mod;
        b = b * b % mod;
        exp >>= 1;
    }
    return static_cast<std::int64_t>(result);
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t mod) {
    std::int64_t old_r = mod_floor(a, mod), r = mod;
    std::int64_t old_s = 1, s = 0;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    }
    if (old_r != 1) throw InvalidInput("inverse_mod: " + std::to_string(a) + " is not invertible");
    return mod_floor(old_s, mod);
}

std::size_t rank_mod_p(std::vector<std::vector<std::int64_t>> rows, std::int64_t p) {
    const std::size_t n = rows.size();
    const std::size_t cols = n ? rows[0].size() : 0;
    for (auto& row : rows)
        for (auto& v : row) v = mod_floor(v, p);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < n; ++c) {
        std::size_t pivot = r;
        while (pivot < n && rows[pivot][c] == 0) ++pivot;
        if (pivot == n) continue;
        std::swap(rows[pivot], rows[r]);
        const std::int64_t inv = inverse_mod(rows[r][c], p);
        for (auto& v : rows[r]) v = v * inv % p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const std::int64_t f = rows[i][c];
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] = mod_floor(rows[i][j] - f * rows[r][j], p);
        }
        ++r;
    }
    return r;
}

}  // namespace clab

namespace clab {

namespace {

std::uint64_t mul_mod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = mul_mod_u64(r, b, m);
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    static constexpr std::uint64_t kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : kSmall) {
        if (n % p == 0) return n == p;
    }
    if (n < 41 * 41) return true;
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // {2,3,5,7} is a deterministic witness set below 3215031751; the twelve
    // bases cover all 64-bit inputs.
    const std::size_t bases = n < 3'215'031'751ULL ? 4 : std::size(kSmall);
    for (std::size_t i = 0; i < bases; ++i) {
        const std::uint64_t a = kSmall[i];
        std::uint64_t x = pow_mod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

}  // namespace clab
