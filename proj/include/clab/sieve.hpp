#pragma once

#include "clab/gridfn.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace clab {

/// All primes <= limit, ascending (segmented sieve). Empty for limit < 2.
std::vector<std::int64_t> primes_upto(std::int64_t limit);

/// Moebius function mu(0..limit); entry 0 is unused and set to 0.
std::vector<std::int8_t> mobius_upto(std::int64_t limit);

/// Product of primes <= w.
std::int64_t primorial(std::int64_t w);

/// Euler phi of a squarefree W, given as a product of distinct primes.
std::int64_t euler_phi(std::int64_t n);

/// (phi(W)/W) log(W n + b) if W n + b is prime, else 0.
double lambda_bar(std::int64_t n, std::int64_t modulus_w, std::int64_t b);

/// sum_{d | n, d <= R} mu(d) log(R/d), summed over divisors in ascending order.
double lambda_R(std::int64_t n, double R);

/// Memo and on-disk store for sieve tables and lambda_R ranges.
///
/// Files live in `dir` (one per entry): "CLABSIEV" magic, u32 version, the
/// key, the element count, the payload and an FNV-1a checksum. Entries that
/// fail validation are ignored and recomputed. A failed write prints a
/// warning and keeps the in-memory copy.
class SieveCache {
public:
    SieveCache() = default;  // memory only
    explicit SieveCache(std::filesystem::path dir);

    /// Directory from --cache-dir if given, else CLAB_CACHE_DIR, else memory only.
    static SieveCache from_settings(const std::optional<std::string>& cli_dir);

    const std::optional<std::filesystem::path>& directory() const { return dir_; }

    std::vector<std::int8_t> mobius(std::int64_t limit);
    std::vector<double> lambda_R_range(std::int64_t lo, std::int64_t hi, double R, std::int64_t modulus_w,
                                       std::int64_t b);

    std::size_t disk_hits() const { return disk_hits_; }

private:
    template <class T>
    std::optional<std::vector<T>> load(const std::string& key);
    template <class T>
    void store(const std::string& key, const std::vector<T>& values);

    std::optional<std::filesystem::path> dir_;
    std::mutex mutex_;
    std::map<std::string, std::vector<std::int8_t>> mobius_memo_;
    std::map<std::string, std::vector<double>> range_memo_;
    std::size_t disk_hits_ = 0;
};

/// lambda_R(W n + b) for n in [lo, hi], by sieving each squarefree d <= R over
/// its progression. Bit-identical to the pointwise evaluation.
std::vector<double> lambda_R_range(std::int64_t lo, std::int64_t hi, double R, std::int64_t modulus_w,
                                   std::int64_t b, SieveCache* cache = nullptr);

struct MeasureParams {
    std::int64_t modulus = 0;           // N, an odd prime
    std::int64_t prime_cutoff = 2;      // w
    std::int64_t primorial_modulus = 2; // W = product of primes <= w
    std::int64_t residue = 1;           // b, coprime to W
    double sieve_level = 0;             // R
    double eps1 = 0;
    double eps2 = 0;
    std::size_t dim = 1;
    bool R_overridden = false;

    /// w = max(2, floor(log log N)), R = N^{1/(d 2^{d+5})}, eps2 = 1/2,
    /// eps1 = eps2 * alpha / (100 d).
    static MeasureParams defaults(std::int64_t N, std::size_t d, std::int64_t b = 1, double alpha = 1.0);

    /// Throws InvalidInput naming the first violated invariant.
    void validate() const;

    bool in_window(std::int64_t n) const;
    /// Pointwise lower-bound constant c with nu >= c * lambda_bar on the window.
    double lower_bound_constant() const;
};

/// The truncated-divisor measure on Z_N: (phi(W)/W) lambda_R(Wn+b)^2 / log R on
/// the window [eps1 N, eps2 N], 1 elsewhere. Grid index x stands for the
/// representative n of x in [1, N].
GridFunction green_tao_nu(const MeasureParams& params, SieveCache* cache = nullptr);

/// d-fold tensor power of nu.
GridFunction green_tao_mu(const MeasureParams& params, SieveCache* cache = nullptr);

/// Representative of grid index x in [1, N].
inline std::int64_t window_value(std::size_t index, std::int64_t N) {
    return index == 0 ? N : static_cast<std::int64_t>(index);
}

/// Membership of x in A, where A may depend on the residue b being tried
/// (a pulled-back set x -> 1_A(W x + b)).
using ResidueIndicator = std::function<bool(std::span<const std::int64_t> x, std::int64_t b)>;

/// Residue b in [1, W) coprime to W maximising sum_{x in [1,N]^d} 1_A(x) lambda_bar_b^d(x);
/// ties go to the smallest b.
std::int64_t choose_b(const ResidueIndicator& indicator, std::int64_t N, std::int64_t modulus_w, std::size_t d);

/// N^{-d} sum_{x in [1,N]^d} 1_A(x) lambda_bar_b^d(x).
double weighted_density(const ResidueIndicator& indicator, std::int64_t N, std::int64_t modulus_w,
                        std::int64_t b, std::size_t d);

/// N^{-1} sum_{n <= N} lambda_bar_b(n).
double lambda_bar_mean(std::int64_t N, std::int64_t modulus_w, std::int64_t b);

}  // namespace clab
