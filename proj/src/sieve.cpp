#include "clab/sieve.hpp"
#include "clab/error.hpp"
#include "clab/numeric.hpp"
#include "clab/parallel.hpp"
#include "clab/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>

namespace clab {

static_assert(std::endian::native == std::endian::little, "cache files assume a little-endian host");

namespace {

constexpr std::int64_t kSegment = 1 << 18;
constexpr std::int64_t kMaxSieveR = 1'000'000'000;
constexpr std::size_t kRangeBlock = 1 << 16;

std::int64_t isqrt(std::int64_t n) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// One term of the divisor sum; shared by the pointwise and range paths so the
// two accumulate identical doubles in the same order.
inline double divisor_term(std::int64_t d, double R) { return std::log(R / static_cast<double>(d)); }

inline void accumulate(double& acc, std::int8_t mu, double term) {
    if (mu > 0)
        acc += term;
    else
        acc -= term;
}

void check_R(double R) {
    if (!(R > 1.0) || !std::isfinite(R)) throw InvalidInput("lambda_R: R must be a finite real > 1");
    if (R >= static_cast<double>(kMaxSieveR)) throw InvalidInput("lambda_R: R too large for the divisor table");
}

std::vector<double> compute_range(std::int64_t lo, std::int64_t hi, double R, std::int64_t modulus_w, std::int64_t b,
                                  const std::vector<std::int8_t>& mobius) {
    const auto count = static_cast<std::size_t>(hi - lo + 1);
    std::vector<double> out(count, 0.0);
    const auto dmax = static_cast<std::int64_t>(std::floor(R));

    // progression start n0 and step for each squarefree d, in ascending d
    struct Progression {
        std::int64_t d, first, step;
        std::int8_t mu;
    };
    std::vector<Progression> progs;
    for (std::int64_t d = 1; d <= dmax; ++d) {
        if (mobius[d] == 0) continue;
        const std::int64_t g = std::gcd(modulus_w, d);
        if (b % g != 0) continue;
        const std::int64_t step = d / g;
        std::int64_t residue = 0;
        if (step > 1)
            residue = static_cast<std::int64_t>(
                static_cast<__int128>(mod_floor(-b / g, step)) * inverse_mod(mod_floor(modulus_w / g, step), step) %
                step);
        progs.push_back({d, residue, step, mobius[d]});
    }

    const std::size_t blocks = (count + kRangeBlock - 1) / kRangeBlock;
    for_each_block(blocks, [&](std::size_t blk) {
        const std::int64_t blo = lo + static_cast<std::int64_t>(blk * kRangeBlock);
        const std::int64_t bhi = std::min(hi, blo + static_cast<std::int64_t>(kRangeBlock) - 1);
        for (const auto& p : progs) {
            const double term = divisor_term(p.d, R);
            std::int64_t n = blo + mod_floor(p.first - blo, p.step);
            for (; n <= bhi; n += p.step) accumulate(out[static_cast<std::size_t>(n - lo)], p.mu, term);
        }
    });
    return out;
}

std::string range_key(std::int64_t lo, std::int64_t hi, double R, std::int64_t modulus_w, std::int64_t b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambdaR W=%lld b=%lld R=%.12f lo=%lld hi=%lld", static_cast<long long>(modulus_w),
                  static_cast<long long>(b), R, static_cast<long long>(lo), static_cast<long long>(hi));
    return buf;
}

constexpr char kCacheMagic[8] = {'C', 'L', 'A', 'B', 'S', 'I', 'E', 'V'};
constexpr std::uint32_t kCacheVersion = 1;

std::uint64_t checksum(const void* data, std::size_t bytes) {
    return fnv1a(std::string_view(static_cast<const char*>(data), bytes));
}

}  // namespace

std::vector<std::int64_t> primes_upto(std::int64_t limit) {
    std::vector<std::int64_t> primes;
    if (limit < 2) return primes;
    const std::int64_t root = isqrt(limit);
    std::vector<char> small(static_cast<std::size_t>(root + 1), 1);
    std::vector<std::int64_t> base;
    for (std::int64_t i = 2; i <= root; ++i) {
        if (!small[i]) continue;
        base.push_back(i);
        for (std::int64_t j = i * i; j <= root; j += i) small[j] = 0;
    }
    std::vector<char> seg(static_cast<std::size_t>(kSegment));
    for (std::int64_t lo = 2; lo <= limit; lo += kSegment) {
        const std::int64_t hi = std::min(limit, lo + kSegment - 1);
        std::fill(seg.begin(), seg.end(), 1);
        for (std::int64_t p : base) {
            if (p * p > hi) break;
            std::int64_t start = std::max(p * p, (lo + p - 1) / p * p);
            for (std::int64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
        }
        for (std::int64_t n = lo; n <= hi; ++n)
            if (seg[n - lo]) primes.push_back(n);
    }
    return primes;
}

std::vector<std::int8_t> mobius_upto(std::int64_t limit) {
    if (limit < 1) return {0};
    std::vector<std::int8_t> mu(static_cast<std::size_t>(limit + 1), 1);
    mu[0] = 0;
    std::vector<char> composite(static_cast<std::size_t>(limit + 1), 0);
    std::vector<std::int64_t> primes;
    // linear sieve: each composite is struck once by its smallest prime factor
    for (std::int64_t i = 2; i <= limit; ++i) {
        if (!composite[i]) {
            primes.push_back(i);
            mu[i] = -1;
        }
        for (std::int64_t p : primes) {
            if (p * i > limit) break;
            composite[p * i] = 1;
            if (i % p == 0) {
                mu[p * i] = 0;
                break;
            }
            mu[p * i] = static_cast<std::int8_t>(-mu[i]);
        }
    }
    return mu;
}

std::int64_t primorial(std::int64_t w) {
    std::int64_t W = 1;
    for (std::int64_t p : primes_upto(w)) {
        if (W > INT64_MAX / p) throw InvalidInput("primorial overflows 64 bits");
        W *= p;
    }
    return W;
}

std::int64_t euler_phi(std::int64_t n) {
    if (n < 1) throw InvalidInput("euler_phi: n must be >= 1");
    std::int64_t result = n;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

double lambda_bar(std::int64_t n, std::int64_t modulus_w, std::int64_t b) {
    const auto m = static_cast<std::uint64_t>(modulus_w) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(b);
    if (!is_prime_u64(m)) return 0.0;
    return static_cast<double>(euler_phi(modulus_w)) / static_cast<double>(modulus_w) * std::log(static_cast<double>(m));
}

double lambda_R(std::int64_t n, double R) {
    if (n < 1) throw InvalidInput("lambda_R: n must be >= 1");
    check_R(R);
    // only primes <= R can appear in a divisor d <= R
    std::vector<std::int64_t> primes;
    std::int64_t m = n;
    for (std::int64_t p = 2; static_cast<double>(p) <= R && p * p <= m; ++p) {
        if (m % p) continue;
        primes.push_back(p);
        while (m % p == 0) m /= p;
    }
    if (m > 1 && static_cast<double>(m) <= R) primes.push_back(m);

    std::vector<std::pair<std::int64_t, std::int8_t>> divisors{{1, 1}};
    for (std::int64_t p : primes) {
        const std::size_t existing = divisors.size();
        for (std::size_t i = 0; i < existing; ++i) {
            const auto [d, mu] = divisors[i];
            if (static_cast<double>(d) * static_cast<double>(p) <= R)
                divisors.emplace_back(d * p, static_cast<std::int8_t>(-mu));
        }
    }
    std::sort(divisors.begin(), divisors.end());
    double acc = 0.0;
    for (const auto& [d, mu] : divisors) accumulate(acc, mu, divisor_term(d, R));
    return acc;
}

SieveCache::SieveCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) std::cerr << "warning: cannot create cache directory " << *dir_ << ": " << ec.message() << '\n';
}

SieveCache SieveCache::from_settings(const std::optional<std::string>& cli_dir) {
    if (cli_dir && !cli_dir->empty()) return SieveCache(*cli_dir);
    if (const char* env = std::getenv("CLAB_CACHE_DIR"); env && *env) return SieveCache(env);
    return SieveCache();
}

template <class T>
std::optional<std::vector<T>> SieveCache::load(const std::string& key) {
    if (!dir_) return std::nullopt;
    char name[32];
    std::snprintf(name, sizeof name, "%016llx.bin", static_cast<unsigned long long>(fnv1a(key)));
    std::ifstream in(*dir_ / name, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    std::uint32_t version = 0, key_len = 0, elem = 0;
    std::uint64_t count = 0, sum = 0;
    if (!in.read(magic, 8) || std::memcmp(magic, kCacheMagic, 8) != 0) return std::nullopt;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&key_len), 4);
    if (!in || version != kCacheVersion || key_len != key.size()) return std::nullopt;
    std::string stored(key_len, '\0');
    in.read(stored.data(), key_len);
    in.read(reinterpret_cast<char*>(&elem), 4);
    in.read(reinterpret_cast<char*>(&count), 8);
    if (!in || stored != key || elem != sizeof(T) || count > (std::uint64_t{1} << 34)) return std::nullopt;
    std::vector<T> values(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)));
    in.read(reinterpret_cast<char*>(&sum), 8);
    if (!in || sum != checksum(values.data(), count * sizeof(T))) return std::nullopt;
    ++disk_hits_;
    return values;
}

template <class T>
void SieveCache::store(const std::string& key, const std::vector<T>& values) {
    if (!dir_) return;
    char name[32];
    std::snprintf(name, sizeof name, "%016llx.bin", static_cast<unsigned long long>(fnv1a(key)));
    const auto target = *dir_ / name;
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        const std::uint32_t version = kCacheVersion, key_len = static_cast<std::uint32_t>(key.size()),
                            elem = sizeof(T);
        const std::uint64_t count = values.size(), sum = checksum(values.data(), values.size() * sizeof(T));
        out.write(kCacheMagic, 8);
        out.write(reinterpret_cast<const char*>(&version), 4);
        out.write(reinterpret_cast<const char*>(&key_len), 4);
        out.write(key.data(), key_len);
        out.write(reinterpret_cast<const char*>(&elem), 4);
        out.write(reinterpret_cast<const char*>(&count), 8);
        out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)));
        out.write(reinterpret_cast<const char*>(&sum), 8);
        if (!out) {
            std::cerr << "warning: cache write failed for " << tmp << "; continuing in memory\n";
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            return;
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) std::cerr << "warning: cache rename failed for " << target << ": " << ec.message() << '\n';
}

std::vector<std::int8_t> SieveCache::mobius(std::int64_t limit) {
    const std::string key = "mobius limit=" + std::to_string(limit);
    std::lock_guard lock(mutex_);
    if (auto it = mobius_memo_.find(key); it != mobius_memo_.end()) return it->second;
    auto values = load<std::int8_t>(key);
    if (!values) {
        values = mobius_upto(limit);
        store(key, *values);
    }
    return mobius_memo_.emplace(key, std::move(*values)).first->second;
}

std::vector<double> SieveCache::lambda_R_range(std::int64_t lo, std::int64_t hi, double R, std::int64_t modulus_w,
                                               std::int64_t b) {
    const std::string key = range_key(lo, hi, R, modulus_w, b);
    {
        std::lock_guard lock(mutex_);
        if (auto it = range_memo_.find(key); it != range_memo_.end()) return it->second;
        if (auto values = load<double>(key); values && values->size() == static_cast<std::size_t>(hi - lo + 1))
            return range_memo_.emplace(key, std::move(*values)).first->second;
    }
    const auto mu = mobius(static_cast<std::int64_t>(std::floor(R)));
    auto values = compute_range(lo, hi, R, modulus_w, b, mu);
    std::lock_guard lock(mutex_);
    store(key, values);
    return range_memo_.emplace(key, std::move(values)).first->second;
}

std::vector<double> lambda_R_range(std::int64_t lo, std::int64_t hi, double R, std::int64_t modulus_w, std::int64_t b,
                                   SieveCache* cache) {
    if (lo < 0 || hi < lo) throw InvalidInput("lambda_R_range: need 0 <= lo <= hi");
    if (modulus_w < 1 || b < 0) throw InvalidInput("lambda_R_range: need W >= 1 and b >= 0");
    if (lo == 0 && b == 0) throw InvalidInput("lambda_R_range: W n + b must be >= 1");
    check_R(R);
    if (cache) return cache->lambda_R_range(lo, hi, R, modulus_w, b);
    return compute_range(lo, hi, R, modulus_w, b, mobius_upto(static_cast<std::int64_t>(std::floor(R))));
}

MeasureParams MeasureParams::defaults(std::int64_t N, std::size_t d, std::int64_t b, double alpha) {
    if (N < 3) throw InvalidInput("measure: N must be >= 3");
    if (d < 1) throw InvalidInput("measure: d must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("measure: alpha must lie in (0, 1]");
    MeasureParams p;
    p.modulus = N;
    p.dim = d;
    p.prime_cutoff =
        std::max<std::int64_t>(2, static_cast<std::int64_t>(std::floor(std::log(std::log(static_cast<double>(N))))));
    p.primorial_modulus = primorial(p.prime_cutoff);
    p.residue = b;
    p.sieve_level =
        std::pow(static_cast<double>(N), 1.0 / (static_cast<double>(d) * std::ldexp(1.0, static_cast<int>(d) + 5)));
    p.eps2 = 0.5;
    p.eps1 = p.eps2 * alpha / (100.0 * static_cast<double>(d));
    return p;
}

void MeasureParams::validate() const {
    if (modulus < 3 || !is_prime_u64(static_cast<std::uint64_t>(modulus)))
        throw InvalidInput("measure: N must be an odd prime");
    if (dim < 1) throw InvalidInput("measure: d must be >= 1");
    if (prime_cutoff < 2) throw InvalidInput("measure: w must be >= 2");
    if (primorial_modulus != primorial(prime_cutoff))
        throw InvalidInput("measure: W must equal the product of primes <= w");
    if (residue < 1 || residue >= primorial_modulus || std::gcd(residue, primorial_modulus) != 1)
        throw InvalidInput("measure: b must lie in [1, W) with gcd(b, W) = 1");
    if (!(0.0 < eps1 && eps1 < eps2 && eps2 < 1.0)) throw InvalidInput("measure: need 0 < eps1 < eps2 < 1");
    if (!(sieve_level > 1.0) || !std::isfinite(sieve_level)) throw InvalidInput("measure: R must be > 1");
    if (!(sieve_level < eps1 * static_cast<double>(modulus))) throw InvalidInput("measure: need R < eps1 * N");
    if (primorial_modulus > INT64_MAX / 4 / modulus) throw InvalidInput("measure: W * N overflows");
}

bool MeasureParams::in_window(std::int64_t n) const {
    const double x = static_cast<double>(n);
    return eps1 * static_cast<double>(modulus) <= x && x <= eps2 * static_cast<double>(modulus);
}

double MeasureParams::lower_bound_constant() const {
    if (!R_overridden) return 1.0 / (static_cast<double>(dim) * std::ldexp(1.0, static_cast<int>(dim) + 6));
    const double ratio = static_cast<double>(euler_phi(primorial_modulus)) / static_cast<double>(primorial_modulus);
    const double top = static_cast<double>(primorial_modulus) * static_cast<double>(modulus) + static_cast<double>(residue);
    return ratio * std::log(sieve_level) / std::log(top);
}

GridFunction green_tao_nu(const MeasureParams& params, SieveCache* cache) {
    params.validate();
    const std::int64_t N = params.modulus;
    const auto lo = static_cast<std::int64_t>(std::ceil(params.eps1 * static_cast<double>(N)));
    const auto hi = static_cast<std::int64_t>(std::floor(params.eps2 * static_cast<double>(N)));
    std::vector<double> values(static_cast<std::size_t>(N), 1.0);
    if (lo <= hi) {
        const auto lam = lambda_R_range(lo, hi, params.sieve_level, params.primorial_modulus, params.residue, cache);
        const auto modulus_w = params.primorial_modulus;
        const double ratio = static_cast<double>(euler_phi(modulus_w)) / static_cast<double>(modulus_w);
        const double log_R = std::log(params.sieve_level);
        for (std::int64_t n = lo; n <= hi; ++n) {
            const double l = lam[static_cast<std::size_t>(n - lo)];
            values[static_cast<std::size_t>(n % N)] = ratio * l * l / log_R;
        }
    }
    return GridFunction(N, 1, std::move(values));
}

GridFunction green_tao_mu(const MeasureParams& params, SieveCache* cache) {
    const GridFunction nu = green_tao_nu(params, cache);
    const std::vector<GridFunction> factors(params.dim, nu);
    return tensor(factors);
}

namespace {

// n in [1, N] with W n + b prime, and lambda_bar_b(n) for each.
void prime_progression(std::int64_t N, std::int64_t modulus_w, std::int64_t b, std::vector<std::int64_t>& ns,
                       std::vector<double>& weights) {
    const double ratio = static_cast<double>(euler_phi(modulus_w)) / static_cast<double>(modulus_w);
    for (std::int64_t n = 1; n <= N; ++n) {
        const std::int64_t m = modulus_w * n + b;
        if (!is_prime_u64(static_cast<std::uint64_t>(m))) continue;
        ns.push_back(n);
        weights.push_back(ratio * std::log(static_cast<double>(m)));
    }
}

}  // namespace

double weighted_density(const ResidueIndicator& indicator, std::int64_t N, std::int64_t modulus_w, std::int64_t b,
                        std::size_t d) {
    if (N < 1 || d < 1) throw InvalidInput("weighted_density: need N >= 1 and d >= 1");
    std::vector<std::int64_t> ns;
    std::vector<double> weights;
    prime_progression(N, modulus_w, b, ns, weights);
    if (ns.empty()) return 0.0;
    // odometer over d-tuples of progression primes
    std::vector<std::size_t> pos(d, 0);
    std::vector<std::int64_t> x(d);
    CompensatedSum sum;
    for (;;) {
        double weight = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = ns[pos[i]];
            weight *= weights[pos[i]];
        }
        if (indicator(x, b)) sum.add(weight);
        std::size_t i = 0;
        while (i < d && ++pos[i] == ns.size()) pos[i++] = 0;
        if (i == d) break;
    }
    return sum.value() / std::pow(static_cast<double>(N), static_cast<double>(d));
}

std::int64_t choose_b(const ResidueIndicator& indicator, std::int64_t N, std::int64_t modulus_w, std::size_t d) {
    if (modulus_w < 2) throw InvalidInput("choose_b: W must be >= 2");
    std::int64_t best_b = 0;
    double best = -1.0;
    for (std::int64_t b = 1; b < modulus_w; ++b) {
        if (std::gcd(b, modulus_w) != 1) continue;
        const double value = weighted_density(indicator, N, modulus_w, b, d);
        if (value > best) {
            best = value;
            best_b = b;
        }
    }
    return best_b;
}

double lambda_bar_mean(std::int64_t N, std::int64_t modulus_w, std::int64_t b) {
    if (N < 1) throw InvalidInput("lambda_bar_mean: N must be >= 1");
    std::vector<std::int64_t> ns;
    std::vector<double> weights;
    prime_progression(N, modulus_w, b, ns, weights);
    return stable_sum(weights) / static_cast<double>(N);
}

}  // namespace clab
