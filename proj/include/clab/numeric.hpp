#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace clab {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void add(const CompensatedSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Fixed block size for reductions: results never depend on thread count.
inline constexpr std::size_t kReduceBlock = 4096;

/// Compensated sum over fixed-size blocks, combined in index order.
double stable_sum(std::span<const double> values);

/// Running mean / standard error for Monte-Carlo estimates.
class MeanAccumulator {
public:
    void add(double x) noexcept {
        ++n_;
        sum_.add(x);
        sq_.add(x * x);
    }
    void merge(const MeanAccumulator& o) noexcept {
        n_ += o.n_;
        sum_.add(o.sum_);
        sq_.add(o.sq_);
    }
    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return n_ ? sum_.value() / static_cast<double>(n_) : 0.0; }
    double stderr_of_mean() const noexcept {
        if (n_ < 2) return 0.0;
        const double n = static_cast<double>(n_);
        const double m = mean();
        const double var = (sq_.value() / n - m * m) * n / (n - 1.0);
        return var > 0.0 ? std::sqrt(var / n) : 0.0;
    }

private:
    std::uint64_t n_ = 0;
    CompensatedSum sum_;
    CompensatedSum sq_;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    bool exact = false;
};

inline std::int64_t mod_floor(std::int64_t a, std::int64_t n) {
    const std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

/// Integer determinant (Bareiss, exact for the small matrices used here).
/// `rows` is a square matrix given row-major.
__int128 determinant(const std::vector<std::vector<std::int64_t>>& rows);

/// Rank over the rationals.
std::size_t rank_over_q(const std::vector<std::vector<std::int64_t>>& rows);

/// Rank of a matrix over Z_p (p prime).
std::size_t rank_mod_p(std::vector<std::vector<std::int64_t>> rows, std::int64_t p);

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t mod);
std::int64_t inverse_mod(std::int64_t a, std::int64_t mod);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(std::uint64_t n);

}  // namespace clab
