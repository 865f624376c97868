#pragma once

#include "clab/gridfn.hpp"
#include "clab/lattice.hpp"
#include "clab/numeric.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace clab {

/// {x, x + t e_1, ..., x + t e_d}; `genuine` when every point lies in the
/// ambient integer box without reduction mod N.
struct Constellation {
    VecZd base;
    std::int64_t step = 0;
    bool genuine = false;

    friend bool operator==(const Constellation&, const Constellation&) = default;
};

struct CountStrategy {
    bool exact = true;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// E( f(x) f(x + t e_1) ... f(x + t e_d) : x in Z_N^d, t in Z_N ).
Estimate count_average(const GridFunction& f, const std::vector<VecZd>& e, const CountStrategy& strategy = {});

struct VonNeumannSample {
    double box_norm;  // ||f|| in the derived directions
    double count;     // Lambda f
    bool signed_probe;
};

struct VonNeumannReport {
    Basis derived;
    std::vector<VonNeumannSample> samples;
    double max_ratio;  // max |Lambda f| / ||f|| over probes with ||f|| >= 1e-8
};

/// Compares Lambda f with the box norm along the derived basis of e.
VonNeumannReport von_neumann_report(const Basis& e, std::span<const GridFunction> probes,
                                    const std::vector<bool>& signed_flags);

/// Alternates nonnegative probes 0 <= f <= mu and signed probes |f| <= mu.
VonNeumannReport von_neumann_probe(const GridFunction& mu, const Basis& e, std::size_t probes, std::uint64_t seed);

struct BoxInterval {
    std::int64_t lo = 1;
    std::int64_t hi = 1;
};

struct UnwrapResult {
    std::int64_t t_prime;   // in units of the primitive part e' of e
    std::int64_t scale;     // e = scale * e'
};

/// Given x in B = I^d and x + t e_i in B mod N (t in [1, N)), returns t' in
/// {t s, t s - N} (s the scale of e) with x + t' e'_i in B over the integers.
/// Throws PreconditionViolation when eps >= tau(e') or |I| > eps N. Returns
/// nothing when x or a reduced point lies outside B.
std::optional<UnwrapResult> unwrap(const VecZd& x, std::int64_t t, const std::vector<VecZd>& e,
                                   const BoxInterval& box, std::int64_t N, double eps);

/// Finite subset of [1, side]^d stored as a bitmap.
class PointSet {
public:
    PointSet(std::int64_t side, std::size_t dim);
    static PointSet from_predicate(std::int64_t side, std::size_t dim,
                                   const std::function<bool(std::span<const std::int64_t>)>& member);

    std::int64_t side() const { return side_; }
    std::size_t dim() const { return dim_; }
    bool contains(std::span<const std::int64_t> x) const;
    void insert(std::span<const std::int64_t> x);
    std::size_t size() const { return count_; }

private:
    std::size_t index(std::span<const std::int64_t> x) const;
    std::int64_t side_;
    std::size_t dim_;
    std::vector<bool> bits_;
    std::size_t count_ = 0;
};

/// ceil(side / min_i ||e_i||_inf)
std::int64_t default_t_max(std::int64_t side, const std::vector<VecZd>& e);

/// Every (x, t) with 0 < |t| <= t_max, x in A and x + t e_i in A, ordered by
/// the index of x (x_1 fastest) and then by t.
std::vector<Constellation> find_constellations(const PointSet& A, const std::vector<VecZd>& e, std::int64_t t_max);

void write_constellations_csv(std::ostream& out, const std::vector<Constellation>& list, std::size_t dim);
nlohmann::ordered_json to_json(const Constellation& c);

/// Membership oracle for A on the positive integer lattice.
using SetOracle = std::function<bool(std::span<const std::int64_t>)>;

struct PipelineConfig {
    double alpha = 1.0;
    Basis e{std::vector<VecZd>{{1, 2}, {2, 1}}, 0};
    std::int64_t n_prime = 10000;            // N'
    std::optional<double> sieve_level;       // overrides R = N^{1/(d 2^{d+5})}
    std::optional<std::int64_t> prime_cutoff;  // overrides w = max(2, floor(log log N))
    double eps2 = 0.5;
    std::uint64_t samples = 4'000'000;
    std::uint64_t seed = 1;
    std::size_t max_reported = 50;
};

/// Runs the transference pipeline on A (given as a membership oracle) and
/// returns the JSON report. Throws InternalInconsistency if g <= mu fails.
nlohmann::ordered_json run_pipeline(const SetOracle& A, const std::string& set_name, const PipelineConfig& config);

/// Membership in P^d (all coordinates prime).
bool all_prime(std::span<const std::int64_t> x);

}  // namespace clab
