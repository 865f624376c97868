#pragma once

#include "clab/gridfn.hpp"
#include "clab/numeric.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace clab {

/// m affine forms phi_i(x) = sum_j coeffs[i][j] x_j + shifts[i] in t variables.
struct LinearFormFamily {
    std::vector<std::vector<std::int64_t>> coeffs;
    std::vector<std::int64_t> shifts;

    std::size_t forms() const { return coeffs.size(); }
    std::size_t variables() const { return coeffs.empty() ? 0 : coeffs.front().size(); }

    /// Rows nonzero and pairwise independent over Q; throws InvalidInput.
    void validate() const;
};

/// "1,0; 1,1; 1,2" with optional shifts "0,0,0" (default all zero).
LinearFormFamily parse_linear_forms(const std::string& coeffs, const std::string& shifts = "");

/// Rows a, b are rational multiples of each other (all 2x2 minors vanish).
bool rows_dependent(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

/// Above this many grid points the verifiers sample instead of enumerating.
inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

/// E( prod_i nu(phi_i(x)) : x in Z_N^t ). Exact when N^t <= kEnumerationLimit.
Estimate verify_linear_forms(const GridFunction& nu, const LinearFormFamily& family, std::uint64_t samples,
                             std::uint64_t seed);

struct TauModel {
    double c1 = 1.0;
    double c2 = 0.5;
    std::int64_t prime_cutoff = 2;  // primes <= w carry no weight
};

/// c1 * prod_{p | h, p > w} (1 + c2 p^{-1/2}), h taken in (-N/2, N/2].
double tau_weight(std::int64_t h, std::int64_t N, const TauModel& model);

/// k-th moment of tau_weight over Z_N \ {0}.
double tau_moment(std::int64_t N, int k, const TauModel& model);

struct CorrelationSpec {
    std::size_t m0 = 2;
    std::size_t m1 = 1;
    LinearFormFamily forms;                         // m1 homogeneous forms in r variables
    std::vector<std::vector<std::int64_t>> shifts;  // m1 x m0
    TauModel tau;

    void validate() const;
};

struct CorrelationReport {
    Estimate lhs;
    double rhs;
    double ratio;
    double fitted_c1;  // smallest c1 with lhs <= rhs for this instance
};

CorrelationReport verify_correlation(const GridFunction& nu, const CorrelationSpec& spec, std::uint64_t samples,
                                     std::uint64_t seed);

/// M = m0 m1 affine forms theta_a(y) = W (phi_i(y) + h_{i,j}) + b over Z^r, with
/// a = i m0 + j; block i holds indices [i m0, (i+1) m0).
struct ThetaSystem {
    std::size_t m0 = 1;
    std::size_t m1 = 1;
    std::vector<std::vector<std::int64_t>> forms;   // m1 x r
    std::vector<std::vector<std::int64_t>> shifts;  // m1 x m0
    std::int64_t primorial_modulus = 1;  // W
    std::int64_t residue = 1;            // b

    std::size_t count() const { return m0 * m1; }
    std::size_t variables() const { return forms.empty() ? 0 : forms.front().size(); }
    std::size_t block_of(std::size_t a) const { return a / m0; }
    /// prod_{j<j'} |h_{i,j} - h_{i,j'}|, saturating at INT64_MAX.
    std::int64_t delta(std::size_t block) const;

    void validate() const;
};

enum class OmegaMethod { Auto, Exhaustive, Solver };

/// Fraction of y in Z_p^r with theta_a(y) = 0 mod p for every a in X (bitmask).
/// The exhaustive path is limited to p <= 13 and r <= 4.
Rational omega_X(std::int64_t p, const ThetaSystem& system, std::uint64_t X,
                 OmegaMethod method = OmegaMethod::Auto);

struct LocalFactorViolation {
    std::uint64_t X;
    std::int64_t p;
    int case_number;
    Rational omega;
};

struct LocalFactorReport {
    std::size_t checked = 0;
    std::size_t degenerate = 0;  // (X, p) where a form vanishes or two forms are dependent mod p
    std::size_t case_counts[4] = {0, 0, 0, 0};
    std::size_t vanishing_checked = 0;
    std::vector<LocalFactorViolation> violations;
};

/// Checks the four local-factor cases for every subset X of [M] and every p.
/// Case 1 applies when p | W.
LocalFactorReport verify_local_factor_cases(const ThetaSystem& system, const std::vector<std::int64_t>& primes);

struct EulerFactors {
    double full, e0, e1, e2, e3;
};

/// E_p and its four factors at a real point (z, z') for the given system.
EulerFactors euler_factors(std::int64_t p, const ThetaSystem& system, std::int64_t w, const std::vector<double>& z,
                           const std::vector<double>& z2);

struct EulerIdentityReport {
    double max_relative_error = 0.0;
    std::size_t evaluations = 0;
    Rational g2_product;   // prod_{p <= w} E_p^(2)(0,0)
    Rational g2_expected;  // (W / phi(W))^M
    bool g2_matches = false;
};

/// Numerical check of E_p = E0 E1 E2 E3 at the given points, and exact check of
/// prod_{p <= w} E_p^(2)(0,0) = (W/phi(W))^M. Points must lie in [0, 1/(6M)]^{2M}.
EulerIdentityReport euler_factor_identity_check(const ThetaSystem& system, std::int64_t w,
                                                const std::vector<std::pair<std::vector<double>, std::vector<double>>>& points,
                                                const std::vector<std::int64_t>& primes);

/// Exact prod_{p <= w} E_p^(2)(0,0) = prod_{p <= w} (1 - 1/p)^{-M}.
Rational g2_at_origin(std::int64_t w, std::size_t M);

nlohmann::ordered_json to_json(const Estimate& e);
nlohmann::ordered_json to_json(const CorrelationReport& r);
nlohmann::ordered_json to_json(const LocalFactorReport& r);
nlohmann::ordered_json to_json(const EulerIdentityReport& r);

}  // namespace clab
