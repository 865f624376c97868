#include "clab/conditions.hpp"
#include "clab/error.hpp"
#include "clab/lattice.hpp"
#include "clab/parallel.hpp"
#include "clab/rng.hpp"
#include "clab/sieve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace clab {

namespace {

constexpr std::uint64_t kSampleBlock = 1 << 16;
constexpr std::size_t kMaxVariables = 12;

std::vector<std::int64_t> parse_ints(const std::string& text) {
    std::vector<std::int64_t> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        const auto first = token.find_first_not_of(" \t");
        if (first == std::string::npos) throw InvalidInput("empty integer in list '" + text + "'");
        std::size_t used = 0;
        try {
            out.push_back(std::stoll(token.substr(first), &used));
        } catch (const std::exception&) {
            throw InvalidInput("bad integer '" + token + "'");
        }
        if (token.find_first_not_of(" \t", first + used) != std::string::npos)
            throw InvalidInput("bad integer '" + token + "'");
    }
    return out;
}

// Mean of prod_i nu(row_i . x + shift_i) over Z_N^t; no independence check.
Estimate affine_product_mean(const GridFunction& nu, const std::vector<std::vector<std::int64_t>>& coeffs,
                             const std::vector<std::int64_t>& shifts, std::uint64_t samples, std::uint64_t seed) {
    if (nu.dim() != 1) throw InvalidInput("measure must be one-dimensional");
    const std::int64_t n = nu.modulus();
    const std::size_t m = coeffs.size();
    const std::size_t t = coeffs.front().size();
    if (t > kMaxVariables) throw InvalidInput("at most 12 variables are supported");
    std::vector<std::vector<std::int64_t>> c(m, std::vector<std::int64_t>(t));
    std::vector<std::int64_t> s(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < t; ++j) c[i][j] = mod_floor(coeffs[i][j], n);
        s[i] = mod_floor(shifts[i], n);
    }
    const auto values = nu.values();

    std::uint64_t points = 1;
    bool enumerate = true;
    for (std::size_t j = 0; j < t; ++j) {
        if (points > kEnumerationLimit / static_cast<std::uint64_t>(n)) {
            enumerate = false;
            break;
        }
        points *= static_cast<std::uint64_t>(n);
    }

    if (enumerate) {
        // one block per value of the slowest coordinate; every odometer step
        // (increment or wrap) moves each form by its coefficient mod N
        const auto rows = static_cast<std::size_t>(n);
        const std::uint64_t inner = points / static_cast<std::uint64_t>(n);
        std::vector<double> partial(rows);
        for_each_block(rows, [&](std::size_t a) {
            std::vector<std::int64_t> val(m);
            for (std::size_t i = 0; i < m; ++i)
                val[i] = static_cast<std::int64_t>((static_cast<__int128>(c[i][t - 1]) * a + s[i]) % n);
            std::vector<std::int64_t> x(t - 1, 0);
            CompensatedSum sum;
            for (std::uint64_t k = 0; k < inner; ++k) {
                double prod = 1.0;
                for (std::size_t i = 0; i < m; ++i) prod *= values[static_cast<std::size_t>(val[i])];
                sum.add(prod);
                for (std::size_t j = 0; j + 1 < t; ++j) {
                    for (std::size_t i = 0; i < m; ++i) {
                        val[i] += c[i][j];
                        if (val[i] >= n) val[i] -= n;
                    }
                    if (++x[j] < n) break;
                    x[j] = 0;
                }
            }
            partial[a] = sum.value();
        });
        CompensatedSum total;
        for (double p : partial) total.add(p);
        return {total.value() / static_cast<double>(points), 0.0, points, true};
    }

    if (samples < 1) throw InvalidInput("sampling needs samples >= 1");
    const std::uint64_t blocks = (samples + kSampleBlock - 1) / kSampleBlock;
    std::vector<MeanAccumulator> partial(blocks);
    for_each_block(blocks, [&](std::size_t blk) {
        Rng rng(block_seed(seed, blk));
        const std::uint64_t count = std::min<std::uint64_t>(kSampleBlock, samples - blk * kSampleBlock);
        std::vector<std::int64_t> x(t);
        MeanAccumulator acc;
        for (std::uint64_t k = 0; k < count; ++k) {
            for (auto& v : x) v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
            double prod = 1.0;
            for (std::size_t i = 0; i < m; ++i) {
                __int128 v = s[i];
                for (std::size_t j = 0; j < t; ++j) v += static_cast<__int128>(c[i][j]) * x[j];
                prod *= values[static_cast<std::size_t>(v % n)];
            }
            acc.add(prod);
        }
        partial[blk] = acc;
    });
    MeanAccumulator total;
    for (const auto& p : partial) total.merge(p);
    return {total.mean(), total.stderr_of_mean(), total.count(), false};
}

std::vector<std::int64_t> distinct_prime_factors(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace

bool rows_dependent(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (static_cast<__int128>(a[i]) * b[j] != static_cast<__int128>(a[j]) * b[i]) return false;
    return true;
}

void LinearFormFamily::validate() const {
    if (coeffs.empty()) throw InvalidInput("linear forms: need at least one form");
    const std::size_t t = coeffs.front().size();
    if (t < 1) throw InvalidInput("linear forms: need at least one variable");
    if (shifts.size() != coeffs.size()) throw InvalidInput("linear forms: one shift per form");
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].size() != t) throw InvalidInput("linear forms: ragged coefficient matrix");
        if (std::all_of(coeffs[i].begin(), coeffs[i].end(), [](auto v) { return v == 0; }))
            throw InvalidInput("linear forms: form " + std::to_string(i + 1) + " is zero");
    }
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        for (std::size_t j = i + 1; j < coeffs.size(); ++j)
            if (rows_dependent(coeffs[i], coeffs[j]))
                throw InvalidInput("linear forms: forms " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                   " are linearly dependent");
}

LinearFormFamily parse_linear_forms(const std::string& coeffs, const std::string& shifts) {
    LinearFormFamily family;
    std::string row;
    std::istringstream in(coeffs);
    while (std::getline(in, row, ';')) {
        if (row.find_first_not_of(" \t") == std::string::npos) continue;
        family.coeffs.push_back(parse_ints(row));
    }
    family.shifts = shifts.find_first_not_of(" \t") == std::string::npos
                        ? std::vector<std::int64_t>(family.coeffs.size(), 0)
                        : parse_ints(shifts);
    family.validate();
    return family;
}

Estimate verify_linear_forms(const GridFunction& nu, const LinearFormFamily& family, std::uint64_t samples,
                             std::uint64_t seed) {
    family.validate();
    if (family.variables() > kMaxVariables) throw InvalidInput("linear forms: at most 12 variables");
    return affine_product_mean(nu, family.coeffs, family.shifts, samples, seed);
}

double tau_weight(std::int64_t h, std::int64_t N, const TauModel& model) {
    if (N < 2) throw InvalidInput("tau: N must be >= 2");
    std::int64_t rep = mod_floor(h, N);
    if (rep == 0) throw InvalidInput("tau: h must be nonzero mod N");
    if (rep > N / 2) rep -= N;
    double value = model.c1;
    for (std::int64_t p : distinct_prime_factors(std::abs(rep)))
        if (p > model.prime_cutoff) value *= 1.0 + model.c2 / std::sqrt(static_cast<double>(p));
    return value;
}

double tau_moment(std::int64_t N, int k, const TauModel& model) {
    CompensatedSum sum;
    for (std::int64_t h = 1; h < N; ++h) sum.add(std::pow(tau_weight(h, N, model), k));
    return sum.value() / static_cast<double>(N - 1);
}

void CorrelationSpec::validate() const {
    if (m0 < 2) throw InvalidInput("correlation: m0 must be >= 2");
    if (m1 < 1) throw InvalidInput("correlation: m1 must be >= 1");
    if (forms.forms() != m1) throw InvalidInput("correlation: need exactly m1 forms");
    forms.validate();
    if (shifts.size() != m1) throw InvalidInput("correlation: need m1 rows of shifts");
    for (const auto& row : shifts) {
        if (row.size() != m0) throw InvalidInput("correlation: each shift row needs m0 entries");
        for (std::size_t j = 0; j < m0; ++j)
            for (std::size_t k = j + 1; k < m0; ++k)
                if (row[j] == row[k]) throw InvalidInput("correlation: shifts within a row must be distinct");
    }
    if (!(tau.c1 > 0.0) || !(tau.c2 > 0.0)) throw InvalidInput("correlation: tau constants must be positive");
}

CorrelationReport verify_correlation(const GridFunction& nu, const CorrelationSpec& spec, std::uint64_t samples,
                                     std::uint64_t seed) {
    spec.validate();
    const std::int64_t n = nu.modulus();
    std::vector<std::vector<std::int64_t>> coeffs;
    std::vector<std::int64_t> shifts;
    for (std::size_t i = 0; i < spec.m1; ++i)
        for (std::size_t j = 0; j < spec.m0; ++j) {
            coeffs.push_back(spec.forms.coeffs[i]);
            shifts.push_back(spec.forms.shifts[i] + spec.shifts[i][j]);
        }
    CorrelationReport report{};
    report.lhs = affine_product_mean(nu, coeffs, shifts, samples, seed);
    // the product runs over the m1 form blocks
    double rhs = 1.0;
    for (const auto& row : spec.shifts) {
        CompensatedSum s;
        for (std::size_t j = 0; j < spec.m0; ++j)
            for (std::size_t k = j + 1; k < spec.m0; ++k) {
                if (mod_floor(row[j] - row[k], n) == 0)
                    throw InvalidInput("correlation: shifts within a row must be distinct mod N");
                s.add(tau_weight(row[j] - row[k], n, spec.tau));
            }
        rhs *= s.value();
    }
    report.rhs = rhs;
    report.ratio = report.lhs.value / rhs;
    // rhs scales as c1^m1
    report.fitted_c1 = spec.tau.c1 * std::pow(std::max(report.ratio, 0.0), 1.0 / static_cast<double>(spec.m1));
    return report;
}

std::int64_t ThetaSystem::delta(std::size_t block) const {
    const auto& row = shifts.at(block);
    __int128 product = 1;
    for (std::size_t j = 0; j < row.size(); ++j)
        for (std::size_t k = j + 1; k < row.size(); ++k) {
            product *= std::abs(row[j] - row[k]);
            if (product > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
        }
    return static_cast<std::int64_t>(product);
}

void ThetaSystem::validate() const {
    if (m0 < 1 || m1 < 1) throw InvalidInput("theta system: m0, m1 must be >= 1");
    if (count() > 20) throw InvalidInput("theta system: at most 20 forms");
    if (primorial_modulus < 1) throw InvalidInput("theta system: W must be positive");
    if (forms.size() != m1 || shifts.size() != m1) throw InvalidInput("theta system: need m1 forms and shift rows");
    const std::size_t r = variables();
    if (r < 1) throw InvalidInput("theta system: need at least one variable");
    for (const auto& f : forms)
        if (f.size() != r) throw InvalidInput("theta system: ragged forms");
    for (const auto& row : shifts)
        if (row.size() != m0) throw InvalidInput("theta system: each shift row needs m0 entries");
}

Rational omega_X(std::int64_t p, const ThetaSystem& system, std::uint64_t X, OmegaMethod method) {
    system.validate();
    if (p < 2 || !is_prime_u64(static_cast<std::uint64_t>(p))) throw InvalidInput("omega: p must be prime");
    const std::size_t M = system.count();
    const std::size_t r = system.variables();
    if (M < 64 && (X >> M) != 0) throw InvalidInput("omega: X has indices beyond M");

    // rows: (W phi_i mod p | -(W h + b) mod p)
    std::vector<std::vector<std::int64_t>> rows;
    for (std::size_t a = 0; a < M; ++a) {
        if (!(X >> a & 1)) continue;
        const std::size_t i = system.block_of(a), j = a % system.m0;
        std::vector<std::int64_t> row(r + 1);
        for (std::size_t k = 0; k < r; ++k) {
            const __int128 scaled = static_cast<__int128>(system.primorial_modulus) * system.forms[i][k];
            row[k] = mod_floor(static_cast<std::int64_t>(scaled % p), p);
        }
        const __int128 constant = static_cast<__int128>(system.primorial_modulus) * system.shifts[i][j] + system.residue;
        row[r] = mod_floor(-static_cast<std::int64_t>(constant % p), p);
        rows.push_back(std::move(row));
    }

    const bool small = p <= 13 && r <= 4;
    if (method == OmegaMethod::Exhaustive && !small)
        throw InvalidInput("omega: exhaustive path needs p <= 13 and r <= 4; use the solver path");
    if (method == OmegaMethod::Solver || (method == OmegaMethod::Auto && !small)) {
        if (rows.empty()) return Rational(1);
        std::vector<std::vector<std::int64_t>> homogeneous;
        for (const auto& row : rows) homogeneous.emplace_back(row.begin(), row.end() - 1);
        const std::size_t rank = rank_mod_p(homogeneous, p);
        if (rank_mod_p(rows, p) != rank) return Rational(0);
        std::int64_t denom = 1;
        for (std::size_t k = 0; k < rank; ++k) denom *= p;
        return Rational(1, denom);
    }

    std::int64_t total = 1;
    for (std::size_t k = 0; k < r; ++k) total *= p;
    std::int64_t hits = 0;
    std::vector<std::int64_t> y(r, 0);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        bool all = true;
        for (const auto& row : rows) {
            std::int64_t v = 0;
            for (std::size_t k = 0; k < r; ++k) v += row[k] * y[k];
            if ((v - row[r]) % p != 0) {
                all = false;
                break;
            }
        }
        hits += all;
        for (std::size_t k = 0; k < r; ++k) {
            if (++y[k] < p) break;
            y[k] = 0;
        }
    }
    return Rational(hits, total);
}

LocalFactorReport verify_local_factor_cases(const ThetaSystem& system, const std::vector<std::int64_t>& primes) {
    system.validate();
    const std::size_t M = system.count();
    if (M > 16) throw InvalidInput("local factors: at most 16 forms for subset enumeration");
    LocalFactorReport report;
    for (std::int64_t p : primes) {
        std::vector<bool> zero_form(system.m1);
        for (std::size_t i = 0; i < system.m1; ++i) zero_form[i] = rank_mod_p({system.forms[i]}, p) == 0;
        for (std::uint64_t X = 0; X < (std::uint64_t{1} << M); ++X) {
            const Rational omega = omega_X(p, system, X);
            const auto count = static_cast<std::size_t>(std::popcount(X));
            auto fail = [&](int c) { report.violations.push_back({X, p, c, omega}); };
            ++report.checked;
            if (count == 0) {
                ++report.case_counts[1];
                if (omega != Rational(1)) fail(2);
                continue;
            }
            if (system.primorial_modulus % p == 0) {
                ++report.case_counts[0];
                if (omega != Rational(0)) fail(1);
                continue;
            }
            std::vector<std::size_t> blocks;
            for (std::size_t a = 0; a < M; ++a)
                if ((X >> a & 1) &&
                    std::find(blocks.begin(), blocks.end(), system.block_of(a)) == blocks.end())
                    blocks.push_back(system.block_of(a));
            bool degenerate = false;
            for (auto i : blocks) degenerate |= zero_form[i];
            for (std::size_t u = 0; u < blocks.size() && !degenerate; ++u)
                for (std::size_t v = u + 1; v < blocks.size(); ++v)
                    if (rank_mod_p({system.forms[blocks[u]], system.forms[blocks[v]]}, p) < 2) degenerate = true;
            if (degenerate) {
                ++report.degenerate;
                continue;
            }
            if (blocks.size() == 1) {
                ++report.case_counts[2];
                if (count == 1 && omega != Rational(1, p)) fail(3);
                if (count > 1) {
                    if (omega > Rational(1, p)) fail(3);
                    if (system.delta(blocks[0]) % p != 0) {
                        ++report.vanishing_checked;
                        if (omega != Rational(0)) fail(3);
                    }
                }
            } else {
                ++report.case_counts[3];
                if (omega > Rational(1, p * p)) fail(4);
            }
        }
    }
    return report;
}

EulerFactors euler_factors(std::int64_t p, const ThetaSystem& system, std::int64_t w, const std::vector<double>& z,
                           const std::vector<double>& z2) {
    const std::size_t M = system.count();
    if (M > 4) throw InvalidInput("euler factors: M must be <= 4");
    if (z.size() != M || z2.size() != M) throw InvalidInput("euler factors: points need M coordinates each");
    const double pd = static_cast<double>(p);
    const std::uint64_t subsets = std::uint64_t{1} << M;
    std::vector<double> omega(subsets);
    for (std::uint64_t X = 0; X < subsets; ++X) omega[X] = to_double(omega_X(p, system, X));

    std::vector<std::uint64_t> block_mask(system.m1, 0);
    for (std::size_t a = 0; a < M; ++a) block_mask[system.block_of(a)] |= std::uint64_t{1} << a;

    double full = 0.0;
    std::vector<double> lambda(system.m1, 0.0);
    for (std::uint64_t X = 0; X < subsets; ++X)
        for (std::uint64_t Y = 0; Y < subsets; ++Y) {
            double exponent = 0.0;
            for (std::size_t a = 0; a < M; ++a) {
                if (X >> a & 1) exponent += z[a];
                if (Y >> a & 1) exponent += z2[a];
            }
            const double sign = (std::popcount(X) + std::popcount(Y)) % 2 ? -1.0 : 1.0;
            const double term = sign * omega[X | Y] * std::pow(pd, -exponent);
            full += term;
            const std::uint64_t U = X | Y;
            if (std::popcount(U) > 1)
                for (std::size_t i = 0; i < system.m1; ++i)
                    if ((U & ~block_mask[i]) == 0) lambda[i] += term;
        }

    const bool large = p > w;
    double e0 = 1.0;
    for (std::size_t i = 0; i < system.m1; ++i)
        if (large && system.delta(i) % p == 0) e0 += lambda[i];

    double a = 1.0, e2 = 1.0, e3 = 1.0;
    for (std::size_t j = 0; j < M; ++j) {
        const double u = std::pow(pd, -1.0 - z[j]);
        const double v = std::pow(pd, -1.0 - z2[j]);
        const double uv = std::pow(pd, -1.0 - z[j] - z2[j]);
        const double big = large ? 1.0 : 0.0, small = large ? 0.0 : 1.0;
        a *= (1.0 - big * u) * (1.0 - big * v) / (1.0 - big * uv);
        e2 *= (1.0 - small * uv) / ((1.0 - small * u) * (1.0 - small * v));
        e3 *= (1.0 - u) * (1.0 - v) / (1.0 - uv);
    }
    return {full, e0, full / (e0 * a), e2, e3};
}

Rational g2_at_origin(std::int64_t w, std::size_t M) {
    Rational product(1);
    for (std::int64_t p : primes_upto(w)) {
        const Rational one_minus(p - 1, p);
        for (std::size_t j = 0; j < M; ++j) product *= one_minus / (one_minus * one_minus);
    }
    return product;
}

EulerIdentityReport euler_factor_identity_check(
    const ThetaSystem& system, std::int64_t w,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& points,
    const std::vector<std::int64_t>& primes) {
    system.validate();
    const std::size_t M = system.count();
    const double box = 1.0 / (6.0 * static_cast<double>(M));
    EulerIdentityReport report;
    for (const auto& [z, z2] : points) {
        for (double v : z)
            if (v < 0.0 || v > box) throw InvalidInput("euler check: point outside [0, 1/(6M)]");
        for (double v : z2)
            if (v < 0.0 || v > box) throw InvalidInput("euler check: point outside [0, 1/(6M)]");
        for (std::int64_t p : primes) {
            const auto f = euler_factors(p, system, w, z, z2);
            const double product = f.e0 * f.e1 * f.e2 * f.e3;
            report.max_relative_error =
                std::max(report.max_relative_error, std::abs(product - f.full) / std::abs(f.full));
            ++report.evaluations;
        }
    }
    report.g2_product = g2_at_origin(w, M);
    const std::int64_t W = primorial(w);
    const Rational ratio(W, euler_phi(W));
    report.g2_expected = Rational(1);
    for (std::size_t j = 0; j < M; ++j) report.g2_expected *= ratio;
    report.g2_matches = report.g2_product == report.g2_expected;
    return report;
}

namespace {

std::string rational_text(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace

nlohmann::ordered_json to_json(const Estimate& e) {
    nlohmann::ordered_json j;
    j["value"] = e.value;
    j["std_error"] = e.std_error;
    j["samples"] = e.samples;
    j["exact"] = e.exact;
    return j;
}

nlohmann::ordered_json to_json(const CorrelationReport& r) {
    nlohmann::ordered_json j;
    j["lhs"] = to_json(r.lhs);
    j["rhs"] = r.rhs;
    j["ratio"] = r.ratio;
    j["fitted_c1"] = r.fitted_c1;
    return j;
}

nlohmann::ordered_json to_json(const LocalFactorReport& r) {
    nlohmann::ordered_json j;
    j["checked"] = r.checked;
    j["degenerate"] = r.degenerate;
    j["case_counts"] = {r.case_counts[0], r.case_counts[1], r.case_counts[2], r.case_counts[3]};
    j["vanishing_checked"] = r.vanishing_checked;
    auto& v = j["violations"] = nlohmann::ordered_json::array();
    for (const auto& x : r.violations) {
        nlohmann::ordered_json row;
        row["X"] = x.X;
        row["p"] = x.p;
        row["case"] = x.case_number;
        row["omega"] = rational_text(x.omega);
        v.push_back(row);
    }
    return j;
}

nlohmann::ordered_json to_json(const EulerIdentityReport& r) {
    nlohmann::ordered_json j;
    j["max_relative_error"] = r.max_relative_error;
    j["evaluations"] = r.evaluations;
    j["g2_product"] = rational_text(r.g2_product);
    j["g2_expected"] = rational_text(r.g2_expected);
    j["g2_matches"] = r.g2_matches;
    return j;
}

}  // namespace clab
