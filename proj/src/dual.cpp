#include "clab/dual.hpp"
#include "box_kernels.hpp"
#include "clab/error.hpp"
#include "clab/numeric.hpp"
#include "clab/parallel.hpp"
#include "clab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace clab {

namespace {

void check_basis(const GridFunction& f, const Basis& e) {
    if (e.count() != f.dim() || e.dim() != f.dim())
        throw InvalidInput("dual function: basis must have d vectors in Z^d");
    if (e.modulus() != 0 && e.modulus() != f.modulus())
        throw InvalidInput("dual function: basis modulus differs from the grid modulus");
}

}  // namespace

GridFunction dual_function(const GridFunction& f, const Basis& e) {
    check_basis(f, e);
    const std::int64_t n = f.modulus();
    const std::size_t d = f.dim();
    const auto perm = basis_permutation(n, e);
    std::vector<double> pulled(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) pulled[i] = f[perm[i]];
    const std::vector<double> ones(perm.size(), 1.0);
    std::vector<std::span<const double>> views(std::size_t{1} << d, std::span<const double>(pulled));
    views[0] = ones;
    std::vector<double> std_out(perm.size());
    detail::std_dual(views, n, d, std_out);
    std::vector<double> out(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = std_out[i];
    return GridFunction(n, d, std::move(out));
}

GridFunction dual_function_naive(const GridFunction& f, const Basis& e) {
    check_basis(f, e);
    const std::int64_t n = f.modulus();
    const std::size_t d = f.dim();
    const std::size_t corners = std::size_t{1} << d;
    const auto reduced = e.with_modulus(n).reduced();
    std::vector<double> out(f.size());
    for_each_block(f.size(), [&](std::size_t xi) {
        VecZd x(d), t(d), p(d);
        f.coords_of(xi, x);
        CompensatedSum sum;
        for (std::size_t ti = 0; ti < f.size(); ++ti) {
            f.coords_of(ti, t);
            double prod = 1.0;
            for (std::size_t w = 1; w < corners; ++w) {
                p = x;
                for (std::size_t i = 0; i < d; ++i)
                    if (w >> i & 1)
                        for (std::size_t c = 0; c < d; ++c) p[c] += t[i] * reduced[i][c];
                prod *= f.at(p);
            }
            sum.add(prod);
        }
        out[xi] = sum.value() / static_cast<double>(f.size());
    });
    return GridFunction(n, d, std::move(out));
}

double pairing(const GridFunction& f, const GridFunction& g) {
    if (!f.same_shape(g)) throw InvalidInput("pairing: shape mismatch");
    return expectation(pointwise_product(f, g));
}

std::vector<GridFunction> qap_probes(const GridFunction& mu, std::size_t count, std::uint64_t seed) {
    if (!mu.nonnegative()) throw InvalidInput("qap probes: mu has negative entries");
    const std::int64_t n = mu.modulus();
    const std::size_t d = mu.dim();
    std::vector<GridFunction> probes;
    probes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t s = block_seed(seed, i);
        switch (i % 3) {
            case 0:
                probes.push_back(random_probe(mu, s));
                break;
            case 1: {
                Rng rng(s);
                VecZd lo(d), len(d);
                for (std::size_t j = 0; j < d; ++j) {
                    lo[j] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
                    len[j] = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
                }
                const double sign = rng.below(2) ? 1.0 : -1.0;
                probes.push_back(GridFunction::from_fn(n, d, [&](std::span<const std::int64_t> x) {
                    for (std::size_t j = 0; j < d; ++j)
                        if (mod_floor(x[j] - lo[j], n) >= len[j]) return 0.0;
                    return sign * mu.at(x);
                }));
                break;
            }
            default: {
                Rng rng(s);
                VecZd freq(d);
                for (auto& c : freq) c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
                const double phase = rng.uniform01();
                probes.push_back(GridFunction::from_fn(n, d, [&](std::span<const std::int64_t> x) {
                    std::int64_t dot = 0;
                    for (std::size_t j = 0; j < d; ++j) dot = (dot + freq[j] * x[j]) % n;
                    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(dot) / n + phase);
                    return mu.at(x) * std::cos(angle);
                }));
            }
        }
    }
    return probes;
}

QapReport qap_report(const GridFunction& mu, const Basis& e, std::span<const GridFunction> probes,
                     const QapOptions& options) {
    if (!mu.nonnegative()) throw InvalidInput("qap probe: mu has negative entries");
    if (probes.empty()) throw InvalidInput("qap probe: need at least one probe");
    for (const auto& f : probes)
        if (!f.same_shape(mu)) throw InvalidInput("qap probe: probe shape differs from mu");
    if (!options.budgets.empty() && options.budgets.size() != options.product_orders.size())
        throw InvalidInput("qap probe: budgets must match product orders");
    const auto plan = BoxNormPlan::factored(e);
    const double power = static_cast<double>(std::size_t{1} << mu.dim());

    struct ProbeResult {
        double pairing, norm_power, norm;
    };
    std::vector<ProbeResult> results(probes.size());
    std::vector<GridFunction> duals(probes.size(), GridFunction(mu.modulus(), mu.dim()));
    for_each_block(probes.size(), [&](std::size_t i) {
        duals[i] = dual_function(probes[i], e);
        const double np = box_norm_power(probes[i], plan);
        results[i] = {pairing(probes[i], duals[i]), np, std::pow(np, 1.0 / power)};
    });

    QapReport report{};
    report.probes = probes.size();
    report.mu_norm_power = box_norm_power(mu, plan);
    report.upper = -std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
        report.upper = std::max(report.upper, r.pairing);
        report.identity_max_error = std::max(report.identity_max_error, std::abs(r.pairing - r.norm_power));
    }
    for (double eps : options.epsilons) {
        QapCurvePoint point{eps, 0, std::numeric_limits<double>::quiet_NaN()};
        for (const auto& r : results) {
            if (r.norm < eps) continue;
            point.min_pairing = point.probes == 0 ? r.pairing : std::min(point.min_pairing, r.pairing);
            ++point.probes;
        }
        report.lower_curve.push_back(point);
    }
    for (std::size_t k = 0; k < options.product_orders.size(); ++k) {
        const int order = options.product_orders[k];
        if (order < 1 || static_cast<std::size_t>(order) > probes.size())
            throw InvalidInput("qap probe: product order exceeds the number of probes");
        GridFunction product = duals[0];
        for (int j = 1; j < order; ++j) product = pointwise_product(product, duals[j]);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < probes.size(); ++i) {
            if (results[i].norm < options.min_norm) continue;
            best = std::max(best, pairing(probes[i], product) / results[i].norm);
        }
        const auto budget = options.budgets.empty() ? std::nullopt : options.budgets[k];
        report.product_bound.push_back({order, best, budget, budget && best > *budget});
    }
    return report;
}

QapReport qap_probe(const GridFunction& mu, const Basis& e, std::size_t count, std::uint64_t seed,
                    const QapOptions& options) {
    if (count < 1) throw InvalidInput("qap probe: probes must be >= 1");
    const auto probes = qap_probes(mu, count, seed);
    return qap_report(mu, e, probes, options);
}

nlohmann::ordered_json to_json(const QapReport& report) {
    nlohmann::ordered_json j;
    j["upper"] = report.upper;
    j["mu_norm_power"] = report.mu_norm_power;
    j["identity_max_error"] = report.identity_max_error;
    j["probes"] = report.probes;
    auto& curve = j["lower_curve"] = nlohmann::ordered_json::array();
    for (const auto& p : report.lower_curve) {
        nlohmann::ordered_json row;
        row["epsilon"] = p.epsilon;
        row["probes"] = p.probes;
        row["min_pairing"] = p.probes ? nlohmann::ordered_json(p.min_pairing) : nlohmann::ordered_json(nullptr);
        curve.push_back(row);
    }
    auto& prod = j["product_bound"] = nlohmann::ordered_json::array();
    for (const auto& b : report.product_bound) {
        nlohmann::ordered_json row;
        row["K"] = b.order;
        row["lower_bound"] = std::isfinite(b.lower_bound) ? nlohmann::ordered_json(b.lower_bound)
                                                          : nlohmann::ordered_json(nullptr);
        row["budget"] = b.budget ? nlohmann::ordered_json(*b.budget) : nlohmann::ordered_json(nullptr);
        row["budget_exceeded"] = b.budget_exceeded;
        prod.push_back(row);
    }
    return j;
}

}  // namespace clab
