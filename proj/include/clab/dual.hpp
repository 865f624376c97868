#pragma once

#include "clab/boxnorm.hpp"
#include "clab/gridfn.hpp"
#include "clab/lattice.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace clab {

/// Df(x) = E( prod_{omega != 0} f(x + omega t e) : t in Z_N^d ), via change of
/// basis and axis contraction.
GridFunction dual_function(const GridFunction& f, const Basis& e);

/// Same value by direct enumeration over t; O(2^d N^{2d}).
GridFunction dual_function_naive(const GridFunction& f, const Basis& e);

/// E(f g) over Z_N^d.
double pairing(const GridFunction& f, const GridFunction& g);

struct QapOptions {
    std::vector<double> epsilons{0.01, 0.05, 0.1, 0.2, 0.5};
    std::vector<int> product_orders{1, 2, 3};
    /// Per-order budget C(K) keyed by position in product_orders; exceeding it is flagged.
    std::vector<std::optional<double>> budgets;
    double min_norm = 1e-8;
};

struct QapCurvePoint {
    double epsilon;
    std::size_t probes;      // probes with norm >= epsilon
    double min_pairing;      // NaN when probes == 0
};

struct QapProductBound {
    int order;
    double lower_bound;      // max_f <f, Df_1 ... Df_K> / ||f||
    std::optional<double> budget;
    bool budget_exceeded;
};

struct QapReport {
    double upper;                    // max <f, Df>
    double mu_norm_power;            // ||mu||^{2^d}
    double identity_max_error;       // max |<f, Df> - ||f||^{2^d}|
    std::size_t probes;
    std::vector<QapCurvePoint> lower_curve;
    std::vector<QapProductBound> product_bound;
};

/// Evaluates the report on caller-supplied probes. The first K probes supply
/// f_1..f_K for the product bounds.
QapReport qap_report(const GridFunction& mu, const Basis& e, std::span<const GridFunction> probes,
                     const QapOptions& options = {});

/// Generates `count` probes with |f| <= mu (signed-uniform scalings of mu,
/// mu times box indicators, mu times cosine characters, in rotation).
std::vector<GridFunction> qap_probes(const GridFunction& mu, std::size_t count, std::uint64_t seed);

QapReport qap_probe(const GridFunction& mu, const Basis& e, std::size_t count, std::uint64_t seed,
                    const QapOptions& options = {});

nlohmann::ordered_json to_json(const QapReport& report);

}  // namespace clab
