#include <doctest.h>

#include "clab/dual.hpp"
#include "clab/error.hpp"

#include <cmath>
#include <vector>

using namespace clab;

namespace {

Basis skew_basis(std::int64_t n) { return Basis({{1, 2}, {2, 1}}, n); }

}  // namespace

TEST_CASE("dual of constants") {
    const std::int64_t n = 7;
    for (double c : {1.0, -0.5, 2.0}) {
        const auto df = dual_function(GridFunction(n, 2, c), skew_basis(n));
        for (double v : df.values()) CHECK(v == doctest::Approx(std::pow(c, 3)).epsilon(1e-14));
    }
}

TEST_CASE("d = 1 dual is the constant mean") {
    const std::int64_t n = 5;
    const auto f = GridFunction::from_fn(n, 1, [](auto x) { return x[0] * x[0] - 1.0; });
    const auto df = dual_function(f, Basis({{1}}, n));
    for (double v : df.values()) CHECK(v == doctest::Approx(expectation(f)).epsilon(1e-14));
}

TEST_CASE("factored dual agrees with naive enumeration") {
    for (auto [n, d] : {std::pair<std::int64_t, std::size_t>{7, 2}, {5, 3}}) {
        std::vector<VecZd> v(d, VecZd(d, 0));
        for (std::size_t i = 0; i < d; ++i) {
            v[i][i] = 1;
            v[i][(i + 1) % d] = static_cast<std::int64_t>(i) + 1;
        }
        const Basis e(v, n);
        REQUIRE(e.invertible_mod_n());
        const auto f = random_probe(GridFunction(n, d, 1.0), 11);
        const auto a = dual_function(f, e);
        const auto b = dual_function_naive(f, e);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("pairing identity and homogeneity") {
    const std::int64_t n = 7;
    const auto e = skew_basis(n);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto f = random_probe(GridFunction(n, 2, 1.0), s);
        const auto df = dual_function(f, e);
        CHECK(std::abs(pairing(f, df) - box_norm_power(f, BoxNormPlan::factored(e))) <= 1e-10);
        const auto d2 = dual_function(scaled(f, -1.7), e);
        for (std::size_t i = 0; i < df.size(); ++i) CHECK(d2[i] == doctest::Approx(std::pow(-1.7, 3) * df[i]).epsilon(1e-12));
        for (double v : df.values()) CHECK(std::abs(v) <= 1.0);
    }
}

TEST_CASE("pairing basics") {
    CHECK(pairing(GridFunction(5, 2, 1.0), GridFunction(5, 2, 1.0)) == doctest::Approx(1.0));
    // alternating sign pattern is orthogonal to a function of x2 alone on an even grid
    const auto f = GridFunction::from_fn(4, 2, [](auto x) { return x[0] % 2 ? 1.0 : -1.0; });
    const auto g = GridFunction::from_fn(4, 2, [](auto x) { return 1.0 + x[1]; });
    CHECK(std::abs(pairing(f, g)) <= 1e-12);
    CHECK_THROWS_AS(pairing(f, GridFunction(5, 2)), InvalidInput);
}

TEST_CASE("qap report with constant probes under mu = 1") {
    const std::int64_t n = 7;
    std::vector<GridFunction> probes;
    for (double c : {-1.0, -0.3, 0.2, 0.9}) probes.emplace_back(n, 2, c);
    QapOptions opts;
    opts.budgets = {10.0, 10.0, 10.0};
    const auto report = qap_report(GridFunction(n, 2, 1.0), skew_basis(n), probes, opts);
    CHECK(report.upper == doctest::Approx(1.0));
    CHECK(report.identity_max_error <= 1e-12);
    for (const auto& b : report.product_bound) {
        CHECK(std::isfinite(b.lower_bound));
        CHECK_FALSE(b.budget_exceeded);
    }
}

TEST_CASE("generated probes obey |f| <= mu and the report invariants hold") {
    const std::int64_t n = 11;
    const auto mu = GridFunction::from_fn(n, 2, [](auto x) { return 0.5 + ((x[0] * x[1]) % 3); });
    const auto probes = qap_probes(mu, 9, 5);
    for (const auto& f : probes)
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i]) <= mu[i] + 1e-15);
    const auto report = qap_report(mu, skew_basis(n), probes);
    CHECK(report.upper <= report.mu_norm_power + 1e-9);
    CHECK(report.identity_max_error <= 1e-10);
    for (const auto& p : report.lower_curve)
        if (p.probes) CHECK(p.min_pairing >= std::pow(p.epsilon, 4) - 1e-9);
    // adding probes can only raise the lower bounds
    const auto more = qap_report(mu, skew_basis(n), qap_probes(mu, 15, 5));
    for (std::size_t k = 0; k < report.product_bound.size(); ++k)
        CHECK(more.product_bound[k].lower_bound >= report.product_bound[k].lower_bound);
    const auto j = to_json(report);
    CHECK(j.begin().key() == "upper");
    CHECK(j["product_bound"].size() == 3);
    CHECK_THROWS_AS(qap_probe(scaled(mu, -1.0), skew_basis(n), 3, 1), InvalidInput);
}
