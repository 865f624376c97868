#include <doctest.h>

#include "clab/counting.hpp"
#include "clab/error.hpp"
#include "clab/rng.hpp"
#include "clab/sieve.hpp"

#include <cmath>
#include <algorithm>
#include <set>

using namespace clab;

namespace {

const std::vector<VecZd> kSkew{{1, 2}, {2, 1}};

bool trial_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("count average of constants") {
    CHECK(count_average(GridFunction(7, 2, 1.0), kSkew).value == 1.0);
    CHECK(count_average(GridFunction(7, 2, 0.5), kSkew).value == doctest::Approx(0.125).epsilon(1e-14));
    CHECK_THROWS_AS(count_average(GridFunction(7, 2, 1.0), {{1, 2}}), InvalidInput);
}

TEST_CASE("count average of an indicator counts wrapped solutions") {
    const std::int64_t n = 31;
    const auto ind = GridFunction::from_fn(n, 2, [](std::span<const std::int64_t> x) { return (x[0] * 3 + x[1] * x[1]) % 5 < 2 ? 1.0 : 0.0; });
    std::uint64_t solutions = 0;
    for (std::int64_t a = 0; a < n; ++a)
        for (std::int64_t b = 0; b < n; ++b)
            for (std::int64_t t = 0; t < n; ++t) {
                auto in = [&](std::int64_t u, std::int64_t v) {
                    u = mod_floor(u, n);
                    v = mod_floor(v, n);
                    return (u * 3 + v * v) % 5 < 2;
                };
                solutions += in(a, b) && in(a + t, b + 2 * t) && in(a + 2 * t, b + t);
            }
    const auto avg = count_average(ind, kSkew);
    CHECK(std::llround(avg.value * n * n * n) == static_cast<long long>(solutions));
}

TEST_CASE("exact and sampled counts agree") {
    const auto f = random_fraction_probe(GridFunction(11, 2, 1.0), 8);
    const auto exact = count_average(f, kSkew);
    const auto mc = count_average(f, kSkew, {false, 1'000'000, 3});
    CHECK(std::abs(exact.value - mc.value) <= 3 * mc.std_error);
    CHECK(count_average(f, kSkew, {false, 1'000'000, 3}).value == mc.value);
}

TEST_CASE("von Neumann probe") {
    const std::int64_t n = 101;
    const Basis e(kSkew, 0);
    const std::vector<GridFunction> ones{GridFunction(n, 2, 1.0)};
    const auto unit = von_neumann_report(e, ones, {false});
    CHECK(unit.samples[0].box_norm == doctest::Approx(1.0));
    CHECK(unit.samples[0].count == doctest::Approx(1.0));
    CHECK(unit.max_ratio == doctest::Approx(1.0));
    CHECK(unit.derived.vectors() == std::vector<VecZd>{{2, 1}, {1, -1}});

    // averaging k independent sign patterns shrinks both quantities
    std::vector<GridFunction> probes;
    std::vector<bool> flags;
    for (int k : {1, 16}) {
        GridFunction acc(n, 2, 0.0);
        for (int j = 0; j < k; ++j)
            acc = linear_combination(1.0, acc, 1.0 / k,
                                     GridFunction::from_fn(n, 2, [&, j](std::span<const std::int64_t> x) {
                                         const auto h = splitmix64(static_cast<std::uint64_t>(x[0] * n + x[1]) * 977 + j);
                                         return h & 1 ? 1.0 : -1.0;
                                     }));
        probes.push_back(acc);
        flags.push_back(true);
    }
    const auto report = von_neumann_report(e, probes, flags);
    CHECK(report.samples[1].box_norm < report.samples[0].box_norm);
    CHECK(std::abs(report.samples[1].count) < report.samples[0].box_norm);
    for (const auto& s : report.samples) CHECK(std::abs(s.count) <= s.box_norm + 1e-12);

    const auto a = von_neumann_probe(GridFunction(31, 2, 1.0), e, 4, 9);
    const auto b = von_neumann_probe(GridFunction(31, 2, 1.0), e, 4, 9);
    CHECK(a.max_ratio == b.max_ratio);
    CHECK(std::isfinite(a.max_ratio));
}

TEST_CASE("unwrap examples") {
    const BoxInterval box{10, 30};
    const auto plain = unwrap({12, 15}, 3, kSkew, box, 101, 0.25);
    REQUIRE(plain);
    CHECK(plain->t_prime == 3);
    const auto wrapped = unwrap({20, 20}, 98, kSkew, box, 101, 0.25);
    REQUIRE(wrapped);
    CHECK(wrapped->t_prime == -3);
    CHECK(wrapped->scale == 1);
    CHECK_THROWS_AS(unwrap({20, 20}, 98, kSkew, box, 101, 0.4), PreconditionViolation);
    CHECK_THROWS_AS(unwrap({20, 20}, 98, kSkew, box, 101, 0.15), PreconditionViolation);
    CHECK_FALSE(unwrap({5, 20}, 98, kSkew, box, 101, 0.25));
    // e = 2 e': the answer is in units of e'
    const auto scaled = unwrap({20, 20}, 49, {{2, 4}, {4, 2}}, box, 101, 0.25);
    REQUIRE(scaled);
    CHECK(scaled->scale == 2);
    CHECK(scaled->t_prime == -3);
}

TEST_CASE("unwrap sweep on a small modulus") {
    const std::int64_t n = 31;
    std::size_t checked = 0, failures = 0;
    // tau = 1/3, so boxes of side D need 3 D < N
    for (std::int64_t lo = 1; lo <= n; ++lo)
        for (std::int64_t hi = lo; hi <= n && 3 * (hi - lo) < n; ++hi) {
            const double eps = 0.5 * (static_cast<double>(hi - lo) / n + 1.0 / 3);
            for (std::int64_t a = lo; a <= hi; ++a)
                for (std::int64_t b = lo; b <= hi; ++b)
                    for (std::int64_t t = 1; t < n; ++t) {
                        bool ok = true;
                        for (const auto& v : kSkew) {
                            for (std::int64_t c : {a + t * v[0], b + t * v[1]}) {
                                std::int64_t r = mod_floor(c, n);
                                if (r == 0) r = n;
                                ok &= r >= lo && r <= hi;
                            }
                        }
                        if (!ok) continue;
                        ++checked;
                        const auto r = unwrap({a, b}, t, kSkew, {lo, hi}, n, eps);
                        if (!r) {
                            ++failures;
                            continue;
                        }
                        for (const auto& v : kSkew)
                            for (std::int64_t c : {a + r->t_prime * v[0], b + r->t_prime * v[1]})
                                failures += c < lo || c > hi;
                    }
        }
    CHECK(checked > 0);
    CHECK(failures == 0);
}

TEST_CASE("point sets and exhaustive constellation search") {
    CHECK(find_constellations(PointSet(20, 2), kSkew, 10).empty());
    PointSet single(20, 2);
    std::vector<std::int64_t> p{4, 7};
    single.insert(p);
    CHECK(single.size() == 1);
    CHECK(find_constellations(single, kSkew, 10).empty());
    CHECK(default_t_max(50, kSkew) == 25);

    const auto primes = PointSet::from_predicate(50, 2, all_prime);
    const auto found = find_constellations(primes, kSkew, default_t_max(50, kSkew));
    const Constellation target{{3, 3}, 2, true};
    CHECK(std::find(found.begin(), found.end(), target) != found.end());

    // brute-force oracle on [1,30]^2
    std::set<std::pair<std::pair<std::int64_t, std::int64_t>, std::int64_t>> oracle;
    for (std::int64_t a = 1; a <= 30; ++a)
        for (std::int64_t b = 1; b <= 30; ++b)
            for (std::int64_t t = -15; t <= 15; ++t) {
                if (t == 0) continue;
                const std::int64_t pts[3][2] = {{a, b}, {a + t, b + 2 * t}, {a + 2 * t, b + t}};
                bool ok = true;
                for (auto& q : pts) ok &= q[0] >= 1 && q[0] <= 30 && q[1] >= 1 && q[1] <= 30 && trial_prime(q[0]) && trial_prime(q[1]);
                if (ok) oracle.insert({{a, b}, t});
            }
    const auto small = find_constellations(PointSet::from_predicate(30, 2, all_prime), kSkew, 15);
    std::set<std::pair<std::pair<std::int64_t, std::int64_t>, std::int64_t>> got;
    for (const auto& c : small) got.insert({{c.base[0], c.base[1]}, c.step});
    CHECK(got.size() == small.size());
    CHECK(got == oracle);
}

TEST_CASE("pipeline on the empty set and on prime pairs") {
    PipelineConfig cfg;
    cfg.n_prime = 2000;
    cfg.samples = 400000;
    const auto empty = run_pipeline([](std::span<const std::int64_t>) { return false; }, "empty", cfg);
    CHECK(empty["statistics"]["expectation_g"] == 0.0);
    CHECK(empty["constellations"].empty());
    CHECK(empty["hits"]["genuine"] == 0);

    const auto report = run_pipeline(all_prime, "P^2", cfg);
    const std::int64_t N = report["parameters"]["N"];
    const double eps2 = report["parameters"]["eps2"];
    CHECK(is_prime_u64(static_cast<std::uint64_t>(N)));
    CHECK((1 - 1.0 / 200) * 2000 <= eps2 * N + 1e-9);
    CHECK(eps2 * N <= 2000 + 1e-9);
    CHECK(report["measure_check"]["g_le_mu"] == true);
    CHECK(report["density"]["window_loss_ok"] == true);
    CHECK(report["constellations"].size() >= 1);
    for (const auto& c : report["constellations"]) {
        const std::int64_t t = c["t"];
        CHECK(t != 0);
        for (const auto& p : c["points"]) {
            CHECK(trial_prime(p[0].get<std::int64_t>()));
            CHECK(trial_prime(p[1].get<std::int64_t>()));
        }
        const std::int64_t x0 = c["x"][0], x1 = c["x"][1];
        CHECK(c["points"][1][0] == x0 + t);
        CHECK(c["points"][1][1] == x1 + 2 * t);
    }
    CHECK(run_pipeline(all_prime, "P^2", cfg).dump() == report.dump());
    cfg.e = Basis({{1, 1}, {2, 2}}, 0);
    CHECK_THROWS_AS(run_pipeline(all_prime, "P^2", cfg), InvalidInput);
}
