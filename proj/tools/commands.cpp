#include "commands.hpp"

#include "clab/boxnorm.hpp"
#include "clab/conditions.hpp"
#include "clab/counting.hpp"
#include "clab/dual.hpp"
#include "clab/error.hpp"
#include "clab/gridfn.hpp"
#include "clab/lattice.hpp"
#include "clab/rng.hpp"
#include "clab/sieve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace clab::cli {

using nlohmann::ordered_json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Table& table) {
    auto cell = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

// Two-column table of the scalar members of a flat JSON object.
Table metric_table(const ordered_json& j, const std::string& prefix = "") {
    Table t{{"metric", "value"}, {}};
    std::function<void(const ordered_json&, const std::string&)> walk = [&](const ordered_json& node,
                                                                            const std::string& path) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string key = path.empty() ? it.key() : path + "." + it.key();
            const auto& v = it.value();
            if (v.is_object())
                walk(v, key);
            else if (v.is_number_float())
                t.rows.push_back({key, num(v.get<double>())});
            else if (v.is_number_integer())
                t.rows.push_back({key, std::to_string(v.get<std::int64_t>())});
            else if (v.is_boolean())
                t.rows.push_back({key, v.get<bool>() ? "true" : "false"});
            else if (v.is_string())
                t.rows.push_back({key, v.get<std::string>()});
        }
    };
    walk(j, prefix);
    return t;
}

std::uint64_t seed_of(Config& cfg) { return cfg.get_uint("seed", 1); }

SieveCache make_cache(Config& cfg) {
    const std::string dir = cfg.get_string("cache_dir", "");
    return SieveCache::from_settings(dir.empty() ? std::nullopt : std::optional<std::string>(dir));
}

std::int64_t require_modulus(Config& cfg, std::int64_t fallback) {
    const std::int64_t n = cfg.get_int("N", fallback);
    if (n < 2) throw InvalidInput("N must be >= 2");
    return n;
}

std::size_t require_dim(Config& cfg, std::int64_t fallback) {
    const std::int64_t d = cfg.get_int("d", fallback);
    if (d < 1 || d > 8) throw InvalidInput("d must lie in [1, 8]");
    return static_cast<std::size_t>(d);
}

std::string identity_text(std::size_t d) {
    std::string s;
    for (std::size_t i = 0; i < d; ++i) {
        if (i) s += ";";
        for (std::size_t j = 0; j < d; ++j) s += (j ? "," : "") + std::string(i == j ? "1" : "0");
    }
    return s;
}

std::vector<VecZd> read_vectors(Config& cfg, const std::string& fallback) {
    const std::string file = cfg.get_string("basis_file", "");
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw InvalidInput("cannot open basis file " + file);
        return parse_basis(in).vectors();
    }
    return parse_vector_list(cfg.get_string("basis", fallback));
}

ordered_json vectors_json(const std::vector<VecZd>& v) {
    ordered_json j = ordered_json::array();
    for (const auto& x : v) j.push_back(x);
    return j;
}

ordered_json rational_json(const Rational& r) {
    return ordered_json{{"num", r.numerator()}, {"den", r.denominator()}, {"value", to_double(r)}};
}

MeasureParams measure_params(Config& cfg, std::int64_t N, std::size_t d) {
    auto p = MeasureParams::defaults(N, d, cfg.get_int("b", 1), cfg.get_double("alpha", 1.0));
    if (const auto w = cfg.get_optional_int("w")) {
        if (*w < 2 || *w > 40) throw InvalidInput("measure: w must lie in [2, 40]");
        p.prime_cutoff = *w;
        p.primorial_modulus = primorial(*w);
    }
    if (const auto R = cfg.get_optional_double("R")) {
        p.sieve_level = *R;
        p.R_overridden = true;
    }
    if (const auto e = cfg.get_optional_double("eps1")) p.eps1 = *e;
    if (const auto e = cfg.get_optional_double("eps2")) p.eps2 = *e;
    p.validate();
    return p;
}

ordered_json params_json(const MeasureParams& p) {
    return ordered_json{{"N", p.modulus},
                        {"d", p.dim},
                        {"w", p.prime_cutoff},
                        {"W", p.primorial_modulus},
                        {"b", p.residue},
                        {"R", p.sieve_level},
                        {"R_overridden", p.R_overridden},
                        {"eps1", p.eps1},
                        {"eps2", p.eps2},
                        {"lower_bound_constant", p.lower_bound_constant()}};
}

bool window_prime(std::span<const std::int64_t> x, std::int64_t N) {
    for (auto c : x)
        if (!is_prime_u64(static_cast<std::uint64_t>(c == 0 ? N : c))) return false;
    return true;
}

// The test function f on Z_N^d selected by `function`.
GridFunction build_function(Config& cfg, std::int64_t N, std::size_t d, std::uint64_t seed,
                            const std::string& fallback) {
    const std::string kind = cfg.get_string("function", fallback);
    const std::uint64_t stream = substream_seed(seed, "function");
    if (kind == "random") return random_probe(GridFunction(N, d, 1.0), stream);
    if (kind == "fraction") return random_fraction_probe(GridFunction(N, d, 1.0), stream);
    if (kind == "constant") return GridFunction(N, d, cfg.get_double("value", 1.0));
    if (kind == "primes")
        return GridFunction::from_fn(N, d, [N](std::span<const std::int64_t> x) { return window_prime(x, N) ? 1.0 : 0.0; });
    if (kind == "mu") {
        auto cache = make_cache(cfg);
        return green_tao_mu(measure_params(cfg, N, d), &cache);
    }
    if (kind == "file") {
        const std::string path = cfg.get_string("function_file", "");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InvalidInput("cannot open function file '" + path + "'");
        auto f = read_binary(in);
        if (f.modulus() != N || f.dim() != d) throw InvalidInput("function file shape differs from N and d");
        return f;
    }
    throw InvalidInput("unknown function '" + kind + "' (random, fraction, constant, primes, mu, file)");
}

// Nonnegative weight: the pseudorandom measure or the constant 1.
GridFunction build_measure(Config& cfg, std::int64_t N, std::size_t d, const std::string& fallback) {
    const std::string kind = cfg.get_string("measure", fallback);
    if (kind == "ones") return GridFunction(N, d, 1.0);
    if (kind == "nu" || kind == "mu") {
        auto cache = make_cache(cfg);
        const auto p = measure_params(cfg, N, d);
        return d == 1 ? green_tao_nu(p, &cache) : green_tao_mu(p, &cache);
    }
    throw InvalidInput("unknown measure '" + kind + "' (nu, mu, ones)");
}

ordered_json estimate_json(const Estimate& e) { return to_json(e); }

// ---------------------------------------------------------------- geometry

CommandOutput cmd_geometry(Config& cfg) {
    const auto vectors = read_vectors(cfg, "1,2;2,1");
    const std::int64_t N = cfg.get_int("N", 0);
    ordered_json r;
    r["vectors"] = vectors_json(vectors);
    r["dim"] = vectors.front().size();
    r["count"] = vectors.size();
    const bool gp = is_general_position(vectors);
    r["general_position"] = gp;
    const auto geom = segment_geometry(vectors);
    r["e_flat"] = geom.e_flat;
    r["primitive"] = geom.primitive;
    r["tau"] = rational_json(geom.tau);
    std::vector<VecZd> prim;
    r["primitive_scale"] = primitive_part(vectors, prim);
    if (vectors.size() == vectors.front().size()) {
        const Basis e(vectors, N);
        r["derived"] = vectors_json(derived_basis(e).vectors());
        r["derived_general_position"] = is_general_position(derived_basis(e));
        if (N > 0) r["invertible_mod_N"] = e.invertible_mod_n();
    }
    if (gp) r["lift"] = vectors_json(lift_to_general_position(vectors).vectors());
    return {r, metric_table(r)};
}

// ---------------------------------------------------------------- boxnorm

BoxNormPlan make_plan(Config& cfg, const Basis& e, std::uint64_t seed) {
    const std::string strategy = cfg.get_string("strategy", "factored");
    if (strategy == "factored") return BoxNormPlan::factored(e);
    if (strategy == "naive") return BoxNormPlan::naive(e);
    if (strategy == "montecarlo")
        return BoxNormPlan::monte_carlo(e, cfg.get_uint("samples", 1'000'000), substream_seed(seed, "boxnorm"));
    throw InvalidInput("unknown strategy '" + strategy + "' (factored, naive, montecarlo)");
}

CommandOutput cmd_boxnorm(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t N = require_modulus(cfg, 7);
    const std::size_t d = require_dim(cfg, 2);
    const Basis e(read_vectors(cfg, identity_text(d)), N);
    const auto f = build_function(cfg, N, d, seed, "random");
    const auto plan = make_plan(cfg, e, seed);
    ordered_json r;
    r["expectation"] = expectation(f);
    if (plan.strategy == BoxStrategy::MonteCarlo) {
        const std::vector<GridFunction> family(std::size_t{1} << d, f);
        const auto est = box_inner_monte_carlo(family, e, plan.samples, plan.seed);
        r["norm_power"] = estimate_json(est);
        r["norm"] = std::pow(std::max(est.value, 0.0), 1.0 / static_cast<double>(family.size()));
    } else {
        r["norm_power"] = box_norm_power(f, plan);
        r["norm"] = box_norm(f, plan);
    }
    if (cfg.get_bool("compare", false)) {
        const double a = box_norm_power(f, BoxNormPlan::factored(e));
        const double b = box_norm_power(f, BoxNormPlan::naive(e));
        r["compare"] = {{"factored", a}, {"naive", b}, {"relative_difference", std::abs(a - b) / std::max(std::abs(b), 1e-300)}};
    }
    return {r, metric_table(r)};
}

// ---------------------------------------------------------------- dual

CommandOutput cmd_dual(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t N = require_modulus(cfg, 7);
    const std::size_t d = require_dim(cfg, 2);
    const Basis e(read_vectors(cfg, identity_text(d)), N);
    const auto f = build_function(cfg, N, d, seed, "random");
    const auto df = dual_function(f, e);
    const double norm_power = box_norm_power(f, BoxNormPlan::factored(e));
    const double pair = pairing(f, df);
    const auto values = df.values();
    ordered_json r;
    r["pairing"] = pair;
    r["norm_power"] = norm_power;
    r["identity_error"] = std::abs(pair - norm_power);
    r["dual_mean"] = expectation(df);
    r["dual_max_abs"] = values.empty() ? 0.0 : std::abs(*std::max_element(values.begin(), values.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
    }));
    if (cfg.get_bool("check_naive", false)) {
        const auto naive = dual_function_naive(f, e);
        double diff = 0;
        for (std::size_t i = 0; i < df.size(); ++i) diff = std::max(diff, std::abs(df[i] - naive[i]));
        r["naive_max_difference"] = diff;
    }
    Table t;
    std::ostringstream grid;
    clab::write_csv(grid, df);
    std::istringstream lines(grid.str());
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return {r, t};
}

// ---------------------------------------------------------------- qap

CommandOutput cmd_qap(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t N = require_modulus(cfg, 1009);
    const std::size_t d = require_dim(cfg, 1);
    const Basis e(read_vectors(cfg, identity_text(d)), N);
    const auto mu = build_measure(cfg, N, d, "mu");
    QapOptions options;
    options.epsilons = cfg.get_double_list("epsilons", options.epsilons);
    const auto orders = cfg.get_int_list("product_orders", {1, 2, 3});
    options.product_orders.assign(orders.begin(), orders.end());
    const auto budgets = cfg.get_double_list("budgets", {});
    for (double b : budgets) options.budgets.emplace_back(b);
    const std::size_t probes = cfg.get_uint("probes", 24);
    const auto report = qap_probe(mu, e, probes, substream_seed(seed, "qap"), options);
    Table t{{"epsilon", "probes", "min_pairing"}, {}};
    for (const auto& p : report.lower_curve)
        t.rows.push_back({num(p.epsilon), num(static_cast<std::uint64_t>(p.probes)), num(p.min_pairing)});
    return {to_json(report), t};
}

// ---------------------------------------------------------------- measure

struct MeasureScan {
    double mean_nu = 0, min_nu = 0, max_nu = 0;
    std::uint64_t negative = 0, off_window_not_one = 0, window_points = 0, bound_violations = 0;
    double min_margin = 0;
};

MeasureScan scan_measure(const GridFunction& nu, const MeasureParams& p) {
    MeasureScan s;
    s.mean_nu = expectation(nu);
    s.min_nu = nu[0];
    s.max_nu = nu[0];
    s.min_margin = INFINITY;
    const double c = p.lower_bound_constant();
    for (std::size_t x = 0; x < nu.size(); ++x) {
        const double v = nu[x];
        const std::int64_t n = window_value(x, p.modulus);
        s.min_nu = std::min(s.min_nu, v);
        s.max_nu = std::max(s.max_nu, v);
        s.negative += v < 0.0;
        if (!p.in_window(n)) {
            s.off_window_not_one += v != 1.0;
            continue;
        }
        ++s.window_points;
        const double margin = v - c * lambda_bar(n, p.primorial_modulus, p.residue);
        s.bound_violations += margin < 0.0;
        s.min_margin = std::min(s.min_margin, margin);
    }
    return s;
}

CommandOutput cmd_measure(Config& cfg) {
    const std::int64_t N = require_modulus(cfg, 1009);
    const std::size_t d = require_dim(cfg, 1);
    const auto p = measure_params(cfg, N, d);
    auto cache = make_cache(cfg);
    const auto nu = green_tao_nu(p, &cache);
    const auto s = scan_measure(nu, p);
    ordered_json r;
    r["parameters"] = params_json(p);
    r["mean_nu"] = s.mean_nu;
    r["deviation"] = std::abs(s.mean_nu - 1.0);
    r["mean_mu"] = std::pow(s.mean_nu, static_cast<double>(d));
    r["min_nu"] = s.min_nu;
    r["max_nu"] = s.max_nu;
    r["negative_points"] = s.negative;
    r["off_window_not_one"] = s.off_window_not_one;
    r["lower_bound"] = {{"constant", p.lower_bound_constant()},
                        {"window_points", s.window_points},
                        {"violations", s.bound_violations},
                        {"min_margin", s.min_margin},
                        {"holds", s.bound_violations == 0}};
    r["lambda_bar_mean"] = lambda_bar_mean(N, p.primorial_modulus, p.residue);
    r["cache_disk_hits"] = cache.disk_hits();
    if (!cfg.get_bool("values", false)) return {r, metric_table(r)};
    Table t{{"n", "nu", "lambda_bar"}, {}};
    for (std::size_t x = 1; x <= nu.size(); ++x) {
        const std::size_t idx = x % nu.size();
        const auto n = static_cast<std::int64_t>(x);
        t.rows.push_back({num(n), num(nu[idx]), num(lambda_bar(n, p.primorial_modulus, p.residue))});
    }
    return {r, t};
}

// ---------------------------------------------------------------- linforms

LinearFormFamily read_forms(Config& cfg, const std::string& fallback) {
    return parse_linear_forms(cfg.get_string("forms", fallback), cfg.get_string("shifts", ""));
}

CommandOutput cmd_linforms(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t N = require_modulus(cfg, 1009);
    const auto family = read_forms(cfg, "1,0;1,1;1,2");
    const auto nu = build_measure(cfg, N, 1, "nu");
    const auto est = verify_linear_forms(nu, family, cfg.get_uint("samples", 1'000'000), substream_seed(seed, "linforms"));
    ordered_json r;
    r["forms"] = vectors_json(family.coeffs);
    r["shifts"] = family.shifts;
    r["estimate"] = estimate_json(est);
    r["deviation"] = std::abs(est.value - 1.0);
    r["band_3sigma"] = 3.0 * est.std_error;
    return {r, metric_table(r)};
}

// ---------------------------------------------------------------- correlation

std::vector<std::vector<std::int64_t>> parse_rows(const std::string& text) { return parse_vector_list(text); }

CommandOutput cmd_correlation(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t N = require_modulus(cfg, 1009);
    CorrelationSpec spec;
    spec.forms = parse_linear_forms(cfg.get_string("forms", "1"));
    spec.shifts = parse_rows(cfg.get_string("shifts", "0,1"));
    spec.m1 = spec.forms.forms();
    spec.m0 = spec.shifts.empty() ? 0 : spec.shifts.front().size();
    spec.tau.c1 = cfg.get_double("c1", spec.tau.c1);
    spec.tau.c2 = cfg.get_double("c2", spec.tau.c2);
    spec.tau.prime_cutoff = cfg.get_int("tau_w", spec.tau.prime_cutoff);
    const auto nu = build_measure(cfg, N, 1, "nu");
    const auto report = verify_correlation(nu, spec, cfg.get_uint("samples", 1'000'000), substream_seed(seed, "correlation"));
    ordered_json r;
    r["m0"] = spec.m0;
    r["m1"] = spec.m1;
    r["report"] = to_json(report);
    std::vector<ordered_json> moments;
    for (int k : {1, 2, 4}) moments.push_back({{"k", k}, {"moment", tau_moment(N, k, spec.tau)}});
    r["tau_moments"] = moments;
    return {r, metric_table(r)};
}

// ---------------------------------------------------------------- localfactors

ThetaSystem random_theta(Rng& rng, std::size_t m0, std::size_t m1, std::size_t r, std::int64_t W, std::int64_t bound) {
    ThetaSystem s;
    s.m0 = m0;
    s.m1 = m1;
    s.primorial_modulus = W;
    s.residue = 1;
    for (std::size_t i = 0; i < m1; ++i) {
        std::vector<std::int64_t> f(r);
        do {
            for (auto& c : f) c = rng.in_range(-bound, bound);
        } while (std::all_of(f.begin(), f.end(), [](auto c) { return c == 0; }));
        s.forms.push_back(f);
        std::vector<std::int64_t> h(m0);
        for (auto& c : h) c = rng.in_range(-20, 20);
        s.shifts.push_back(h);
    }
    return s;
}

CommandOutput cmd_localfactors(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t w = cfg.get_int("w", 2);
    if (w < 2 || w > 40) throw InvalidInput("localfactors: w must lie in [2, 40]");
    const std::int64_t W = primorial(w);
    const auto primes = cfg.get_int_list("primes", {2, 3, 5, 7, 11, 13});
    const std::uint64_t random = cfg.get_uint("random", 0);
    std::vector<ThetaSystem> systems;
    if (random > 0) {
        Rng rng(substream_seed(seed, "localfactors"));
        const auto m0 = static_cast<std::size_t>(cfg.get_int("m0", 2));
        const auto m1 = static_cast<std::size_t>(cfg.get_int("m1", 2));
        const auto r = static_cast<std::size_t>(cfg.get_int("r", 2));
        const std::int64_t bound = cfg.get_int("coefficient_bound", 3);
        if (m0 < 1 || m1 < 1 || r < 1 || bound < 1) throw InvalidInput("localfactors: m0, m1, r, coefficient_bound must be >= 1");
        for (std::uint64_t i = 0; i < random; ++i) systems.push_back(random_theta(rng, m0, m1, r, W, bound));
    } else {
        ThetaSystem s;
        s.forms = parse_rows(cfg.get_string("forms", "1,0;1,1"));
        s.shifts = parse_rows(cfg.get_string("shifts", "0,1;0,5"));
        s.m1 = s.forms.size();
        s.m0 = s.shifts.empty() ? 0 : s.shifts.front().size();
        s.primorial_modulus = W;
        s.residue = cfg.get_int("b", 1);
        systems.push_back(s);
    }
    LocalFactorReport total;
    for (const auto& s : systems) {
        const auto rep = verify_local_factor_cases(s, primes);
        total.checked += rep.checked;
        total.degenerate += rep.degenerate;
        total.vanishing_checked += rep.vanishing_checked;
        for (int c = 0; c < 4; ++c) total.case_counts[c] += rep.case_counts[c];
        total.violations.insert(total.violations.end(), rep.violations.begin(), rep.violations.end());
    }
    const auto& first = systems.front();
    const double edge = 1.0 / (12.0 * static_cast<double>(first.count()));
    const std::vector<std::pair<std::vector<double>, std::vector<double>>> points{
        {std::vector<double>(first.count(), 0.0), std::vector<double>(first.count(), 0.0)},
        {std::vector<double>(first.count(), edge), std::vector<double>(first.count(), edge / 2)}};
    std::vector<std::int64_t> euler_primes;
    for (std::int64_t p : primes)
        if (p > w) euler_primes.push_back(p);
    const auto euler = euler_factor_identity_check(first, w, points, euler_primes);
    ordered_json r;
    r["systems"] = systems.size();
    r["W"] = W;
    r["cases"] = to_json(total);
    r["euler"] = to_json(euler);
    Table t{{"case", "count"}, {}};
    for (int c = 0; c < 4; ++c) t.rows.push_back({std::to_string(c + 1), num(static_cast<std::uint64_t>(total.case_counts[c]))});
    t.rows.push_back({"degenerate", num(static_cast<std::uint64_t>(total.degenerate))});
    t.rows.push_back({"violations", num(static_cast<std::uint64_t>(total.violations.size()))});
    return {r, t};
}

// ---------------------------------------------------------------- vonneumann

CommandOutput cmd_vonneumann(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t N = require_modulus(cfg, 31);
    const auto vectors = read_vectors(cfg, "1,2;2,1");
    const std::size_t d = vectors.front().size();
    const Basis e(vectors, N);
    const auto mu = build_measure(cfg, N, d, "ones");
    const auto report = von_neumann_probe(mu, e, cfg.get_uint("probes", 8), substream_seed(seed, "vonneumann"));
    ordered_json r;
    r["derived"] = vectors_json(report.derived.vectors());
    r["max_ratio"] = report.max_ratio;
    ordered_json samples = ordered_json::array();
    Table t{{"probe", "signed", "box_norm", "count"}, {}};
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
        const auto& s = report.samples[i];
        samples.push_back({{"signed", s.signed_probe}, {"box_norm", s.box_norm}, {"count", s.count}});
        t.rows.push_back({num(static_cast<std::uint64_t>(i)), s.signed_probe ? "true" : "false", num(s.box_norm), num(s.count)});
    }
    r["samples"] = samples;
    return {r, t};
}

// ---------------------------------------------------------------- count

Table constellation_table(const ordered_json& list, std::size_t dim) {
    Table t;
    for (std::size_t i = 0; i < dim; ++i) t.header.push_back("x" + std::to_string(i + 1));
    t.header.push_back("t");
    t.header.push_back("genuine");
    for (const auto& c : list) {
        std::vector<std::string> row;
        for (const auto& v : c["x"]) row.push_back(std::to_string(v.get<std::int64_t>()));
        row.push_back(std::to_string(c["t"].get<std::int64_t>()));
        row.push_back(c.value("genuine", true) ? "true" : "false");
        t.rows.push_back(row);
    }
    return t;
}

CommandOutput cmd_count(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::int64_t N = require_modulus(cfg, 31);
    const auto vectors = read_vectors(cfg, "1,2;2,1");
    const std::size_t d = vectors.front().size();
    const auto f = build_function(cfg, N, d, seed, "primes");
    CountStrategy strategy;
    strategy.exact = cfg.get_bool("exact", true);
    if (!strategy.exact) {
        strategy.samples = cfg.get_uint("samples", 1'000'000);
        strategy.seed = substream_seed(seed, "count");
    }
    const auto est = count_average(f, vectors, strategy);
    ordered_json r;
    r["estimate"] = estimate_json(est);
    r["total"] = est.value * std::pow(static_cast<double>(N), static_cast<double>(d + 1));
    const std::int64_t side = cfg.get_int("search_side", 0);
    ordered_json found = ordered_json::array();
    if (side > 0) {
        const auto A = PointSet::from_predicate(side, d, all_prime);
        const std::int64_t t_max = cfg.get_int("t_max", default_t_max(side, vectors));
        for (const auto& c : find_constellations(A, vectors, t_max)) found.push_back(to_json(c));
        r["search"] = {{"side", side}, {"t_max", t_max}, {"points", A.size()}, {"constellations", found.size()}};
        r["constellations"] = found;
    }
    return {r, constellation_table(found, d)};
}

// ---------------------------------------------------------------- pipeline

CommandOutput cmd_pipeline(Config& cfg) {
    PipelineConfig pc;
    pc.seed = seed_of(cfg);
    pc.alpha = cfg.get_double("alpha", pc.alpha);
    pc.e = Basis(read_vectors(cfg, "1,2;2,1"), 0);
    pc.n_prime = cfg.get_int("n_prime", pc.n_prime);
    pc.sieve_level = cfg.get_optional_double("R");
    pc.prime_cutoff = cfg.get_optional_int("w");
    pc.eps2 = cfg.get_double("eps2", pc.eps2);
    pc.samples = cfg.get_uint("samples", pc.samples);
    pc.max_reported = cfg.get_uint("max_reported", pc.max_reported);
    const std::string set = cfg.get_string("set", "primes");
    SetOracle A;
    if (set == "primes")
        A = all_prime;
    else if (set == "empty")
        A = [](std::span<const std::int64_t>) { return false; };
    else
        throw InvalidInput("unknown set '" + set + "' (primes, empty)");
    auto r = run_pipeline(A, set, pc);
    return {r, constellation_table(r["constellations"], pc.e.dim())};
}

// ---------------------------------------------------------------- ladder

struct LadderRow {
    std::int64_t N;
    double statistic;
    double band;
};

CommandOutput cmd_ladder(Config& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const std::string target = cfg.get_string("target", "measure");
    if (target != "measure" && target != "linforms")
        throw InvalidInput("ladder: target must be measure or linforms");
    auto Ns = cfg.get_int_list("Ns", {1009, 10007, 100003});
    const bool round = cfg.get_bool("round_to_prime", false);
    const std::string expect = cfg.get_string("expect", "decreasing");
    if (expect != "decreasing" && expect != "increasing" && expect != "none")
        throw InvalidInput("ladder: expect must be decreasing, increasing or none");
    if (Ns.empty()) throw InvalidInput("ladder: Ns is empty");
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (Ns[i] <= Ns[i - 1]) throw InvalidInput("ladder: Ns must be strictly ascending");
    for (auto& n : Ns) {
        if (n < 3) throw InvalidInput("ladder: every N must be >= 3");
        if (is_prime_u64(static_cast<std::uint64_t>(n))) continue;
        if (!round) throw InvalidInput("ladder: N = " + std::to_string(n) + " is not prime");
        while (!is_prime_u64(static_cast<std::uint64_t>(n))) ++n;
    }
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (Ns[i] <= Ns[i - 1]) throw InvalidInput("ladder: Ns collapse onto the same prime");

    // the family and sample count are read once so they appear in the resolved config
    std::optional<LinearFormFamily> family;
    std::uint64_t samples = 0;
    if (target == "linforms") {
        family = read_forms(cfg, "1,0;1,1;1,2");
        samples = cfg.get_uint("samples", 1'000'000);
    }
    std::vector<LadderRow> rows;
    auto cache = make_cache(cfg);
    for (std::int64_t N : Ns) {
        const auto p = measure_params(cfg, N, 1);
        const auto nu = green_tao_nu(p, &cache);
        if (target == "measure") {
            rows.push_back({N, std::abs(expectation(nu) - 1.0), 0.0});
        } else {
            const auto est = verify_linear_forms(nu, *family, samples, substream_seed(seed, "ladder/" + std::to_string(N)));
            rows.push_back({N, std::abs(est.value - 1.0), 3.0 * est.std_error});
        }
    }
    ordered_json r;
    r["target"] = target;
    r["expect"] = expect;
    ordered_json table = ordered_json::array();
    Table t{{"N", "statistic", "band", "flag"}, {}};
    std::size_t flags = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        bool flag = false;
        if (i > 0 && expect == "decreasing") flag = !(rows[i].statistic < rows[i - 1].statistic);
        if (i > 0 && expect == "increasing") flag = !(rows[i].statistic > rows[i - 1].statistic);
        flags += flag;
        table.push_back({{"N", rows[i].N}, {"statistic", rows[i].statistic}, {"band", rows[i].band}, {"flag", flag}});
        t.rows.push_back({num(rows[i].N), num(rows[i].statistic), num(rows[i].band), flag ? "non_monotone" : ""});
    }
    r["rows"] = table;
    r["flags"] = flags;
    if (rows.size() > 1) {
        const auto& a = rows.front();
        const auto& b = rows.back();
        r["endpoint_bands_separated"] = std::abs(a.statistic - b.statistic) > a.band + b.band;
    }
    return {r, t};
}

using Handler = CommandOutput (*)(Config&);

struct Entry {
    Handler run;
    const char* summary;
};

const std::map<std::string, Entry>& registry() {
    static const std::map<std::string, Entry> table{
        {"geometry", {cmd_geometry, "general position, segment distance, primitivity, lift, derived basis"}},
        {"boxnorm", {cmd_boxnorm, "box norm of a test function"}},
        {"dual", {cmd_dual, "dual function and pairing identity"}},
        {"qap", {cmd_qap, "empirical dual-function bounds against a measure"}},
        {"measure", {cmd_measure, "build and inspect the pseudorandom measure"}},
        {"linforms", {cmd_linforms, "linear-forms average of the measure"}},
        {"correlation", {cmd_correlation, "correlation average against the tau model"}},
        {"localfactors", {cmd_localfactors, "local factor cases and Euler-factor identity"}},
        {"vonneumann", {cmd_vonneumann, "count versus box norm in derived directions"}},
        {"count", {cmd_count, "constellation count average and exhaustive search"}},
        {"pipeline", {cmd_pipeline, "end-to-end constellation search"}},
        {"ladder", {cmd_ladder, "trend table across a list of moduli"}},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"geometry", "boxnorm",      "dual",       "qap",   "measure",  "linforms",
                                                "correlation", "localfactors", "vonneumann", "count", "pipeline", "ladder"};
    return names;
}

std::string command_summary(const std::string& name) { return registry().at(name).summary; }

CommandOutput run_command(const std::string& name, Config& cfg) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw InvalidInput("unknown command '" + name + "'");
    return it->second.run(cfg);
}

}  // namespace clab::cli
