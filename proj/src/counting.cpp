#include "clab/counting.hpp"
#include "clab/boxnorm.hpp"
#include "clab/error.hpp"
#include "clab/parallel.hpp"
#include "clab/rng.hpp"
#include "clab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace clab {

namespace {

constexpr std::uint64_t kSampleBlock = 1 << 16;
constexpr std::size_t kMaxSupport = 50'000'000;

void check_directions(const std::vector<VecZd>& e, std::size_t d) {
    if (e.size() != d) throw InvalidInput("constellation count needs d vectors in Z^d");
    for (const auto& v : e)
        if (v.size() != d) throw InvalidInput("constellation vectors must have d coordinates");
}

double corner_product(const GridFunction& f, std::span<const std::int64_t> x, std::int64_t t,
                      const std::vector<VecZd>& e, std::vector<std::int64_t>& y) {
    const std::int64_t n = f.modulus();
    double prod = f.at(x);
    for (const auto& v : e) {
        if (prod == 0.0) return 0.0;
        for (std::size_t c = 0; c < x.size(); ++c)
            y[c] = static_cast<std::int64_t>((static_cast<__int128>(t) * v[c] + x[c]) % n);
        prod *= f.at(y);
    }
    return prod;
}

std::int64_t sup_norm(const VecZd& v) {
    std::int64_t m = 0;
    for (auto c : v) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace

Estimate count_average(const GridFunction& f, const std::vector<VecZd>& e, const CountStrategy& strategy) {
    const std::size_t d = f.dim();
    check_directions(e, d);
    const std::int64_t n = f.modulus();
    if (strategy.exact) {
        const auto rows = static_cast<std::size_t>(n);
        std::vector<double> partial(rows);
        for_each_block(rows, [&](std::size_t t) {
            std::vector<std::int64_t> x(d), y(d);
            CompensatedSum sum;
            for (std::size_t i = 0; i < f.size(); ++i) {
                f.coords_of(i, x);
                sum.add(corner_product(f, x, static_cast<std::int64_t>(t), e, y));
            }
            partial[t] = sum.value();
        });
        CompensatedSum total;
        for (double p : partial) total.add(p);
        const double count = static_cast<double>(f.size()) * static_cast<double>(n);
        return {total.value() / count, 0.0, f.size() * static_cast<std::uint64_t>(n), true};
    }
    if (strategy.samples < 1) throw InvalidInput("monte-carlo count needs samples >= 1");
    const std::uint64_t blocks = (strategy.samples + kSampleBlock - 1) / kSampleBlock;
    std::vector<MeanAccumulator> partial(blocks);
    for_each_block(blocks, [&](std::size_t b) {
        Rng rng(block_seed(strategy.seed, b));
        const std::uint64_t count = std::min<std::uint64_t>(kSampleBlock, strategy.samples - b * kSampleBlock);
        std::vector<std::int64_t> x(d), y(d);
        MeanAccumulator acc;
        for (std::uint64_t s = 0; s < count; ++s) {
            for (auto& c : x) c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
            const auto t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
            acc.add(corner_product(f, x, t, e, y));
        }
        partial[b] = acc;
    });
    MeanAccumulator total;
    for (const auto& p : partial) total.merge(p);
    return {total.mean(), total.stderr_of_mean(), total.count(), false};
}

VonNeumannReport von_neumann_report(const Basis& e, std::span<const GridFunction> probes,
                                    const std::vector<bool>& signed_flags) {
    if (probes.empty()) throw InvalidInput("von Neumann probe: need at least one probe");
    if (signed_flags.size() != probes.size()) throw InvalidInput("von Neumann probe: one flag per probe");
    const std::int64_t n = probes.front().modulus();
    if (!is_general_position(e)) throw InvalidInput("von Neumann probe: e must be in general position");
    const Basis derived = derived_basis(e).with_modulus(n);
    const auto plan = BoxNormPlan::factored(derived);
    VonNeumannReport report{derived, {}, 0.0};
    report.samples.resize(probes.size());
    for_each_block(probes.size(), [&](std::size_t i) {
        report.samples[i] = {box_norm(probes[i], plan), count_average(probes[i], e.vectors()).value, signed_flags[i]};
    });
    for (const auto& s : report.samples)
        if (s.box_norm >= 1e-8) report.max_ratio = std::max(report.max_ratio, std::abs(s.count) / s.box_norm);
    return report;
}

VonNeumannReport von_neumann_probe(const GridFunction& mu, const Basis& e, std::size_t probes, std::uint64_t seed) {
    if (!mu.nonnegative()) throw InvalidInput("von Neumann probe: mu has negative entries");
    if (probes < 1) throw InvalidInput("von Neumann probe: probes must be >= 1");
    std::vector<GridFunction> fs;
    std::vector<bool> flags;
    for (std::size_t i = 0; i < probes; ++i) {
        const bool is_signed = i % 2 == 1;
        const std::uint64_t s = block_seed(seed, i);
        fs.push_back(is_signed ? random_probe(mu, s) : random_fraction_probe(mu, s));
        flags.push_back(is_signed);
    }
    return von_neumann_report(e, fs, flags);
}

std::optional<UnwrapResult> unwrap(const VecZd& x, std::int64_t t, const std::vector<VecZd>& e,
                                   const BoxInterval& box, std::int64_t N, double eps) {
    const std::size_t d = x.size();
    if (N < 2) throw InvalidInput("unwrap: N must be >= 2");
    if (t < 1 || t >= N) throw InvalidInput("unwrap: t must lie in [1, N)");
    if (e.empty()) throw InvalidInput("unwrap: empty direction set");
    for (const auto& v : e)
        if (v.size() != d) throw InvalidInput("unwrap: direction dimension mismatch");
    std::vector<VecZd> prim;
    const std::int64_t scale = primitive_part(e, prim);
    if (scale == 0) throw InvalidInput("unwrap: e is zero");
    const double tau = to_double(segment_geometry(prim).tau);
    if (!(eps < tau)) throw PreconditionViolation("unwrap: eps must be below tau(e)");
    if (static_cast<double>(box.hi - box.lo) > eps * static_cast<double>(N))
        throw PreconditionViolation("unwrap: box side exceeds eps N");

    auto inside = [&](std::int64_t c) { return box.lo <= c && c <= box.hi; };
    for (auto c : x)
        if (!inside(c)) return std::nullopt;
    // x + t e = x + (t s) e', so work with the primitive part
    const std::int64_t u = static_cast<std::int64_t>(static_cast<__int128>(t) * scale % N);
    if (u == 0) return std::nullopt;
    for (const auto& v : prim)
        for (std::size_t c = 0; c < d; ++c) {
            std::int64_t r = mod_floor(x[c] + static_cast<std::int64_t>(static_cast<__int128>(u) * v[c] % N), N);
            if (r == 0) r = N;  // representatives live in [1, N]
            if (!inside(r)) return std::nullopt;
        }
    for (std::int64_t candidate : {u, u - N}) {
        bool ok = true;
        for (const auto& v : prim)
            for (std::size_t c = 0; c < d && ok; ++c) ok = inside(x[c] + candidate * v[c]);
        if (ok) return UnwrapResult{candidate, scale};
    }
    return std::nullopt;
}

PointSet::PointSet(std::int64_t side, std::size_t dim) : side_(side), dim_(dim), bits_(grid_size(side, dim), false) {}

PointSet PointSet::from_predicate(std::int64_t side, std::size_t dim,
                                  const std::function<bool(std::span<const std::int64_t>)>& member) {
    PointSet set(side, dim);
    std::vector<std::int64_t> x(dim, 1);
    for (std::size_t i = 0; i < set.bits_.size(); ++i) {
        if (member(x)) {
            set.bits_[i] = true;
            ++set.count_;
        }
        for (std::size_t j = 0; j < dim; ++j) {
            if (++x[j] <= side) break;
            x[j] = 1;
        }
    }
    return set;
}

std::size_t PointSet::index(std::span<const std::int64_t> x) const {
    std::size_t idx = 0;
    for (std::size_t j = dim_; j-- > 0;) idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(x[j] - 1);
    return idx;
}

bool PointSet::contains(std::span<const std::int64_t> x) const {
    if (x.size() != dim_) return false;
    for (auto c : x)
        if (c < 1 || c > side_) return false;
    return bits_[index(x)];
}

void PointSet::insert(std::span<const std::int64_t> x) {
    if (x.size() != dim_) throw InvalidInput("point set: dimension mismatch");
    for (auto c : x)
        if (c < 1 || c > side_) throw InvalidInput("point set: point outside [1, side]^d");
    auto ref = bits_[index(x)];
    if (!ref) {
        ref = true;
        ++count_;
    }
}

std::int64_t default_t_max(std::int64_t side, const std::vector<VecZd>& e) {
    std::int64_t smallest = 0;
    for (const auto& v : e) {
        const std::int64_t m = sup_norm(v);
        if (m > 0 && (smallest == 0 || m < smallest)) smallest = m;
    }
    if (smallest == 0) throw InvalidInput("constellation search: all directions are zero");
    return (side + smallest - 1) / smallest;
}

std::vector<Constellation> find_constellations(const PointSet& A, const std::vector<VecZd>& e, std::int64_t t_max) {
    const std::size_t d = A.dim();
    check_directions(e, d);
    if (t_max < 1) throw InvalidInput("constellation search: t_max must be >= 1");
    const auto rows = static_cast<std::size_t>(A.side());
    std::vector<std::vector<Constellation>> per_row(rows);
    // rows split the slowest coordinate; concatenation keeps index order
    for_each_block(rows, [&](std::size_t row) {
        std::vector<std::int64_t> x(d, 1), y(d);
        x[d - 1] = static_cast<std::int64_t>(row) + 1;
        const std::size_t inner = d == 1 ? 1 : grid_size(A.side(), d - 1);
        for (std::size_t k = 0; k < inner; ++k) {
            if (A.contains(x)) {
                for (std::int64_t t = -t_max; t <= t_max; ++t) {
                    if (t == 0) continue;
                    bool all = true;
                    for (const auto& v : e) {
                        for (std::size_t c = 0; c < d; ++c) y[c] = x[c] + t * v[c];
                        if (!A.contains(y)) {
                            all = false;
                            break;
                        }
                    }
                    if (all) per_row[row].push_back({x, t, true});
                }
            }
            for (std::size_t j = 0; j + 1 < d; ++j) {
                if (++x[j] <= A.side()) break;
                x[j] = 1;
            }
        }
    });
    std::vector<Constellation> out;
    for (auto& r : per_row) out.insert(out.end(), r.begin(), r.end());
    return out;
}

void write_constellations_csv(std::ostream& out, const std::vector<Constellation>& list, std::size_t dim) {
    for (std::size_t c = 0; c < dim; ++c) out << 'x' << c + 1 << ',';
    out << "t,genuine\n";
    for (const auto& k : list) {
        for (auto v : k.base) out << v << ',';
        out << k.step << ',' << (k.genuine ? 1 : 0) << '\n';
    }
}

nlohmann::ordered_json to_json(const Constellation& c) {
    nlohmann::ordered_json j;
    j["x"] = c.base;
    j["t"] = c.step;
    j["genuine"] = c.genuine;
    return j;
}

bool all_prime(std::span<const std::int64_t> x) {
    for (auto c : x)
        if (c < 2 || !is_prime_u64(static_cast<std::uint64_t>(c))) return false;
    return true;
}

nlohmann::ordered_json run_pipeline(const SetOracle& A, const std::string& set_name, const PipelineConfig& config) {
    const Basis& e = config.e;
    const std::size_t d = e.dim();
    if (e.count() != d) throw InvalidInput("pipeline: e must have d vectors in Z^d");
    if (rank_over_q(e.vectors()) != d) throw InvalidInput("pipeline: e must be a basis of Q^d");
    if (!is_general_position(e)) throw InvalidInput("pipeline: e must be in general position");
    if (!(config.alpha > 0.0 && config.alpha <= 1.0)) throw InvalidInput("pipeline: alpha must lie in (0, 1]");
    if (config.n_prime < 100) throw InvalidInput("pipeline: N' must be >= 100");
    if (!(config.eps2 > 0.0 && config.eps2 < 1.0)) throw InvalidInput("pipeline: eps2 must lie in (0, 1)");
    if (config.samples < 1) throw InvalidInput("pipeline: samples must be >= 1");

    const double dd = static_cast<double>(d);
    const double shrink = 1.0 - config.alpha / (100.0 * dd);
    const auto n_prime = config.n_prime;

    // prime N with (1 - alpha/100d) N' <= eps2 N <= N'
    MeasureParams params;
    params.dim = d;
    params.eps2 = config.eps2;
    auto N = static_cast<std::int64_t>(std::ceil(shrink * static_cast<double>(n_prime) / params.eps2));
    while (!is_prime_u64(static_cast<std::uint64_t>(N))) ++N;
    bool eps2_adjusted = false;
    if (params.eps2 * static_cast<double>(N) > static_cast<double>(n_prime)) {
        params.eps2 = static_cast<double>(n_prime) / static_cast<double>(N);
        eps2_adjusted = true;
    }
    params.modulus = N;
    params.eps1 = params.eps2 * config.alpha / (100.0 * dd);
    const auto defaults = MeasureParams::defaults(N, d, 1, config.alpha);
    params.prime_cutoff = config.prime_cutoff.value_or(defaults.prime_cutoff);
    params.primorial_modulus = primorial(params.prime_cutoff);
    params.sieve_level = config.sieve_level.value_or(defaults.sieve_level);
    params.R_overridden = config.sieve_level.has_value();

    // b from the weighted density of the pulled-back set x -> 1_A(W x + b) on [1, N']^d
    const std::int64_t W = params.primorial_modulus;
    const ResidueIndicator pulled = [&](std::span<const std::int64_t> x, std::int64_t b) {
        std::vector<std::int64_t> X(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) X[i] = W * x[i] + b;
        return A(X);
    };
    params.residue = choose_b(pulled, n_prime, W, d);
    const double density = weighted_density(pulled, n_prime, W, params.residue, d);
    params.validate();
    const std::int64_t b = params.residue;

    const double c_d = std::pow(dd, -dd) * std::ldexp(1.0, -static_cast<int>(d * d + 6 * d));
    const auto lo = static_cast<std::int64_t>(std::ceil(params.eps1 * static_cast<double>(N)));
    const auto hi = static_cast<std::int64_t>(std::floor(params.eps2 * static_cast<double>(N)));
    const GridFunction nu = green_tao_nu(params);

    // per-axis lambda_bar on [1, N) and on the window
    std::vector<double> lam_all(static_cast<std::size_t>(N), 0.0), lam(static_cast<std::size_t>(N), 0.0);
    std::vector<std::int64_t> axis;
    for (std::int64_t n = 1; n < N; ++n) {
        lam_all[n] = lambda_bar(n, W, b);
        if (n >= lo && n <= hi && lam_all[n] > 0.0) {
            lam[n] = lam_all[n];
            axis.push_back(n);
        }
    }
    for (double v : nu.values())
        if (v < 0.0) throw InternalInconsistency("pipeline: measure has a negative value");

    // window loss: lambda_bar^d mass of [1, N']^d outside the window cube
    CompensatedSum full_mass, window_mass;
    for (std::int64_t n = 1; n <= n_prime; ++n) {
        full_mass.add(lam_all[n]);
        if (n >= lo && n <= hi) window_mass.add(lam_all[n]);
    }
    const double window_loss = (std::pow(full_mass.value(), dd) - std::pow(window_mass.value(), dd)) /
                               std::pow(static_cast<double>(n_prime), dd);

    // support of g with the full-scan check g <= mu
    if (!axis.empty() && std::pow(static_cast<double>(axis.size()), dd) > static_cast<double>(kMaxSupport))
        throw InvalidInput("pipeline: support of g is too large for this scale");
    std::vector<std::uint32_t> support;  // flattened axis positions, d per point
    std::vector<double> cumulative;
    CompensatedSum mass, trivial;
    std::uint64_t candidates = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<std::int64_t> X(d), x(d);
    if (!axis.empty()) {
        std::vector<std::size_t> pos(d, 0);
        for (;;) {
            double g = c_d, mu = 1.0;
            for (std::size_t i = 0; i < d; ++i) {
                x[i] = axis[pos[i]];
                g *= lam[x[i]];
                mu *= nu[static_cast<std::size_t>(x[i])];
            }
            ++candidates;
            if (g > mu) throw InternalInconsistency("pipeline: g exceeds mu at a window point");
            min_margin = std::min(min_margin, mu / g);
            for (std::size_t i = 0; i < d; ++i) X[i] = W * x[i] + b;
            if (A(X)) {
                for (std::size_t i = 0; i < d; ++i) support.push_back(static_cast<std::uint32_t>(pos[i]));
                mass.add(g);
                cumulative.push_back(mass.value());
                trivial.add(std::pow(g, dd + 1.0));
            }
            std::size_t i = 0;
            while (i < d && ++pos[i] == axis.size()) pos[i++] = 0;
            if (i == d) break;
        }
    }
    const std::size_t support_points = cumulative.size();
    const double Nd = std::pow(static_cast<double>(N), dd);
    const double S = mass.value();
    const double expectation_g = S / Nd;
    const double trivial_term = trivial.value() / (Nd * static_cast<double>(N));

    // g(y) for an arbitrary grid point; coordinates reduced to [0, N)
    auto g_at = [&](std::span<const std::int64_t> y, std::vector<std::int64_t>& scratch) {
        double g = c_d;
        for (std::size_t i = 0; i < d; ++i) {
            g *= lam[static_cast<std::size_t>(y[i])];
            if (g == 0.0) return 0.0;
        }
        for (std::size_t i = 0; i < d; ++i) scratch[i] = W * y[i] + b;
        return A(scratch) ? g : 0.0;
    };

    // importance sampling: x ~ g / S, t uniform on [1, N)
    MeanAccumulator sampled;
    std::vector<std::pair<VecZd, std::int64_t>> hits;
    std::uint64_t modular_hits = 0;
    if (support_points > 0) {
        const std::uint64_t stream = substream_seed(config.seed, "pipeline");
        const std::uint64_t blocks = (config.samples + kSampleBlock - 1) / kSampleBlock;
        std::vector<MeanAccumulator> partial(blocks);
        std::vector<std::vector<std::pair<VecZd, std::int64_t>>> block_hits(blocks);
        for_each_block(blocks, [&](std::size_t blk) {
            Rng rng(block_seed(stream, blk));
            const std::uint64_t count = std::min<std::uint64_t>(kSampleBlock, config.samples - blk * kSampleBlock);
            std::vector<std::int64_t> px(d), y(d), scratch(d);
            MeanAccumulator acc;
            for (std::uint64_t s = 0; s < count; ++s) {
                const double target = rng.uniform01() * S;
                auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
                if (it == cumulative.end()) --it;
                const auto k = static_cast<std::size_t>(it - cumulative.begin());
                for (std::size_t i = 0; i < d; ++i) px[i] = axis[support[k * d + i]];
                const auto t = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(N - 1)));
                double prod = 1.0;
                for (const auto& v : e.vectors()) {
                    for (std::size_t c = 0; c < d; ++c) y[c] = mod_floor(px[c] + t * v[c], N);
                    prod *= g_at(y, scratch);
                    if (prod == 0.0) break;
                }
                acc.add(prod);
                if (prod > 0.0) block_hits[blk].emplace_back(VecZd(px.begin(), px.end()), t);
            }
            partial[blk] = acc;
        });
        for (const auto& p : partial) sampled.merge(p);
        for (auto& bh : block_hits) {
            modular_hits += bh.size();
            hits.insert(hits.end(), bh.begin(), bh.end());
        }
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());

    const double scale = (S / Nd) * (static_cast<double>(N - 1) / static_cast<double>(N));
    const double nontrivial = support_points ? scale * sampled.mean() : 0.0;
    const double nontrivial_se = support_points ? scale * sampled.stderr_of_mean() : 0.0;

    // harvest genuine constellations among the modular hits
    std::vector<VecZd> prim;
    primitive_part(e.vectors(), prim);
    const bool primitive = segment_geometry(e).primitive;
    const Rational tau_exact = segment_geometry(prim).tau;
    const double tau = to_double(tau_exact);
    std::set<std::pair<VecZd, std::int64_t>> genuine;
    std::uint64_t via_unwrap = 0, wrapped = 0;
    for (const auto& [hx, ht] : hits) {
        std::int64_t cube_lo = *std::min_element(hx.begin(), hx.end());
        std::int64_t cube_hi = *std::max_element(hx.begin(), hx.end());
        for (const auto& v : e.vectors())
            for (std::size_t c = 0; c < d; ++c) {
                const std::int64_t r = mod_floor(hx[c] + ht * v[c], N);
                cube_lo = std::min(cube_lo, r);
                cube_hi = std::max(cube_hi, r);
            }
        const std::int64_t side = cube_hi - cube_lo;
        std::optional<std::int64_t> t_prime;
        // unwrap hypothesis side < tau N, decided exactly
        if (primitive && static_cast<__int128>(side) * tau_exact.denominator() <
                             static_cast<__int128>(tau_exact.numerator()) * N) {
            const double eps = 0.5 * (static_cast<double>(side) / static_cast<double>(N) + tau);
            const auto r = unwrap(hx, ht, e.vectors(), {cube_lo, cube_hi}, N, eps);
            if (!r) throw InternalInconsistency("pipeline: unwrap failed inside its hypotheses");
            t_prime = r->t_prime;
            ++via_unwrap;
        } else {
            for (std::int64_t candidate : {ht, ht - N}) {
                bool ok = true;
                for (const auto& v : e.vectors())
                    for (std::size_t c = 0; c < d && ok; ++c) {
                        const std::int64_t p = hx[c] + candidate * v[c];
                        ok = p >= lo && p <= hi;
                    }
                if (ok) {
                    t_prime = candidate;
                    break;
                }
            }
        }
        if (t_prime)
            genuine.emplace(hx, *t_prime);
        else
            ++wrapped;
    }

    // report genuine constellations in the coordinates of A
    nlohmann::ordered_json found = nlohmann::ordered_json::array();
    for (const auto& [gx, gt] : genuine) {
        std::vector<VecZd> points;
        VecZd base(d);
        for (std::size_t c = 0; c < d; ++c) base[c] = W * gx[c] + b;
        points.push_back(base);
        for (const auto& v : e.vectors()) {
            VecZd p(d);
            for (std::size_t c = 0; c < d; ++c) p[c] = base[c] + W * gt * v[c];
            points.push_back(p);
        }
        for (const auto& p : points)
            if (!A(p)) throw InternalInconsistency("pipeline: harvested constellation leaves A");
        if (found.size() >= config.max_reported) continue;
        nlohmann::ordered_json row;
        row["x"] = base;
        row["t"] = W * gt;
        row["points"] = points;
        row["reduced_x"] = gx;
        row["reduced_t"] = gt;
        found.push_back(row);
    }

    nlohmann::ordered_json report;
    report["set"] = set_name;
    auto& cfg = report["config"];
    cfg["alpha"] = config.alpha;
    cfg["e"] = e.vectors();
    cfg["n_prime"] = n_prime;
    cfg["d"] = d;
    cfg["eps2_requested"] = config.eps2;
    cfg["samples"] = config.samples;
    cfg["seed"] = config.seed;
    cfg["R_override"] = config.sieve_level ? nlohmann::ordered_json(*config.sieve_level) : nlohmann::ordered_json(nullptr);
    cfg["w_override"] = config.prime_cutoff ? nlohmann::ordered_json(*config.prime_cutoff) : nlohmann::ordered_json(nullptr);
    auto& par = report["parameters"];
    par["N"] = N;
    par["w"] = params.prime_cutoff;
    par["W"] = W;
    par["b"] = b;
    par["R"] = params.sieve_level;
    par["R_overridden"] = params.R_overridden;
    par["eps1"] = params.eps1;
    par["eps2"] = params.eps2;
    par["eps2_adjusted"] = eps2_adjusted;
    par["window"] = {lo, hi};
    par["c_d"] = c_d;
    par["lower_bound_constant"] = params.lower_bound_constant();
    par["tau_e"] = tau;
    auto& den = report["density"];
    den["weighted_density"] = density;
    den["weighted_density_target"] = config.alpha / 2;
    den["window_loss"] = window_loss;
    den["window_loss_bound"] = config.alpha / 10;
    den["window_loss_ok"] = window_loss <= config.alpha / 10;
    auto& mc = report["measure_check"];
    mc["window_points"] = std::pow(static_cast<double>(hi - lo + 1), dd);
    mc["candidate_points_checked"] = candidates;
    mc["support_points"] = support_points;
    mc["g_le_mu"] = true;
    mc["min_mu_over_g"] = support_points ? nlohmann::ordered_json(min_margin) : nlohmann::ordered_json(nullptr);
    auto& st = report["statistics"];
    st["expectation_g"] = expectation_g;
    st["expectation_g_bound"] = c_d * std::pow(params.eps2, dd) * config.alpha / 4;
    st["trivial_term"] = trivial_term;
    st["count_nontrivial"] = {{"value", nontrivial}, {"std_error", nontrivial_se}, {"samples", sampled.count()}};
    st["count_total"] = nontrivial + trivial_term;
    auto& h = report["hits"];
    h["modular"] = modular_hits;
    h["distinct"] = hits.size();
    h["genuine"] = genuine.size();
    h["via_unwrap"] = via_unwrap;
    h["wrapped_only"] = wrapped;
    report["constellations"] = found;
    return report;
}

}  // namespace clab
