#include "clab/lattice.hpp"
#include "clab/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace clab {

namespace {

std::size_t common_dim(std::span<const VecZd> e) {
    if (e.empty()) throw InvalidInput("empty vector set");
    const std::size_t d = e.front().size();
    if (d == 0) throw InvalidInput("vectors must have dimension >= 1");
    for (const auto& v : e)
        if (v.size() != d) throw InvalidInput("dimension mismatch among vectors");
    return d;
}

VecZd flatten(std::span<const VecZd> e) {
    VecZd flat;
    for (const auto& v : e) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

VecZd parse_vector(const std::string& text) {
    VecZd v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw InvalidInput("empty coordinate in '" + text + "'");
        std::size_t used = 0;
        long long value = 0;
        try {
            value = std::stoll(item, &used);
        } catch (const std::exception&) {
            throw InvalidInput("bad integer '" + item + "'");
        }
        if (used != item.size()) throw InvalidInput("bad integer '" + item + "'");
        v.push_back(value);
    }
    return v;
}

// --- exact segment distance -------------------------------------------------

struct Line {
    Rational a;  // value at lambda = 0
    Rational s;  // slope
};

// max_j |m_j - lambda e_j| minimized over lambda in [0, 1], exactly.
Rational min_distance_to_segment(const VecZd& m, const VecZd& e) {
    std::vector<Line> lines;
    lines.reserve(2 * m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        lines.push_back({Rational(m[j]), Rational(-e[j])});
        lines.push_back({Rational(-m[j]), Rational(e[j])});
    }
    auto value_at = [&](const Rational& lambda) {
        Rational best = lines[0].a + lines[0].s * lambda;
        for (const auto& l : lines) best = std::max(best, l.a + l.s * lambda);
        return best;
    };
    Rational result = std::min(value_at(Rational(0)), value_at(Rational(1)));
    for (std::size_t p = 0; p < lines.size(); ++p) {
        for (std::size_t q = p + 1; q < lines.size(); ++q) {
            if (lines[p].s == lines[q].s) continue;
            const Rational lambda = (lines[q].a - lines[p].a) / (lines[p].s - lines[q].s);
            if (lambda < Rational(0) || lambda > Rational(1)) continue;
            result = std::min(result, value_at(lambda));
        }
    }
    return result;
}

// Closed/open endpoints of the feasible lambda interval.
struct Interval {
    Rational lo{0}, hi{1};
    bool lo_open = false, hi_open = false;

    bool empty() const {
        if (lo < hi) return false;
        return !(lo == hi && !lo_open && !hi_open);
    }
    Interval intersect_open(const Rational& a, const Rational& b) const {
        Interval r = *this;
        if (a >= r.lo) {
            r.lo = a;
            r.lo_open = true;
        }
        if (b <= r.hi) {
            r.hi = b;
            r.hi_open = true;
        }
        return r;
    }
};

std::int64_t floor_rat(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
}

class TauSearch {
public:
    explicit TauSearch(const VecZd& e) : e_(e), m_(e.size(), 0) {}

    Rational run() {
        best_ = Rational(1);  // a unit neighbour of 0 always attains 1
        descend(0, Interval{});
        return best_;
    }

private:
    void descend(std::size_t j, const Interval& window) {
        if (j == e_.size()) {
            if (std::all_of(m_.begin(), m_.end(), [](auto v) { return v == 0; })) return;
            if (m_ == e_) return;
            best_ = std::min(best_, min_distance_to_segment(m_, e_));
            return;
        }
        const std::int64_t ej = e_[j];
        if (ej == 0) {
            // |m_j| < best <= 1 forces m_j = 0
            m_[j] = 0;
            descend(j + 1, window);
            return;
        }
        const Rational lo_val = window.lo * Rational(ej);
        const Rational hi_val = window.hi * Rational(ej);
        const Rational low = std::min(lo_val, hi_val) - best_;
        const Rational high = std::max(lo_val, hi_val) + best_;
        for (std::int64_t mj = floor_rat(low); mj <= floor_rat(high) + 1; ++mj) {
            // lambda with |mj - lambda ej| < best
            Rational a = (Rational(mj) - best_) / Rational(ej);
            Rational b = (Rational(mj) + best_) / Rational(ej);
            if (a > b) std::swap(a, b);
            const Interval next = window.intersect_open(a, b);
            if (next.empty()) continue;
            m_[j] = mj;
            descend(j + 1, next);
        }
    }

    const VecZd& e_;
    VecZd m_;
    Rational best_{1};
};

}  // namespace

// --- Basis -------------------------------------------------------------------

Basis::Basis(std::vector<VecZd> vectors, std::int64_t modulus)
    : vectors_(std::move(vectors)), dim_(0), modulus_(modulus) {
    dim_ = common_dim(vectors_);
    if (modulus_ < 0 || modulus_ == 1) throw InvalidInput("modulus must be 0 (none) or >= 2");
}

std::vector<VecZd> Basis::reduced() const {
    if (modulus_ == 0) return vectors_;
    std::vector<VecZd> out = vectors_;
    for (auto& v : out)
        for (auto& c : v) c = mod_floor(c, modulus_);
    return out;
}

std::vector<std::vector<std::int64_t>> Basis::column_matrix() const {
    std::vector<std::vector<std::int64_t>> m(dim_, std::vector<std::int64_t>(count()));
    for (std::size_t col = 0; col < count(); ++col)
        for (std::size_t row = 0; row < dim_; ++row) m[row][col] = vectors_[col][row];
    return m;
}

bool Basis::invertible_mod_n() const {
    if (count() != dim_ || modulus_ == 0) return false;
    const __int128 det = determinant(column_matrix());
    const std::int64_t det_mod = static_cast<std::int64_t>(((det % modulus_) + modulus_) % modulus_);
    return std::gcd(det_mod, modulus_) == 1;
}

// --- operations ----------------------------------------------------------------

bool is_general_position(std::span<const VecZd> e) {
    const std::size_t d = common_dim(e);
    for (std::size_t i = 0; i < d; ++i) {
        std::set<std::int64_t> seen{0};
        for (const auto& v : e)
            if (!seen.insert(v[i]).second) return false;
    }
    return true;
}

SegmentGeometry segment_geometry(std::span<const VecZd> e) {
    common_dim(e);
    SegmentGeometry g;
    g.e_flat = flatten(e);
    std::int64_t gcd_all = 0;
    for (auto c : g.e_flat) gcd_all = std::gcd(gcd_all, c);
    if (gcd_all == 0) throw InvalidInput("segment_geometry: e is the zero vector");
    g.primitive = gcd_all == 1;
    g.tau = TauSearch(g.e_flat).run();
    return g;
}

std::int64_t primitive_part(std::span<const VecZd> e, std::vector<VecZd>& out) {
    common_dim(e);
    std::int64_t g = 0;
    for (const auto& v : e)
        for (auto c : v) g = std::gcd(g, c);
    if (g == 0) throw InvalidInput("primitive_part: e is the zero vector");
    out.assign(e.begin(), e.end());
    for (auto& v : out)
        for (auto& c : v) c /= g;
    return g;
}

Basis lift_to_general_position(std::span<const VecZd> e) {
    const std::size_t d = common_dim(e);
    if (!is_general_position(e))
        throw InvalidInput("lift_to_general_position: input is not in general position");
    const std::size_t l = e.size();
    const std::size_t n = d + l;
    std::int64_t max_abs = 0;
    for (const auto& v : e)
        for (auto c : v) max_abs = std::max<std::int64_t>(max_abs, std::llabs(c));
    const std::int64_t k = max_abs + 1;
    const std::int64_t big = 2 * static_cast<std::int64_t>(n * n) + 1;

    // Rows of the new coordinates are strictly diagonally dominant after pairing
    // coordinate d+i with vector i and coordinate c with completion vector c.
    std::vector<VecZd> out;
    out.reserve(n);
    for (std::size_t i = 0; i < l; ++i) {
        VecZd v(e[i].begin(), e[i].end());
        for (std::size_t kk = 0; kk < l; ++kk)
            v.push_back(k * (static_cast<std::int64_t>(i + 1) + (kk == i ? big : 0)));
        out.push_back(std::move(v));
    }
    for (std::size_t j = 0; j < d; ++j) {
        VecZd v;
        for (std::size_t c = 0; c < d; ++c)
            v.push_back(k * (static_cast<std::int64_t>(j + 1) + (c == j ? big : 0)));
        for (std::size_t kk = 0; kk < l; ++kk) v.push_back(k * static_cast<std::int64_t>(l + j + 1));
        out.push_back(std::move(v));
    }
    Basis lifted(std::move(out), 0);
    if (rank_over_q(lifted.column_matrix()) != n || !is_general_position(lifted))
        throw InternalInconsistency("lift_to_general_position: construction failed validation");
    return lifted;
}

Basis derived_basis(const Basis& e) {
    if (e.count() != e.dim()) throw InvalidInput("derived_basis: need exactly d vectors");
    const std::size_t d = e.dim();
    std::vector<VecZd> out;
    out.push_back(e[d - 1]);
    for (std::size_t i = 0; i + 1 < d; ++i) {
        VecZd v(d);
        for (std::size_t c = 0; c < d; ++c) v[c] = e[d - 1][c] - e[i][c];
        out.push_back(std::move(v));
    }
    return Basis(std::move(out), e.modulus());
}

Basis parse_basis(std::istream& in) {
    std::optional<std::int64_t> modulus;
    std::vector<VecZd> vectors;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("N=", 0) == 0 || line.rfind("N =", 0) == 0) {
            const std::string value = trim(line.substr(line.find('=') + 1));
            try {
                modulus = std::stoll(value);
            } catch (const std::exception&) {
                throw InvalidInput("bad modulus line '" + line + "'");
            }
            continue;
        }
        vectors.push_back(parse_vector(line));
    }
    if (!modulus) throw InvalidInput("basis file lacks an N=<prime> header");
    if (*modulus <= 2 || !is_prime_u64(static_cast<std::uint64_t>(*modulus)))
        throw InvalidInput("basis modulus must be a prime > 2");
    return Basis(std::move(vectors), *modulus);
}

Basis parse_basis_string(const std::string& text) {
    std::istringstream in(text);
    return parse_basis(in);
}

std::string format_basis(const Basis& e) {
    std::ostringstream out;
    out << "N=" << e.modulus() << '\n';
    for (const auto& v : e.vectors()) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
        out << '\n';
    }
    return out.str();
}

std::vector<VecZd> parse_vector_list(const std::string& text) {
    std::vector<VecZd> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        // tolerate "(1,2)" spelling
        item.erase(std::remove(item.begin(), item.end(), '('), item.end());
        item.erase(std::remove(item.begin(), item.end(), ')'), item.end());
        out.push_back(parse_vector(item));
    }
    if (out.empty()) throw InvalidInput("empty vector list");
    return out;
}

}  // namespace clab
