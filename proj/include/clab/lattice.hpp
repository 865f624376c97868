#pragma once

#include "clab/numeric.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace clab {

/// A point of Z^d. The ambient dimension is the length.
using VecZd = std::vector<std::int64_t>;

/// A set of l vectors in Z^d together with the modulus N of Z_N^d.
///
/// Vectors are stored as signed integers (the geometric view); `reduced()`
/// gives the representatives in [0, N) used for modular work. A modulus of 0
/// marks a purely geometric basis (e.g. the output of a dimension lift).
class Basis {
public:
    Basis(std::vector<VecZd> vectors, std::int64_t modulus);

    std::size_t count() const noexcept { return vectors_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    std::int64_t modulus() const noexcept { return modulus_; }
    const std::vector<VecZd>& vectors() const noexcept { return vectors_; }
    const VecZd& operator[](std::size_t i) const { return vectors_[i]; }

    /// Coordinates reduced into [0, N).
    std::vector<VecZd> reduced() const;

    /// The d x d matrix whose columns are the vectors (row-major: row = coordinate).
    std::vector<std::vector<std::int64_t>> column_matrix() const;

    /// True when l = d and det is coprime to N.
    bool invertible_mod_n() const;

    Basis with_modulus(std::int64_t modulus) const { return Basis(vectors_, modulus); }

private:
    std::vector<VecZd> vectors_;
    std::size_t dim_;
    std::int64_t modulus_;
};

struct SegmentGeometry {
    VecZd e_flat;
    Rational tau{0};
    bool primitive = false;
};

/// Every coordinate projection of e ∪ {0} has l+1 distinct values.
bool is_general_position(std::span<const VecZd> e);
inline bool is_general_position(const Basis& e) { return is_general_position(e.vectors()); }

/// Exact L∞ distance from the segment [0, e_flat] to the nearest lattice point
/// other than its endpoints, and primitivity of e_flat.
///
/// tau is 0 exactly when e_flat is not primitive (an interior lattice point
/// lies on the segment). Search is a branch-and-bound over lattice points whose
/// coordinates stay within distance < current best of a common segment point;
/// the per-point minimum over the segment parameter is solved exactly in
/// rational arithmetic from the breakpoints of the piecewise-linear distance.
SegmentGeometry segment_geometry(std::span<const VecZd> e);
inline SegmentGeometry segment_geometry(const Basis& e) { return segment_geometry(e.vectors()); }

/// Lifts l general-position vectors of Z^d to a general-position basis of
/// Z^{d+l} whose first l vectors project onto e. The returned basis has
/// modulus 0.
Basis lift_to_general_position(std::span<const VecZd> e);

/// {e_d, e_d - e_1, ..., e_d - e_{d-1}} with signed coordinates; use
/// `reduced()` for the mod-N view.
Basis derived_basis(const Basis& e);

/// Divides e_flat by the gcd of its coordinates. Returns the scale.
std::int64_t primitive_part(std::span<const VecZd> e, std::vector<VecZd>& out);

/// Plain-text basis format: a header line `N=<prime>`, then one vector per
/// line as comma-separated integers. Blank lines and `#` comments are ignored.
Basis parse_basis(std::istream& in);
Basis parse_basis_string(const std::string& text);
std::string format_basis(const Basis& e);

/// Parses "1,2;2,1" style inline vector lists.
std::vector<VecZd> parse_vector_list(const std::string& text);

}  // namespace clab
