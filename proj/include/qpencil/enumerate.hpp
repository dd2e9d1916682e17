#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpencil/quadric.hpp"

namespace qpencil {

struct EnumerationOptions {
    /// Worker threads for the top level of the search. The merged result does
    /// not depend on this value.
    unsigned workers = 1;
};

/// Canonical subspaces over F_p packed as residues, (r+1)(N+1) per entry,
/// sorted lexicographically by their echelon matrices.
class SubspaceList {
public:
    SubspaceList(Field field, std::size_t dimension, std::size_t ambient_dimension);

    Field field() const { return field_; }
    std::size_t dimension() const { return r_; }
    std::size_t ambient_dimension() const { return n_ - 1; }
    std::size_t size() const { return stride() ? data_.size() / stride() : 0; }
    bool empty() const { return size() == 0; }

    std::span<const std::uint32_t> raw(std::size_t i) const { return {data_.data() + i * stride(), stride()}; }
    LinearSubspace at(std::size_t i) const;
    std::vector<LinearSubspace> materialize() const;

    void push_back(std::span<const std::uint32_t> echelon_entries);

private:
    std::size_t stride() const { return (r_ + 1) * n_; }

    Field field_;
    std::size_t r_;
    std::size_t n_;
    std::vector<std::uint32_t> data_;
};

/// Every r-dimensional linear subspace of P^N(F_p) contained in both quadrics
/// of the pencil, each once, in canonical echelon form, sorted.
///
/// Depth-first extension of isotropic flags: a root point of the base locus is
/// extended one point at a time, each new point taken from the quotient of the
/// common polar complement by the current subspace, then canonicalized and
/// deduplicated. At depth k the new point is restricted to the coordinate
/// subspace x_0 = ... = x_(r-k-2) = 0; an r-space meets a codimension r-k-1
/// subspace in dimension >= k+1, so the restriction loses nothing and the
/// roots are only the points of the base locus with x_0 = ... = x_(r-1) = 0.
///
/// Throws std::invalid_argument over the rationals, or unless r < N.
SubspaceList enumerate_subspaces(const QuadricPencil& pencil, std::size_t r, const EnumerationOptions& options = {});

/// |Z(F_p)| by visiting every normalized point of P^N.
std::uint64_t count_points(const QuadricPencil& pencil, const EnumerationOptions& options = {});

/// Header "r=<dim> N=<ambient> q=<p>", then one line per subspace.
void write_subspaces_text(const SubspaceList& list, std::ostream& os);
nlohmann::json subspaces_to_json(const SubspaceList& list);

struct FixedLocusComparison {
    std::size_t lifted = 0;          // r-subspaces of the lifted base locus in P^(n)
    std::size_t fixed = 0;           // those fixed by the last-coordinate sign flip
    std::size_t in_hyperplane = 0;   // those inside x_last = 0
    std::size_t through_pole = 0;    // those through (0:...:0:1)
    std::size_t direct = 0;          // r-subspaces of the original base locus
    bool fixed_equals_hyperplane = false;
    bool restriction_equals_direct = false;
    bool passed() const { return fixed_equals_hyperplane && restriction_equals_direct && through_pole == 0; }
};

/// Enumerates r-subspaces for the pencil of the marks and for its lift by the
/// extra mark, and compares the fixed locus of the sign flip with the direct
/// enumeration after dropping the last coordinate.
FixedLocusComparison compare_fixed_locus(const std::vector<FieldElement>& lambdas, const FieldElement& extra, std::size_t r,
                                         const EnumerationOptions& options = {});

}  // namespace qpencil
