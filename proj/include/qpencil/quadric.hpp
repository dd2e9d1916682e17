#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpencil/binary_form.hpp"
#include "qpencil/matrix.hpp"

namespace qpencil {

/// Quadratic form x^T A x on P^N, stored by its symmetric (N+1)x(N+1) matrix.
class QuadraticForm {
public:
    /// Throws std::invalid_argument unless the matrix is square, symmetric and nonzero.
    explicit QuadraticForm(Matrix gram);
    static QuadraticForm diagonal(const std::vector<FieldElement>& coefficients);

    const Matrix& gram() const { return gram_; }
    Field field() const { return gram_.field(); }
    std::size_t ambient_dimension() const { return gram_.rows() - 1; }
    bool is_diagonal() const { return diagonal_; }

    FieldElement evaluate(const std::vector<FieldElement>& x) const;
    FieldElement polar(const std::vector<FieldElement>& x, const std::vector<FieldElement>& y) const;

private:
    Matrix gram_;
    bool diagonal_ = false;
};

class QuadricPencil {
public:
    /// Both forms must live on the same P^N over the same field.
    QuadricPencil(QuadraticForm first, QuadraticForm second, std::optional<std::vector<FieldElement>> marks = {});

    const QuadraticForm& first() const { return first_; }
    const QuadraticForm& second() const { return second_; }
    Field field() const { return first_.field(); }
    std::size_t ambient_dimension() const { return first_.ambient_dimension(); }
    /// The mark parameters when the pencil came from pencil_from_marks.
    const std::optional<std::vector<FieldElement>>& marks() const { return marks_; }

private:
    QuadraticForm first_;
    QuadraticForm second_;
    std::optional<std::vector<FieldElement>> marks_;
};

/// An r-dimensional linear subspace of P^N. The basis is kept in reduced row
/// echelon form, which is the canonical representative: two subspaces are equal
/// iff their stored matrices are identical.
class LinearSubspace {
public:
    /// Throws std::invalid_argument unless the rows are linearly independent and nonempty.
    explicit LinearSubspace(const Matrix& spanning_rows);
    static LinearSubspace point(const std::vector<FieldElement>& coordinates);

    const Matrix& basis() const { return basis_; }
    Field field() const { return basis_.field(); }
    std::size_t dimension() const { return basis_.rows() - 1; }
    std::size_t ambient_dimension() const { return basis_.cols() - 1; }

    bool contains_point(const std::vector<FieldElement>& x) const;
    /// Decimal entries, row-major, space separated, rows joined by ';'.
    std::string serialize() const;

    friend bool operator==(const LinearSubspace& a, const LinearSubspace& b) { return a.basis_ == b.basis_; }
    friend bool operator!=(const LinearSubspace& a, const LinearSubspace& b) { return !(a == b); }
    /// Lexicographic on the canonical matrix entries.
    friend bool operator<(const LinearSubspace& a, const LinearSubspace& b);

private:
    Matrix basis_;
};

/// Q1 = sum x_j^2 and Q2 = sum lambda_j x_j^2 on P^(n-1).
QuadricPencil pencil_from_marks(const std::vector<FieldElement>& lambdas);

/// The pencil on P^(n) obtained by appending one extra mark; the extra value
/// must differ from every lambda_j.
QuadricPencil lifted_pencil(const std::vector<FieldElement>& lambdas, const FieldElement& extra);

/// Smallest nonnegative integer (as a field element) not among the lambdas.
FieldElement default_extra_mark(const std::vector<FieldElement>& lambdas);

/// det(sA + tB) as a binary form of degree N+1.
BinaryForm pencil_determinant(const QuadricPencil& pencil);

/// Smoothness of the base locus. Diagonal pencils use the distinct-ratio test,
/// general pencils the squarefree determinant test. Pencils on P^0 and P^1 are
/// reported non-smooth (the base locus is not a positive-codimension complete
/// intersection there).
bool is_smooth_intersection(const QuadricPencil& pencil);
/// The determinant route alone, for any pencil.
bool is_smooth_by_determinant(const QuadricPencil& pencil);

/// True iff M A M^T = 0 for the basis M, i.e. every pair of basis vectors is
/// orthogonal for the polar form. Requires matching ambient dimension and field.
bool contains(const LinearSubspace& subspace, const QuadraticForm& form);
bool contained_in_base_locus(const LinearSubspace& subspace, const QuadricPencil& pencil);

/// Sign flip of the last coordinate applied to the subspace.
LinearSubspace flip_last_coordinate(const LinearSubspace& subspace);

/// Whether the subspace is fixed by the last-coordinate sign flip. Also checks
/// the two-branch description (inside x_last = 0, or through (0:...:0:1)) and
/// throws std::logic_error if the two disagree.
bool involution_fixed(const LinearSubspace& subspace);
bool involution_fixed_by_branches(const LinearSubspace& subspace);

/// Drops the last coordinate of subspaces lying in x_last = 0. Throws
/// std::invalid_argument (naming the subspace) otherwise.
std::vector<LinearSubspace> restrict_to_hyperplane(const std::vector<LinearSubspace>& subspaces);

/// Maximal minors of the basis in lexicographic column order, first nonzero
/// coordinate scaled to 1.
std::vector<FieldElement> plucker(const LinearSubspace& subspace);

}  // namespace qpencil
