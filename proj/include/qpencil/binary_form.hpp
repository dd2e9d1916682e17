#pragma once

#include <string>
#include <vector>

#include "qpencil/field.hpp"

namespace qpencil {

/// Homogeneous polynomial in (s, t) of a fixed formal degree d. Coefficient i
/// multiplies s^(d-i) t^i. The degree is kept even when leading coefficients
/// vanish: a zero leading coefficient is a root at (1:0).
///
/// A negative formal degree is allowed only for the zero form (empty
/// coefficient list); it stands for a component of a section of O(d), d < 0.
class BinaryForm {
public:
    /// Coefficients in s-descending order; degree = size - 1 (size >= 1).
    BinaryForm(Field field, std::vector<FieldElement> coefficients);

    static BinaryForm zero(Field field, int degree);
    static BinaryForm constant(const FieldElement& c);
    /// s - lambda t
    static BinaryForm linear_root(const FieldElement& lambda);
    /// Product of (s - lambda_j t) over the list; the constant 1 for an empty list.
    static BinaryForm product_of_roots(Field field, const std::vector<FieldElement>& lambdas);
    /// s^k t^(d-k)
    static BinaryForm monomial(Field field, int degree, int s_power);

    Field field() const { return field_; }
    int degree() const { return degree_; }
    bool is_zero() const;
    const std::vector<FieldElement>& coefficients() const { return coeffs_; }
    const FieldElement& coefficient(int i) const { return coeffs_.at(static_cast<std::size_t>(i)); }

    FieldElement evaluate(const FieldElement& s, const FieldElement& t) const;
    /// Value at (lambda : 1), i.e. the dehomogenized polynomial at lambda.
    FieldElement evaluate_at(const FieldElement& lambda) const;

    /// Multiplicity of the root (1:0); the formal degree plus one for the zero form.
    int multiplicity_at_infinity() const;
    /// Degree of the dehomogenized polynomial (-1 for the zero form).
    int affine_degree() const { return is_zero() ? -1 : degree_ - multiplicity_at_infinity(); }

    BinaryForm derivative_s() const;
    BinaryForm derivative_t() const;
    BinaryForm scaled(const FieldElement& c) const;
    /// Same polynomial with the affine leading coefficient scaled to 1.
    BinaryForm monic() const;

    friend BinaryForm operator*(const BinaryForm& a, const BinaryForm& b);
    /// Requires equal formal degrees.
    friend BinaryForm operator+(const BinaryForm& a, const BinaryForm& b);
    friend BinaryForm operator-(const BinaryForm& a, const BinaryForm& b);
    friend bool operator==(const BinaryForm& a, const BinaryForm& b);
    friend bool operator!=(const BinaryForm& a, const BinaryForm& b) { return !(a == b); }

    std::string to_string() const;

private:
    BinaryForm(Field field, int degree, std::vector<FieldElement> coefficients)
        : field_(field), degree_(degree), coeffs_(std::move(coefficients)) {}

    Field field_;
    int degree_ = 0;
    std::vector<FieldElement> coeffs_;
};

/// Monic gcd (in the dehomogenization t = 1) with the common power of t, i.e.
/// the shared root at (1:0), kept as leading zero coefficients. Throws
/// std::invalid_argument when both forms are zero.
BinaryForm binary_form_gcd(const BinaryForm& f, const BinaryForm& g);

/// Exact quotient f / h as binary forms of degree deg f - deg h. Throws
/// std::domain_error if h does not divide f.
BinaryForm divide_exact(const BinaryForm& f, const BinaryForm& h);

/// True iff gcd(f, df/ds, df/dt) is a constant. Constants count as squarefree.
/// Throws std::invalid_argument on the zero form.
bool is_squarefree(const BinaryForm& f);

}  // namespace qpencil
