#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

namespace qpencil {

/// Raised when two scalars (or containers of scalars) over different fields meet.
class FieldMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FieldElement;

/// The base field: the rationals, or a prime field F_p with p odd.
class Field {
public:
    static Field rationals() { return Field{0}; }
    /// Throws std::invalid_argument for p = 2, composite p, or p >= 2^31.
    static Field prime(std::uint64_t p);

    bool is_rational() const { return p_ == 0; }
    bool is_finite() const { return p_ != 0; }
    std::uint64_t characteristic() const { return p_; }
    /// Number of elements; throws for the rationals.
    std::uint64_t size() const;

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement from_int(long long v) const;
    /// Parses "7", "-3" and "p/q" (a quotient in F_p too). Throws std::invalid_argument naming the token.
    FieldElement parse(std::string_view token) const;

    /// "Q" or the decimal modulus.
    std::string name() const;

    friend bool operator==(const Field&, const Field&) = default;

private:
    friend class FieldElement;
    explicit Field(std::uint64_t p) : p_(p) {}
    std::uint64_t p_ = 0;
};

class FieldElement {
public:
    FieldElement() : rep_(Residue{0, 0}) {}  // placeholder, only valid as an assignment target

    static FieldElement rational(mpq_class value);
    static FieldElement residue(std::uint64_t value, std::uint64_t modulus);

    Field field() const;
    bool is_zero() const;
    bool is_one() const;

    /// Only for rational elements.
    const mpq_class& rational_value() const;
    /// Only for prime-field elements; value in [0, p).
    std::uint64_t residue_value() const;

    FieldElement operator-() const;
    FieldElement inverse() const;  // throws std::domain_error on zero
    FieldElement pow(std::uint64_t e) const;

    FieldElement& operator+=(const FieldElement& o);
    FieldElement& operator-=(const FieldElement& o);
    FieldElement& operator*=(const FieldElement& o);
    FieldElement& operator/=(const FieldElement& o);

    friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
    friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
    friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
    friend FieldElement operator/(FieldElement a, const FieldElement& b) { return a /= b; }

    friend bool operator==(const FieldElement& a, const FieldElement& b);
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

    /// Total order within one field (residue value, or rational value); used for
    /// lexicographic canonical orders only.
    friend std::strong_ordering compare(const FieldElement& a, const FieldElement& b);

    std::string to_string() const;

private:
    struct Residue {
        std::uint64_t value;
        std::uint64_t modulus;
    };
    explicit FieldElement(mpq_class v) : rep_(std::move(v)) {}
    explicit FieldElement(Residue r) : rep_(r) {}

    const Residue& res() const { return std::get<Residue>(rep_); }
    void require_same_field(const FieldElement& o) const;

    std::variant<mpq_class, Residue> rep_;
};

std::ostream& operator<<(std::ostream& os, const FieldElement& x);

}  // namespace qpencil
