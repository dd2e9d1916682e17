#include "qpencil/field.hpp"

#include <charconv>
#include <ostream>

namespace qpencil {

namespace {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::uint64_t reduce(long long v, std::uint64_t p) {
    long long r = v % static_cast<long long>(p);
    if (r < 0) r += static_cast<long long>(p);
    return static_cast<std::uint64_t>(r);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

}  // namespace

Field Field::prime(std::uint64_t p) {
    if (p == 2) throw std::invalid_argument("characteristic 2 is not supported");
    if (p >= (std::uint64_t{1} << 31)) throw std::invalid_argument("modulus too large: " + std::to_string(p));
    if (!is_prime(p)) throw std::invalid_argument("not an odd prime: " + std::to_string(p));
    return Field{p};
}

std::uint64_t Field::size() const {
    if (is_rational()) throw std::domain_error("the rationals are infinite");
    return p_;
}

FieldElement Field::zero() const { return from_int(0); }
FieldElement Field::one() const { return from_int(1); }

FieldElement Field::from_int(long long v) const {
    if (is_rational()) return FieldElement::rational(mpq_class(static_cast<long>(v)));
    return FieldElement::residue(reduce(v, p_), p_);
}

FieldElement Field::parse(std::string_view token) const {
    auto fail = [&] { return std::invalid_argument("cannot parse field element '" + std::string(token) + "'"); };
    auto parse_ll = [&](std::string_view s) {
        long long v = 0;
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) throw fail();
        return v;
    };
    auto slash = token.find('/');
    if (slash == std::string_view::npos) return from_int(parse_ll(token));
    long long num = parse_ll(token.substr(0, slash));
    long long den = parse_ll(token.substr(slash + 1));
    if (den == 0 || from_int(den).is_zero()) throw fail();
    return from_int(num) / from_int(den);
}

std::string Field::name() const { return is_rational() ? "Q" : std::to_string(p_); }

FieldElement FieldElement::rational(mpq_class value) {
    value.canonicalize();
    return FieldElement(std::move(value));
}

FieldElement FieldElement::residue(std::uint64_t value, std::uint64_t modulus) {
    return FieldElement(Residue{value % modulus, modulus});
}

Field FieldElement::field() const {
    if (std::holds_alternative<mpq_class>(rep_)) return Field::rationals();
    return Field{res().modulus};
}

bool FieldElement::is_zero() const {
    if (auto* q = std::get_if<mpq_class>(&rep_)) return sgn(*q) == 0;
    return res().value == 0;
}

bool FieldElement::is_one() const {
    if (auto* q = std::get_if<mpq_class>(&rep_)) return *q == 1;
    return res().value == 1;
}

const mpq_class& FieldElement::rational_value() const {
    if (auto* q = std::get_if<mpq_class>(&rep_)) return *q;
    throw FieldMismatch("not a rational element");
}

std::uint64_t FieldElement::residue_value() const {
    if (auto* r = std::get_if<Residue>(&rep_)) return r->value;
    throw FieldMismatch("not a prime-field element");
}

void FieldElement::require_same_field(const FieldElement& o) const {
    bool ok = rep_.index() == o.rep_.index();
    if (ok && rep_.index() == 1) ok = res().modulus == o.res().modulus;
    if (!ok) throw FieldMismatch("mixed-field arithmetic: " + to_string() + " and " + o.to_string());
}

FieldElement FieldElement::operator-() const {
    if (auto* q = std::get_if<mpq_class>(&rep_)) return FieldElement(mpq_class(-*q));
    const auto& r = res();
    return FieldElement(Residue{r.value == 0 ? 0 : r.modulus - r.value, r.modulus});
}

FieldElement FieldElement::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    if (auto* q = std::get_if<mpq_class>(&rep_)) return FieldElement(mpq_class(1 / *q));
    const auto& r = res();
    return FieldElement(Residue{powmod(r.value, r.modulus - 2, r.modulus), r.modulus});
}

FieldElement FieldElement::pow(std::uint64_t e) const {
    if (auto* q = std::get_if<mpq_class>(&rep_)) {
        mpz_class n, d;
        mpz_pow_ui(n.get_mpz_t(), q->get_num_mpz_t(), e);
        mpz_pow_ui(d.get_mpz_t(), q->get_den_mpz_t(), e);
        return rational(mpq_class(n, d));
    }
    const auto& r = res();
    return FieldElement(Residue{powmod(r.value, e, r.modulus), r.modulus});
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
    require_same_field(o);
    if (auto* q = std::get_if<mpq_class>(&rep_)) {
        *q += std::get<mpq_class>(o.rep_);
    } else {
        auto& r = std::get<Residue>(rep_);
        r.value = (r.value + o.res().value) % r.modulus;
    }
    return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) {
    require_same_field(o);
    if (auto* q = std::get_if<mpq_class>(&rep_)) {
        *q -= std::get<mpq_class>(o.rep_);
    } else {
        auto& r = std::get<Residue>(rep_);
        r.value = (r.value + r.modulus - o.res().value) % r.modulus;
    }
    return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& o) {
    require_same_field(o);
    if (auto* q = std::get_if<mpq_class>(&rep_)) {
        *q *= std::get<mpq_class>(o.rep_);
    } else {
        auto& r = std::get<Residue>(rep_);
        r.value = r.value * o.res().value % r.modulus;
    }
    return *this;
}

FieldElement& FieldElement::operator/=(const FieldElement& o) {
    require_same_field(o);
    return *this *= o.inverse();
}

bool operator==(const FieldElement& a, const FieldElement& b) {
    a.require_same_field(b);
    if (auto* q = std::get_if<mpq_class>(&a.rep_)) return *q == std::get<mpq_class>(b.rep_);
    return a.res().value == b.res().value;
}

std::strong_ordering compare(const FieldElement& a, const FieldElement& b) {
    a.require_same_field(b);
    if (auto* q = std::get_if<mpq_class>(&a.rep_)) {
        int c = cmp(*q, std::get<mpq_class>(b.rep_));
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }
    return a.res().value <=> b.res().value;
}

std::string FieldElement::to_string() const {
    if (auto* q = std::get_if<mpq_class>(&rep_)) return q->get_str();
    return std::to_string(res().value);
}

std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.to_string(); }

}  // namespace qpencil
