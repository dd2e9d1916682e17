#include "qpencil/binary_form.hpp"

#include <sstream>
#include <stdexcept>

namespace qpencil {

namespace {

// Dense univariate polynomial, ascending powers, no trailing zeros.
using Poly = std::vector<FieldElement>;

void trim(Poly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

Poly dehomogenize(const BinaryForm& f) {
    if (f.degree() < 0) return {};
    Poly p(static_cast<std::size_t>(f.degree()) + 1, f.field().zero());
    for (int k = 0; k <= f.degree(); ++k) p[static_cast<std::size_t>(k)] = f.coefficient(f.degree() - k);
    trim(p);
    return p;
}

BinaryForm homogenize(Field field, const Poly& p, int degree) {
    if (static_cast<int>(p.size()) - 1 > degree) throw std::logic_error("polynomial exceeds formal degree");
    if (degree < 0) return BinaryForm::zero(field, degree);
    std::vector<FieldElement> c(static_cast<std::size_t>(degree) + 1, field.zero());
    for (std::size_t k = 0; k < p.size(); ++k) c[static_cast<std::size_t>(degree) - k] = p[k];
    return BinaryForm(field, std::move(c));
}

// Returns (quotient, remainder).
std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b) {
    if (b.empty()) throw std::domain_error("polynomial division by zero");
    const FieldElement inv = b.back().inverse();
    Poly q;
    if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, b.back().field().zero());
    while (a.size() >= b.size() && !a.empty()) {
        std::size_t shift = a.size() - b.size();
        FieldElement c = a.back() * inv;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        a.pop_back();
        trim(a);
    }
    trim(q);
    return {q, a};
}

Poly poly_gcd(Poly a, Poly b) {
    while (!b.empty()) {
        Poly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        FieldElement inv = a.back().inverse();
        for (auto& c : a) c *= inv;
    }
    return a;
}

}  // namespace

BinaryForm::BinaryForm(Field field, std::vector<FieldElement> coefficients)
    : field_(field), degree_(static_cast<int>(coefficients.size()) - 1), coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) throw std::invalid_argument("binary form needs at least one coefficient");
    for (const auto& c : coeffs_)
        if (c.field() != field_) throw FieldMismatch("binary form coefficient " + c.to_string() + " not over " + field_.name());
}

BinaryForm BinaryForm::zero(Field field, int degree) {
    if (degree < 0) return BinaryForm(field, degree, {});
    return BinaryForm(field, std::vector<FieldElement>(static_cast<std::size_t>(degree) + 1, field.zero()));
}

BinaryForm BinaryForm::constant(const FieldElement& c) { return BinaryForm(c.field(), {c}); }

BinaryForm BinaryForm::linear_root(const FieldElement& lambda) {
    Field f = lambda.field();
    return BinaryForm(f, {f.one(), -lambda});
}

BinaryForm BinaryForm::product_of_roots(Field field, const std::vector<FieldElement>& lambdas) {
    BinaryForm out = constant(field.one());
    for (const auto& l : lambdas) out = out * linear_root(l);
    return out;
}

BinaryForm BinaryForm::monomial(Field field, int degree, int s_power) {
    if (s_power < 0 || s_power > degree) throw std::invalid_argument("monomial exponent out of range");
    BinaryForm m = zero(field, degree);
    m.coeffs_[static_cast<std::size_t>(degree - s_power)] = field.one();
    return m;
}

bool BinaryForm::is_zero() const {
    for (const auto& c : coeffs_)
        if (!c.is_zero()) return false;
    return true;
}

FieldElement BinaryForm::evaluate(const FieldElement& s, const FieldElement& t) const {
    // Homogeneous Horner: sum c_i s^(d-i) t^i.
    FieldElement acc = field_.zero();
    FieldElement tpow = field_.one();
    std::vector<FieldElement> spow(coeffs_.size(), field_.one());
    for (std::size_t k = 1; k < spow.size(); ++k) spow[k] = spow[k - 1] * s;
    for (int i = 0; i <= degree_; ++i) {
        acc += coeffs_[static_cast<std::size_t>(i)] * spow[static_cast<std::size_t>(degree_ - i)] * tpow;
        tpow *= t;
    }
    return acc;
}

FieldElement BinaryForm::evaluate_at(const FieldElement& lambda) const {
    FieldElement acc = field_.zero();
    for (const auto& c : coeffs_) acc = acc * lambda + c;
    return acc;
}

int BinaryForm::multiplicity_at_infinity() const {
    int m = 0;
    while (m <= degree_ && coeffs_[static_cast<std::size_t>(m)].is_zero()) ++m;
    return m;
}

BinaryForm BinaryForm::derivative_s() const {
    if (degree_ <= 0) return zero(field_, degree_ - 1);
    std::vector<FieldElement> c;
    for (int i = 0; i < degree_; ++i) c.push_back(field_.from_int(degree_ - i) * coeffs_[static_cast<std::size_t>(i)]);
    return BinaryForm(field_, std::move(c));
}

BinaryForm BinaryForm::derivative_t() const {
    if (degree_ <= 0) return zero(field_, degree_ - 1);
    std::vector<FieldElement> c;
    for (int i = 1; i <= degree_; ++i) c.push_back(field_.from_int(i) * coeffs_[static_cast<std::size_t>(i)]);
    return BinaryForm(field_, std::move(c));
}

BinaryForm BinaryForm::scaled(const FieldElement& c) const {
    BinaryForm out = *this;
    for (auto& x : out.coeffs_) x *= c;
    return out;
}

BinaryForm BinaryForm::monic() const {
    if (is_zero()) throw std::domain_error("zero form has no leading coefficient");
    return scaled(coeffs_[static_cast<std::size_t>(multiplicity_at_infinity())].inverse());
}

BinaryForm operator*(const BinaryForm& a, const BinaryForm& b) {
    if (a.field_ != b.field_) throw FieldMismatch("binary forms over different fields");
    const int d = a.degree_ + b.degree_;
    if (a.degree_ < 0 || b.degree_ < 0) return BinaryForm::zero(a.field_, d);
    BinaryForm out = BinaryForm::zero(a.field_, d);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        if (a.coeffs_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return out;
}

BinaryForm operator+(const BinaryForm& a, const BinaryForm& b) {
    if (a.field_ != b.field_) throw FieldMismatch("binary forms over different fields");
    if (a.degree_ != b.degree_) throw std::invalid_argument("adding binary forms of different degrees");
    BinaryForm out = a;
    for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] += b.coeffs_[i];
    return out;
}

BinaryForm operator-(const BinaryForm& a, const BinaryForm& b) { return a + b.scaled(-b.field_.one()); }

bool operator==(const BinaryForm& a, const BinaryForm& b) {
    if (a.field_ != b.field_ || a.degree_ != b.degree_) return false;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        if (a.coeffs_[i] != b.coeffs_[i]) return false;
    return true;
}

std::string BinaryForm::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i <= degree_; ++i) {
        const auto& c = coeffs_[static_cast<std::size_t>(i)];
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        const int sp = degree_ - i, tp = i;
        if (!c.is_one() || (sp == 0 && tp == 0)) os << c;
        if (sp > 0) os << (c.is_one() ? "" : "*") << "s" << (sp > 1 ? "^" + std::to_string(sp) : "");
        if (tp > 0) os << ((c.is_one() && sp == 0) ? "" : "*") << "t" << (tp > 1 ? "^" + std::to_string(tp) : "");
    }
    return os.str();
}

BinaryForm binary_form_gcd(const BinaryForm& f, const BinaryForm& g) {
    if (f.field() != g.field()) throw FieldMismatch("gcd of binary forms over different fields");
    if (f.is_zero() && g.is_zero()) throw std::invalid_argument("gcd of two zero forms");
    if (f.is_zero()) return g.monic();
    if (g.is_zero()) return f.monic();
    Poly p = poly_gcd(dehomogenize(f), dehomogenize(g));
    const int at_infinity = std::min(f.multiplicity_at_infinity(), g.multiplicity_at_infinity());
    return homogenize(f.field(), p, static_cast<int>(p.size()) - 1 + at_infinity);
}

BinaryForm divide_exact(const BinaryForm& f, const BinaryForm& h) {
    if (f.field() != h.field()) throw FieldMismatch("division of binary forms over different fields");
    if (h.is_zero()) throw std::domain_error("division by the zero form");
    const int degree = f.degree() - h.degree();
    if (f.is_zero()) return BinaryForm::zero(f.field(), degree);
    if (degree < 0 || f.multiplicity_at_infinity() < h.multiplicity_at_infinity())
        throw std::domain_error(h.to_string() + " does not divide " + f.to_string());
    auto [q, r] = poly_divmod(dehomogenize(f), dehomogenize(h));
    if (!r.empty()) throw std::domain_error(h.to_string() + " does not divide " + f.to_string());
    return homogenize(f.field(), q, degree);
}

bool is_squarefree(const BinaryForm& f) {
    if (f.is_zero()) throw std::invalid_argument("squarefree test on the zero form");
    BinaryForm g = f;
    for (const BinaryForm& d : {f.derivative_s(), f.derivative_t()})
        if (!d.is_zero()) g = binary_form_gcd(g, d);
    return g.degree() == 0;
}

}  // namespace qpencil
