#include "qpencil/quasiparabolic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "qpencil/matrix.hpp"

namespace qpencil {

namespace {

template <class Fn>
bool any_subset(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (fn(idx)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::size_t coefficient_count(int degree) { return degree < 0 ? 0 : static_cast<std::size_t>(degree) + 1; }

// Rows: v_j f(lambda_j) - u_j g(lambda_j) = 0 for j in `rows`, unknowns the
// coefficients of f (degree df) then g (degree dg).
Matrix interpolation_matrix(const QPBundle& bundle, const std::vector<std::size_t>& rows, int df, int dg) {
    const Field field = bundle.field();
    const std::size_t nf = coefficient_count(df), ng = coefficient_count(dg);
    Matrix m(field, rows.size(), nf + ng);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t j = rows[k];
        const FieldElement& l = bundle.marks()[j];
        const Flag& F = bundle.flag(j);
        FieldElement p = field.one();
        for (std::size_t i = nf; i-- > 0;) {
            m.set(k, i, F.v * p);
            p *= l;
        }
        p = field.one();
        for (std::size_t i = ng; i-- > 0;) {
            m.set(k, nf + i, -F.u * p);
            p *= l;
        }
    }
    return m;
}

std::vector<std::size_t> all_marks(const QPBundle& bundle) {
    std::vector<std::size_t> rows(bundle.marks().size());
    for (std::size_t j = 0; j < rows.size(); ++j) rows[j] = j;
    return rows;
}

std::pair<BinaryForm, BinaryForm> split_vector(Field field, const std::vector<FieldElement>& x, int df, int dg) {
    const std::size_t nf = coefficient_count(df);
    BinaryForm f = nf ? BinaryForm(field, std::vector<FieldElement>(x.begin(), x.begin() + static_cast<long>(nf)))
                      : BinaryForm::zero(field, df);
    BinaryForm g = x.size() > nf ? BinaryForm(field, std::vector<FieldElement>(x.begin() + static_cast<long>(nf), x.end()))
                                 : BinaryForm::zero(field, dg);
    return {std::move(f), std::move(g)};
}

std::vector<FieldElement> join_forms(const BinaryForm& f, const BinaryForm& g) {
    std::vector<FieldElement> out = f.coefficients();
    out.insert(out.end(), g.coefficients().begin(), g.coefficients().end());
    return out;
}

int ceil_half(int x) { return x >= 0 ? (x + 1) / 2 : -((-x) / 2); }

int require_genus(const QPBundle& bundle) {
    auto g = bundle.marks().genus();
    if (!g || *g < 2)
        throw std::invalid_argument("stability needs r = 2g + 1 marks with g >= 2, got r = " + std::to_string(bundle.marks().size()));
    return *g;
}

}  // namespace

MarkedLine::MarkedLine(std::vector<FieldElement> lambdas) : field_(Field::rationals()), lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw std::invalid_argument("no marks");
    field_ = lambdas_.front().field();
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
        if (lambdas_[i].field() != field_) throw FieldMismatch("marks over different fields");
        for (std::size_t j = 0; j < i; ++j)
            if (lambdas_[i] == lambdas_[j]) throw std::invalid_argument("repeated mark " + lambdas_[i].to_string());
    }
}

std::optional<int> MarkedLine::genus() const {
    if (lambdas_.size() % 2 == 0) return std::nullopt;
    return static_cast<int>((lambdas_.size() - 1) / 2);
}

bool operator==(const MarkedLine& a, const MarkedLine& b) { return a.field_ == b.field_ && a.lambdas_ == b.lambdas_; }

Flag Flag::normalized() const {
    if (v.is_zero()) return {u.field().one(), u.field().zero()};
    return {u / v, v.field().one()};
}

QPBundle::QPBundle(MarkedLine marks, int a, int b, std::vector<Flag> flags)
    : marks_(std::move(marks)), a_(a), b_(b), flags_(std::move(flags)) {
    if (a_ < b_) throw std::invalid_argument("splitting type needs a >= b, got a = " + std::to_string(a_) + ", b = " + std::to_string(b_));
    if (flags_.size() != marks_.size())
        throw std::invalid_argument(std::to_string(flags_.size()) + " flags for " + std::to_string(marks_.size()) + " marks");
    for (std::size_t j = 0; j < flags_.size(); ++j) {
        const Flag& F = flags_[j];
        if (F.u.field() != field() || F.v.field() != field()) throw FieldMismatch("flag " + std::to_string(j + 1) + " over a different field");
        if (F.u.is_zero() && F.v.is_zero()) throw std::invalid_argument("flag " + std::to_string(j + 1) + " is 0:0");
    }
}

bool operator==(const QPBundle& x, const QPBundle& y) {
    if (!(x.marks_ == y.marks_) || x.a_ != y.a_ || x.b_ != y.b_) return false;
    for (std::size_t j = 0; j < x.flags_.size(); ++j)
        if (!same_point(x.flags_[j], y.flags_[j])) return false;
    return true;
}

CoincidenceSet coincidence_set(const LineSubbundleWitness& w, const QPBundle& bundle) {
    if (w.f.field() != bundle.field() || w.g.field() != bundle.field()) throw FieldMismatch("witness and bundle over different fields");
    CoincidenceSet out;
    for (std::size_t j = 0; j < bundle.marks().size(); ++j) {
        const FieldElement& l = bundle.marks()[j];
        FieldElement fv = w.f.is_zero() ? bundle.field().zero() : w.f.evaluate_at(l);
        FieldElement gv = w.g.is_zero() ? bundle.field().zero() : w.g.evaluate_at(l);
        if (fv.is_zero() && gv.is_zero())
            out.vanishing.push_back(j);
        else if (bundle.flag(j).v * fv == bundle.flag(j).u * gv)
            out.marks.push_back(j);
    }
    return out;
}

LineSubbundleWitness saturate(const LineSubbundleWitness& w, const QPBundle& bundle) {
    BinaryForm h = binary_form_gcd(w.f, w.g);
    LineSubbundleWitness out{w.degree + h.degree(), divide_exact(w.f, h), divide_exact(w.g, h), true, {}};
    CoincidenceSet c = coincidence_set(out, bundle);
    if (!c.vanishing.empty()) throw std::logic_error("saturated subbundle still vanishes at a mark");
    out.coincidences = std::move(c.marks);
    return out;
}

bool violates_stability(std::size_t coincidences, int degree_v, int g, int line_degree) {
    const long long n = static_cast<long long>(coincidences);
    const long long bound = degree_v + g - 2LL * line_degree;
    // n < bound + 1/2, doubled to stay integral
    const bool stable_here = 2 * n < 2 * bound + 1;
    if (degree_v == 0) {
        const bool integral = n <= g - 2LL * line_degree;
        if (integral != stable_here) throw std::logic_error("stability inequalities disagree");
    }
    return !stable_here;
}

StabilityResult is_stable(const QPBundle& bundle) {
    const int g = require_genus(bundle);
    const int a = bundle.a(), b = bundle.b(), deg = bundle.degree();
    const std::size_t r = bundle.marks().size();
    const Field field = bundle.field();

    StabilityResult result;
    if (deg == 0 && 2 * a > g) {
        // O(a) itself; no coincidences are needed.
        LineSubbundleWitness w{a, BinaryForm::constant(field.one()), BinaryForm::zero(field, b - a), false, {}};
        result.stable = false;
        result.witness = saturate(w, bundle);
        return result;
    }

    for (int d = ceil_half(deg - g); d <= a; ++d) {
        const int m = std::max(0, deg + g - 2 * d + 1);
        if (static_cast<std::size_t>(m) > r) continue;
        const int df = a - d, dg = b - d;
        if (coefficient_count(df) + coefficient_count(dg) == 0) continue;
        // A nonzero solution (f, g) for (d, S) need not be saturated. With e the degree of
        // gcd(f, g), dividing out gives a subbundle of degree d + e that still meets F_j at
        // every j in S where the gcd does not vanish, so at least |S| - e >= m(d) - e marks.
        // The violating size drops by 2 per degree, m(d + e) = m(d) - 2e, hence the
        // saturated subbundle violates the inequality a fortiori. It is what we return.
        std::optional<LineSubbundleWitness> found;
        any_subset(r, static_cast<std::size_t>(m), [&](const std::vector<std::size_t>& S) {
            Matrix K = kernel_basis(interpolation_matrix(bundle, S, df, dg));
            if (K.rows() == 0) return false;
            auto [f, gg] = split_vector(field, K.row(0), df, dg);
            LineSubbundleWitness w = saturate(LineSubbundleWitness{d, std::move(f), std::move(gg), false, {}}, bundle);
            if (!violates_stability(w.coincidences.size(), deg, g, w.degree))
                throw std::logic_error("saturated witness does not violate stability");
            found = std::move(w);
            return true;
        });
        if (found) {
            result.stable = false;
            result.witness = std::move(found);
            return result;
        }
    }
    return result;
}

bool brute_force_stable(const QPBundle& bundle) {
    const int g = require_genus(bundle);
    const Field field = bundle.field();
    if (!field.is_finite()) throw std::invalid_argument("brute-force stability needs a finite field");
    const int a = bundle.a(), b = bundle.b(), deg = bundle.degree();
    const std::uint64_t q = field.size();

    for (int d = ceil_half(deg - g); d <= a; ++d) {
        const int df = a - d, dg = b - d;
        const std::size_t n = coefficient_count(df) + coefficient_count(dg);
        if (n == 0) continue;
        // projective points: leading 1 at position `lead`, arbitrary after it
        for (std::size_t lead = 0; lead < n; ++lead) {
            std::vector<std::uint64_t> digits(n - lead - 1, 0);
            while (true) {
                std::vector<FieldElement> x(n, field.zero());
                x[lead] = field.one();
                for (std::size_t i = 0; i < digits.size(); ++i) x[lead + 1 + i] = field.from_int(static_cast<long long>(digits[i]));
                auto [f, gg] = split_vector(field, x, df, dg);
                if (binary_form_gcd(f, gg).degree() == 0) {
                    LineSubbundleWitness w{d, f, gg, true, {}};
                    CoincidenceSet c = coincidence_set(w, bundle);
                    if (violates_stability(c.marks.size(), deg, g, d)) return false;
                }
                std::size_t i = 0;
                while (i < digits.size() && ++digits[i] == q) digits[i++] = 0;
                if (i == digits.size()) break;
            }
        }
    }
    return true;
}

QPBundle twist(const QPBundle& bundle, int k) { return QPBundle(bundle.marks(), bundle.a() + k, bundle.b() + k, bundle.flags()); }

ElementaryTransform elementary_transform(const QPBundle& bundle) {
    const Field field = bundle.field();
    const int a = bundle.a(), b = bundle.b();
    const int r = static_cast<int>(bundle.marks().size());
    const auto rows = all_marks(bundle);

    // Smallest twist with a nonzero section of V'(m).
    int m0 = -a;
    Matrix K0(field, 0, 0);
    for (;; ++m0) {
        if (m0 > r + 1) throw std::logic_error("no section found for the elementary transform");
        K0 = kernel_basis(interpolation_matrix(bundle, rows, a + m0, b + m0));
        if (K0.rows() > 0) break;
    }
    const int a1 = -m0;
    const int b1 = a + b - r - a1;
    if (b1 > a1) throw std::logic_error("elementary transform produced a < b");
    auto [f1, g1] = split_vector(field, K0.row(0), a - a1, b - a1);

    // Second generator: a section of V'(-b') outside s1 * (forms of degree a' - b').
    const int m2 = -b1, k = a1 - b1;
    Matrix K2 = kernel_basis(interpolation_matrix(bundle, rows, a + m2, b + m2));
    std::vector<FieldElement> span;
    std::size_t span_rows = 0;
    for (int i = 0; i <= k; ++i) {
        BinaryForm mono = BinaryForm::monomial(field, k, i);
        auto v = join_forms(f1 * mono, g1 * mono);
        span.insert(span.end(), v.begin(), v.end());
        ++span_rows;
    }
    const std::size_t width = coefficient_count(a + m2) + coefficient_count(b + m2);
    Matrix S(field, span_rows, width, span);
    const std::size_t base_rank = rank(S);
    std::optional<std::vector<FieldElement>> second;
    for (std::size_t i = 0; i < K2.rows() && !second; ++i) {
        Matrix with = S.stack(Matrix(field, 1, width, K2.row(i)));
        if (rank(with) > base_rank) second = K2.row(i);
    }
    if (!second) throw std::logic_error("second generator of the elementary transform not found");
    auto [f2, g2] = split_vector(field, *second, a - b1, b - b1);

    BinaryForm det = f1 * g2 - f2 * g1;
    BinaryForm P = BinaryForm::product_of_roots(field, bundle.marks().lambdas());
    const FieldElement c = det.coefficient(0);
    if (c.is_zero() || !(det == P.scaled(c))) throw std::logic_error("elementary transform generators do not span V'");

    std::vector<Flag> flags;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const FieldElement& l = bundle.marks()[j];
        auto at = [&](const BinaryForm& x) { return x.is_zero() ? field.zero() : x.evaluate_at(l); };
        Matrix Mj(field, 2, 2, {at(f1), at(f2), at(g1), at(g2)});
        Matrix ker = kernel_basis(Mj);
        if (ker.rows() != 1) throw std::logic_error("fiber map at mark " + std::to_string(j + 1) + " does not have rank one");
        flags.push_back(Flag{ker(0, 0), ker(0, 1)});
    }
    SectionMatrix inclusion{{{f1, f2}, {g1, g2}}};
    return {QPBundle(bundle.marks(), a1, b1, std::move(flags)), std::move(inclusion)};
}

RoundTripCheck check_round_trip(const QPBundle& bundle) {
    const Field field = bundle.field();
    const int r = static_cast<int>(bundle.marks().size());
    ElementaryTransform once = elementary_transform(bundle);
    ElementaryTransform twice = elementary_transform(once.bundle);
    RoundTripCheck out{twice.bundle};
    out.degree_shift_ok = once.bundle.degree() == bundle.degree() - r && twice.bundle.degree() == bundle.degree() - 2 * r;
    out.splitting_ok = twice.bundle.a() == bundle.a() - r && twice.bundle.b() == bundle.b() - r;
    if (!out.splitting_ok) return out;

    const SectionMatrix& M1 = once.inclusion;
    const SectionMatrix& M2 = twice.inclusion;
    SectionMatrix A = M1;
    const BinaryForm P = BinaryForm::product_of_roots(field, bundle.marks().lambdas());
    out.divisible = true;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            BinaryForm C = M1[i][0] * M2[0][k] + M1[i][1] * M2[1][k];
            try {
                A[i][k] = divide_exact(C, P);
            } catch (const std::domain_error&) {
                out.divisible = false;
            }
        }
    if (!out.divisible) return out;

    BinaryForm det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    out.automorphism = det.degree() == 0 && !det.is_zero();
    if (!out.automorphism) return out;

    out.flags_ok = true;
    for (std::size_t j = 0; j < bundle.marks().size(); ++j) {
        const FieldElement& l = bundle.marks()[j];
        auto at = [&](const BinaryForm& x) { return x.is_zero() ? field.zero() : x.evaluate_at(l); };
        const Flag& F2 = twice.bundle.flag(j);
        Flag image{at(A[0][0]) * F2.u + at(A[0][1]) * F2.v, at(A[1][0]) * F2.u + at(A[1][1]) * F2.v};
        if ((image.u.is_zero() && image.v.is_zero()) || !same_point(image, bundle.flag(j))) out.flags_ok = false;
    }
    return out;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

int parse_int(const std::string& token, const std::string& what) {
    int v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || p != token.data() + token.size() || token.empty())
        throw ParseError("invalid " + what + " '" + token + "'");
    return v;
}

FieldElement parse_element(const Field& field, const std::string& token) {
    try {
        return field.parse(token);
    } catch (const std::invalid_argument&) {
        throw ParseError("invalid field element '" + token + "'");
    }
}

}  // namespace

QPBundle parse_bundle(std::string_view text) {
    std::vector<std::string> lines;
    {
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (!line.empty()) lines.push_back(line);
        }
    }
    if (lines.size() != 3) throw ParseError("expected 3 lines (header, lambda, flags), found " + std::to_string(lines.size()));

    std::optional<int> g, a, b;
    std::optional<Field> field;
    {
        std::istringstream in(lines[0]);
        std::string tok;
        while (in >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw ParseError("header token '" + tok + "' is not key=value");
            std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
            if (key == "g") {
                g = parse_int(value, "genus");
                if (*g < 0) throw ParseError("invalid genus '" + value + "'");
            } else if (key == "a") {
                a = parse_int(value, "degree");
            } else if (key == "b") {
                b = parse_int(value, "degree");
            } else if (key == "q") {
                if (value == "Q") {
                    field = Field::rationals();
                } else {
                    int p = parse_int(value, "field");
                    try {
                        if (p < 0) throw std::invalid_argument("negative");
                        field = Field::prime(static_cast<std::uint64_t>(p));
                    } catch (const std::invalid_argument&) {
                        throw ParseError("invalid field 'q=" + value + "' (need Q or an odd prime)");
                    }
                }
            } else {
                throw ParseError("unknown header key '" + key + "'");
            }
        }
        if (!g) throw ParseError("header is missing 'g='");
        if (!field) throw ParseError("header is missing 'q='");
        if (!a) throw ParseError("header is missing 'a='");
        if (!b) throw ParseError("header is missing 'b='");
    }
    const std::size_t r = static_cast<std::size_t>(2 * *g + 1);

    auto body = [&](const std::string& line, const std::string& key) {
        if (line.rfind(key + ":", 0) != 0) throw ParseError("expected line starting with '" + key + ":', got '" + line + "'");
        return split_list(line.substr(key.size() + 1));
    };

    std::vector<FieldElement> lambdas;
    for (const auto& tok : body(lines[1], "lambda")) lambdas.push_back(parse_element(*field, tok));
    if (lambdas.size() != r)
        throw ParseError("lambda: " + std::to_string(lambdas.size()) + " marks, need 2g+1 = " + std::to_string(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (lambdas[i] == lambdas[j]) throw ParseError("repeated mark '" + lambdas[i].to_string() + "'");

    std::vector<Flag> flags;
    for (const auto& tok : body(lines[2], "flags")) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw ParseError("flag '" + tok + "' is not u:v");
        Flag F{parse_element(*field, trim(tok.substr(0, colon))), parse_element(*field, trim(tok.substr(colon + 1)))};
        if (F.u.is_zero() && F.v.is_zero()) throw ParseError("flag '" + tok + "' is the zero vector");
        flags.push_back(F);
    }
    if (flags.size() != r) throw ParseError("flags: " + std::to_string(flags.size()) + " flags, need " + std::to_string(r));
    if (*a < *b) throw ParseError("splitting 'a=" + std::to_string(*a) + "' is smaller than 'b=" + std::to_string(*b) + "'");
    return QPBundle(MarkedLine(std::move(lambdas)), *a, *b, std::move(flags));
}

std::string serialize_bundle(const QPBundle& bundle) {
    auto g = bundle.marks().genus();
    if (!g) throw std::invalid_argument("serialization needs an odd number of marks");
    std::string out = "g=" + std::to_string(*g) + " q=" + bundle.field().name() + " a=" + std::to_string(bundle.a()) +
                      " b=" + std::to_string(bundle.b()) + "\nlambda: ";
    for (std::size_t j = 0; j < bundle.marks().size(); ++j) out += (j ? ", " : "") + bundle.marks()[j].to_string();
    out += "\nflags: ";
    for (std::size_t j = 0; j < bundle.flags().size(); ++j)
        out += (j ? ", " : "") + bundle.flag(j).u.to_string() + ":" + bundle.flag(j).v.to_string();
    out += "\n";
    return out;
}

std::string describe(const LineSubbundleWitness& w) {
    std::string out = "O(" + std::to_string(w.degree) + ") via (" + w.f.to_string() + ", " + w.g.to_string() + "), meets flags at {";
    for (std::size_t i = 0; i < w.coincidences.size(); ++i) out += (i ? "," : "") + std::to_string(w.coincidences[i] + 1);
    return out + "}";
}

}  // namespace qpencil
