#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qpencil/binary_form.hpp"

namespace qpencil {

/// Marks p_j = (lambda_j : 1) on P^1, pairwise distinct. Marks at infinity are
/// not representable.
class MarkedLine {
public:
    explicit MarkedLine(std::vector<FieldElement> lambdas);

    Field field() const { return field_; }
    std::size_t size() const { return lambdas_.size(); }
    const std::vector<FieldElement>& lambdas() const { return lambdas_; }
    const FieldElement& operator[](std::size_t j) const { return lambdas_[j]; }
    /// g with r = 2g + 1, when the mark count is odd.
    std::optional<int> genus() const;

    friend bool operator==(const MarkedLine& a, const MarkedLine& b);

private:
    Field field_;
    std::vector<FieldElement> lambdas_;
};

/// A point (u : v) of P^1: the line spanned by u e_1 + v e_2 in the fiber, where
/// e_1 generates O(a) and e_2 generates O(b) (trivialized at t = 1).
struct Flag {
    FieldElement u;
    FieldElement v;

    /// (u/v : 1), or (1 : 0).
    Flag normalized() const;
    friend bool same_point(const Flag& x, const Flag& y) { return x.u * y.v == x.v * y.u; }
};

/// Rank-2 quasiparabolic bundle (O(a) + O(b), F_1, ..., F_r) on the marked line, a >= b.
class QPBundle {
public:
    QPBundle(MarkedLine marks, int a, int b, std::vector<Flag> flags);

    const MarkedLine& marks() const { return marks_; }
    Field field() const { return marks_.field(); }
    int a() const { return a_; }
    int b() const { return b_; }
    int degree() const { return a_ + b_; }
    const std::vector<Flag>& flags() const { return flags_; }
    const Flag& flag(std::size_t j) const { return flags_[j]; }

    /// Same marks and splitting, flags equal as points of P^1.
    friend bool operator==(const QPBundle& x, const QPBundle& y);

private:
    MarkedLine marks_;
    int a_;
    int b_;
    std::vector<Flag> flags_;
};

/// A line subbundle O(degree) -> O(a) + O(b) given by (f, g) with deg f = a - degree,
/// deg g = b - degree (a negative degree means that component is the zero form).
struct LineSubbundleWitness {
    int degree = 0;
    BinaryForm f;
    BinaryForm g;
    bool saturated = false;
    /// Marks (0-based) where the subbundle meets the flag.
    std::vector<std::size_t> coincidences;
};

struct CoincidenceSet {
    std::vector<std::size_t> marks;
    /// Marks where f and g both vanish; only possible for non-saturated pairs.
    std::vector<std::size_t> vanishing;
};

CoincidenceSet coincidence_set(const LineSubbundleWitness& w, const QPBundle& bundle);

/// Divides out gcd(f, g); the degree goes up by the degree of the gcd.
LineSubbundleWitness saturate(const LineSubbundleWitness& w, const QPBundle& bundle);

/// Whether a line subbundle of the given degree meeting the flags `coincidences`
/// times violates  #{j : L_pj = F_j} < deg V + g - 2 deg L + 1/2.  For deg V = 0
/// the integer form  # <= g - 2 deg L  is evaluated too and must agree.
bool violates_stability(std::size_t coincidences, int degree_v, int g, int line_degree);

struct StabilityResult {
    bool stable = true;
    /// Saturated destabilizing subbundle, present iff !stable.
    std::optional<LineSubbundleWitness> witness;
};

/// Decides stability for weights {0, 1/2} by linear algebra over (degree, mark subset)
/// pairs; deterministic (the first violating pair in increasing degree, then
/// lexicographic subset order). Requires r = 2g + 1 marks with g >= 2.
StabilityResult is_stable(const QPBundle& bundle);

/// Oracle: enumerates every coprime (f, g) up to scalar over F_q for each candidate degree.
bool brute_force_stable(const QPBundle& bundle);

/// (a + k, b + k), flags unchanged.
QPBundle twist(const QPBundle& bundle, int k);

/// Columns are the two generating sections of the new bundle, written in the
/// coordinates of the old one; entry [i][k] is component i of section k.
using SectionMatrix = std::array<std::array<BinaryForm, 2>, 2>;

struct ElementaryTransform {
    QPBundle bundle;
    SectionMatrix inclusion;
};

/// V' = sections of V whose value at each p_j lies in F_j, with F'_j = ker(V'_pj -> V_pj).
/// Throws std::logic_error if the construction cannot be completed (a defect).
ElementaryTransform elementary_transform(const QPBundle& bundle);

struct RoundTripCheck {
    QPBundle twice;
    bool degree_shift_ok = false;   // deg V' = deg V - r
    bool splitting_ok = false;      // V'' = O(a - r) + O(b - r)
    bool divisible = false;         // V'' -> V is prod(s - lambda_j t) times a map A
    bool automorphism = false;      // A is an automorphism of O(a) + O(b)
    bool flags_ok = false;          // A carries F''_j to F_j
    bool passed() const { return degree_shift_ok && splitting_ok && divisible && automorphism && flags_ok; }
};

/// Applies the transform twice and compares with twist(bundle, -r) through the
/// explicit composite inclusion.
RoundTripCheck check_round_trip(const QPBundle& bundle);

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Three lines: "g=<g> q=<p|Q> a=<a> b=<b>", "lambda: l_1, ..., l_r", "flags: u_1:v_1, ..., u_r:v_r".
/// Blank lines and '#' comments are ignored. Every error names the offending token.
QPBundle parse_bundle(std::string_view text);
std::string serialize_bundle(const QPBundle& bundle);

std::string describe(const LineSubbundleWitness& w);

}  // namespace qpencil
