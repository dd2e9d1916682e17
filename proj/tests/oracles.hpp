#pragma once

// Independent reference computations for the tests. Plain integer arithmetic
// mod q, no use of the library's field, matrix or enumeration code.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "qpencil/quadric.hpp"
#include "qpencil/quasiparabolic.hpp"

namespace oracle {

using Vec = std::vector<std::int64_t>;

inline std::int64_t mod(std::int64_t x, std::int64_t q) { return ((x % q) + q) % q; }

inline std::int64_t inv(std::int64_t x, std::int64_t q) {
    std::int64_t r = 1, b = mod(x, q), e = q - 2;
    while (e) {
        if (e & 1) r = r * b % q;
        b = b * b % q;
        e >>= 1;
    }
    return r;
}

/// Every point of P^(n-1)(F_q), first nonzero coordinate 1.
inline std::vector<Vec> projective_points(std::int64_t q, std::size_t n) {
    std::vector<Vec> out;
    for (std::size_t lead = 0; lead < n; ++lead) {
        Vec x(n, 0);
        x[lead] = 1;
        while (true) {
            out.push_back(x);
            std::size_t i = lead + 1;
            while (i < n && ++x[i] == q) x[i++] = 0;
            if (i == n) break;
        }
    }
    return out;
}

/// sum_i c_i x_i y_i mod q
inline std::int64_t diag_pair(const Vec& c, const Vec& x, const Vec& y, std::int64_t q) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s = (s + c[i] * x[i] % q * y[i]) % q;
    return s;
}

inline bool in_both(const Vec& lambda, const Vec& x, const Vec& y, std::int64_t q) {
    Vec ones(lambda.size(), 1);
    return diag_pair(ones, x, y, q) == 0 && diag_pair(lambda, x, y, q) == 0;
}

inline std::vector<Vec> base_locus_points(const Vec& lambda, std::int64_t q) {
    std::vector<Vec> out;
    for (const auto& x : projective_points(q, lambda.size()))
        if (in_both(lambda, x, x, q)) out.push_back(x);
    return out;
}

/// Reduced row echelon form mod q, zero rows dropped, flattened.
inline Vec rref_key(std::vector<Vec> rows, std::int64_t q) {
    const std::size_t n = rows.empty() ? 0 : rows[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && mod(rows[p][c], q) == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        std::int64_t iv = inv(rows[r][c], q);
        for (auto& v : rows[r]) v = mod(v * iv, q);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r) continue;
            std::int64_t f = mod(rows[i][c], q);
            if (!f) continue;
            for (std::size_t j = 0; j < n; ++j) rows[i][j] = mod(rows[i][j] - f * rows[r][j], q);
        }
        ++r;
    }
    Vec key;
    for (std::size_t i = 0; i < r; ++i) key.insert(key.end(), rows[i].begin(), rows[i].end());
    return key;
}

/// All r-dimensional subspaces of P^(n-1)(F_q) as RREF keys: every choice of
/// pivot columns with every filling of the free entries.
template <class Fn>
void for_each_grassmannian_point(std::int64_t q, std::size_t n, std::size_t r, Fn&& fn) {
    const std::size_t k = r + 1;
    std::vector<std::size_t> piv(k);
    std::iota(piv.begin(), piv.end(), 0);
    while (true) {
        // free slots: (row i, column j) with j > piv[i], j not a pivot
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = piv[i] + 1; j < n; ++j)
                if (std::find(piv.begin(), piv.end(), j) == piv.end()) slots.emplace_back(i, j);
        Vec digits(slots.size(), 0);
        while (true) {
            std::vector<Vec> rows(k, Vec(n, 0));
            for (std::size_t i = 0; i < k; ++i) rows[i][piv[i]] = 1;
            for (std::size_t s = 0; s < slots.size(); ++s) rows[slots[s].first][slots[s].second] = digits[s];
            fn(rows);
            std::size_t s = 0;
            while (s < digits.size() && ++digits[s] == q) digits[s++] = 0;
            if (s == digits.size()) break;
        }
        std::size_t i = k;
        while (i > 0 && piv[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++piv[i - 1];
        for (std::size_t j = i; j < k; ++j) piv[j] = piv[j - 1] + 1;
    }
}

/// Subspaces of the base locus by scanning the whole Grassmannian.
inline std::set<Vec> scan_subspaces(const Vec& lambda, std::int64_t q, std::size_t r) {
    std::set<Vec> out;
    for_each_grassmannian_point(q, lambda.size(), r, [&](const std::vector<Vec>& rows) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = i; j < rows.size(); ++j)
                if (!in_both(lambda, rows[i], rows[j], q)) return;
        out.insert(rref_key(rows, q));
    });
    return out;
}

/// Subspaces of the base locus built from mutually orthogonal base-locus points:
/// lines from pairs, planes from lines plus one more point.
inline std::set<Vec> lines_from_points(const Vec& lambda, std::int64_t q) {
    auto pts = base_locus_points(lambda, q);
    std::set<Vec> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (in_both(lambda, pts[i], pts[j], q)) out.insert(rref_key({pts[i], pts[j]}, q));
    return out;
}

inline std::set<Vec> planes_from_lines(const Vec& lambda, std::int64_t q) {
    auto pts = base_locus_points(lambda, q);
    const std::size_t n = lambda.size();
    std::set<Vec> out;
    for (const auto& key : lines_from_points(lambda, q)) {
        Vec a(key.begin(), key.begin() + static_cast<long>(n)), b(key.begin() + static_cast<long>(n), key.end());
        for (const auto& p : pts) {
            if (!in_both(lambda, a, p, q) || !in_both(lambda, b, p, q)) continue;
            Vec k3 = rref_key({a, b, p}, q);
            if (k3.size() == 3 * n) out.insert(k3);
        }
    }
    return out;
}

inline Vec key_of(const qpencil::LinearSubspace& s) {
    Vec key;
    for (const auto& x : s.basis().entries()) key.push_back(static_cast<std::int64_t>(x.residue_value()));
    return key;
}

/// Union-find over all flag tuples (codes 0..q, q = infinity) of the stable
/// bundles of splitting (a, -a), joined along generators of the automorphism group.
inline std::uint64_t orbit_count_union_find(int g, std::int64_t q, int a, const Vec& lambda) {
    using namespace qpencil;
    const std::size_t r = static_cast<std::size_t>(2 * g + 1);
    const Field field = Field::prime(static_cast<std::uint64_t>(q));
    std::vector<FieldElement> lam;
    for (auto l : lambda) lam.push_back(field.from_int(l));
    MarkedLine marks(lam);

    std::size_t total = 1;
    for (std::size_t i = 0; i < r; ++i) total *= static_cast<std::size_t>(q + 1);
    auto decode = [&](std::size_t code) {
        Vec t(r);
        for (std::size_t i = 0; i < r; ++i) {
            t[i] = static_cast<std::int64_t>(code % static_cast<std::size_t>(q + 1));
            code /= static_cast<std::size_t>(q + 1);
        }
        return t;
    };
    auto encode = [&](const Vec& t) {
        std::size_t code = 0;
        for (std::size_t i = r; i-- > 0;) code = code * static_cast<std::size_t>(q + 1) + static_cast<std::size_t>(t[i]);
        return code;
    };

    std::vector<char> stable(total, 0);
    for (std::size_t c = 0; c < total; ++c) {
        Vec t = decode(c);
        std::vector<Flag> flags;
        for (auto v : t) flags.push_back(v == q ? Flag{field.one(), field.zero()} : Flag{field.from_int(v), field.one()});
        stable[c] = is_stable(QPBundle(marks, a, -a, flags)).stable;
    }

    // generators as maps on P^1 codes, possibly depending on the mark
    std::int64_t prim = 2;
    while (true) {
        std::int64_t x = prim, ord = 1;
        while (x != 1) {
            x = x * prim % q;
            ++ord;
        }
        if (ord == q - 1) break;
        ++prim;
    }
    using Gen = std::function<std::int64_t(std::int64_t, std::size_t)>;
    std::vector<Gen> gens;
    if (a == 0) {
        gens.push_back([q](std::int64_t x, std::size_t) { return x == q ? q : (x + 1) % q; });
        gens.push_back([q, prim](std::int64_t x, std::size_t) { return x == q ? q : x * prim % q; });
        gens.push_back([q](std::int64_t x, std::size_t) { return x == q ? 0 : x == 0 ? q : inv(x, q); });
    } else {
        gens.push_back([q, prim](std::int64_t x, std::size_t) { return x == q ? q : x * prim % q; });
        for (int k = 0; k <= 2 * a; ++k)
            gens.push_back([q, k, &lambda](std::int64_t x, std::size_t j) {
                if (x == q) return q;
                std::int64_t p = 1;
                for (int e = 0; e < k; ++e) p = p * mod(lambda[j], q) % q;
                return (x + p) % q;
            });
    }

    std::vector<std::size_t> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t c = 0; c < total; ++c) {
        if (!stable[c]) continue;
        Vec t = decode(c);
        for (const auto& gen : gens) {
            Vec u(r);
            for (std::size_t j = 0; j < r; ++j) u[j] = gen(t[j], j);
            std::size_t d = encode(u);
            if (!stable[d]) throw std::logic_error("group action does not preserve stability");
            parent[find(c)] = find(d);
        }
    }
    std::uint64_t orbits = 0;
    for (std::size_t c = 0; c < total; ++c)
        if (stable[c] && find(c) == c) ++orbits;
    return orbits;
}

/// Random bundle with distinct marks drawn from the field (0..bound-1 over Q).
inline qpencil::QPBundle random_bundle(std::mt19937_64& rng, const qpencil::Field& field, int g, int a_min, int a_max, int degree) {
    using namespace qpencil;
    const std::size_t r = static_cast<std::size_t>(2 * g + 1);
    const std::int64_t range = field.is_finite() ? static_cast<std::int64_t>(field.size()) : 41;
    const std::int64_t offset = field.is_finite() ? 0 : -20;
    std::vector<FieldElement> lam;
    while (lam.size() < r) {
        FieldElement x = field.from_int(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(range)) + offset);
        if (std::none_of(lam.begin(), lam.end(), [&](const FieldElement& y) { return y == x; })) lam.push_back(x);
    }
    std::uniform_int_distribution<int> da(a_min, a_max);
    int a = da(rng);
    int b = degree - a;
    if (a < b) std::swap(a, b);
    std::vector<Flag> flags;
    for (std::size_t j = 0; j < r; ++j) {
        FieldElement u = field.from_int(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(range)) + offset);
        FieldElement v = field.from_int(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(range)) + offset);
        if (u.is_zero() && v.is_zero()) v = field.one();
        flags.push_back({u, v});
    }
    return QPBundle(MarkedLine(lam), a, b, flags);
}

}  // namespace oracle
