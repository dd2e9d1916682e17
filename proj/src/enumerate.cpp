#include "qpencil/enumerate.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace qpencil {

namespace {

// Arithmetic in F_p on machine words, with square-root and inverse tables.
struct PrimeField {
    explicit PrimeField(std::uint32_t modulus) : p(modulus), inv(modulus, 0), root(modulus, -1) {
        for (std::uint64_t x = 0; x < p; ++x) {
            auto sq = static_cast<std::uint32_t>(x * x % p);
            if (root[sq] < 0) root[sq] = static_cast<std::int64_t>(x);
        }
        inv[1] = 1;
        for (std::uint64_t x = 2; x < p; ++x) inv[x] = static_cast<std::uint32_t>((p - (p / x) * inv[p % x] % p) % p);
    }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        std::uint64_t s = std::uint64_t{a} + b;
        return static_cast<std::uint32_t>(s >= p ? s - p : s);
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return a >= b ? a - b : a + p - b; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return static_cast<std::uint32_t>(std::uint64_t{a} * b % p); }
    std::uint32_t neg(std::uint32_t a) const { return a ? p - a : 0; }

    std::uint32_t p;
    std::vector<std::uint32_t> inv;
    std::vector<std::int64_t> root;  // some square root, or -1
};

using Vec = std::vector<std::uint32_t>;

// Dense row-major matrix mod p, rows x cols.
struct ModMatrix {
    std::size_t rows = 0, cols = 0;
    Vec a;
    std::uint32_t& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    std::uint32_t at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// In-place RREF; returns pivot columns.
std::vector<std::size_t> rref_mod(ModMatrix& m, const PrimeField& F) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t piv = r;
        while (piv < m.rows && m.at(piv, c) == 0) ++piv;
        if (piv == m.rows) continue;
        if (piv != r)
            for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
        std::uint32_t inv = F.inv[m.at(r, c)];
        for (std::size_t j = c; j < m.cols; ++j) m.at(r, j) = F.mul(m.at(r, j), inv);
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            std::uint32_t f = m.at(i, c);
            for (std::size_t j = c; j < m.cols; ++j) m.at(i, j) = F.sub(m.at(i, j), F.mul(f, m.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    m.rows = r;
    m.a.resize(r * m.cols);
    return pivots;
}

ModMatrix kernel_mod(ModMatrix m, const PrimeField& F) {
    const std::size_t cols = m.cols;
    auto pivots = rref_mod(m, F);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    ModMatrix k{0, cols, {}};
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        Vec v(cols, 0);
        v[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = F.neg(m.at(i, f));
        k.a.insert(k.a.end(), v.begin(), v.end());
        ++k.rows;
    }
    return k;
}

struct Problem {
    PrimeField F;
    std::size_t n;  // N + 1
    std::size_t r;
    Vec A, B;       // n x n Gram matrices
    unsigned key_width;
};

std::uint32_t quad(const Vec& M, std::size_t n, const std::uint32_t* x, const PrimeField& F) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!x[i]) continue;
        std::uint64_t row = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (x[j]) row = (row + std::uint64_t{M[i * n + j]} * x[j]) % F.p;
        acc = (acc + row * x[i]) % F.p;
    }
    return static_cast<std::uint32_t>(acc);
}

// All projective y in P^(c-1) with y^T Aq y = y^T Bq y = 0, normalized with the
// leading nonzero coordinate 1. Solves the first form for the last coordinate.
template <class Emit>
void quotient_points(const Vec& Aq, const Vec& Bq, std::size_t c, const PrimeField& F, Emit&& emit) {
    if (c == 0) return;
    const std::uint32_t p = F.p;
    Vec y(c, 0);
    const std::size_t last = c - 1;
    auto check_emit = [&] {
        if (quad(Bq, c, y.data(), F) == 0) emit(y);
    };
    for (std::size_t lead = 0; lead < c; ++lead) {
        std::fill(y.begin(), y.end(), 0);
        y[lead] = 1;
        if (lead == last) {
            if (quad(Aq, c, y.data(), F) == 0) check_emit();
            continue;
        }
        const std::uint32_t alpha = Aq[last * c + last];
        const std::size_t nfree = last - lead - 1;  // coordinates lead+1 .. last-1
        while (true) {
            std::uint64_t beta = 0, gamma = 0;
            for (std::size_t i = lead; i < last; ++i) {
                if (!y[i]) continue;
                beta = (beta + std::uint64_t{Aq[i * c + last]} * y[i]) % p;
                std::uint64_t row = 0;
                for (std::size_t j = lead; j < last; ++j)
                    if (y[j]) row = (row + std::uint64_t{Aq[i * c + j]} * y[j]) % p;
                gamma = (gamma + row * y[i]) % p;
            }
            beta = 2 * beta % p;
            const auto b = static_cast<std::uint32_t>(beta);
            const auto g = static_cast<std::uint32_t>(gamma);
            if (alpha != 0) {
                std::uint32_t disc = F.sub(F.mul(b, b), F.mul(4 % p, F.mul(alpha, g)));
                if (F.root[disc] >= 0) {
                    const auto sq = static_cast<std::uint32_t>(F.root[disc]);
                    const std::uint32_t inv2a = F.inv[F.mul(2, alpha)];
                    const std::uint32_t r1 = F.mul(F.add(F.neg(b), sq), inv2a);
                    const std::uint32_t r2 = F.mul(F.sub(F.neg(b), sq), inv2a);
                    y[last] = r1;
                    check_emit();
                    if (r2 != r1) {
                        y[last] = r2;
                        check_emit();
                    }
                }
            } else if (b != 0) {
                y[last] = F.mul(F.neg(g), F.inv[b]);
                check_emit();
            } else if (g == 0) {
                for (std::uint32_t z = 0; z < p; ++z) {
                    y[last] = z;
                    check_emit();
                }
            }
            y[last] = 0;
            // odometer over the free block
            std::size_t k = 0;
            while (k < nfree) {
                std::size_t idx = lead + 1 + k;
                if (++y[idx] < p) break;
                y[idx] = 0;
                ++k;
            }
            if (k == nfree) break;
        }
    }
}

std::string encode(const Vec& entries, unsigned width) {
    std::string key;
    key.reserve(entries.size() * width);
    for (std::uint32_t v : entries)
        for (unsigned b = width; b-- > 0;) key.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    return key;
}

Vec decode(const std::string& key, unsigned width) {
    Vec out(key.size() / width, 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t v = 0;
        for (unsigned b = 0; b < width; ++b) v = (v << 8) | static_cast<unsigned char>(key[i * width + b]);
        out[i] = v;
    }
    return out;
}

class Searcher {
public:
    explicit Searcher(const Problem& pr) : pr_(pr), visited_(pr.r + 1) {}

    // S: (k+1) x n echelon rows of an isotropic subspace inside the depth-k flag member.
    void extend(const ModMatrix& S, std::size_t k) {
        if (k == pr_.r) return;
        const auto& F = pr_.F;
        const std::size_t n = pr_.n;
        // Constraints: polarity against S for both forms, plus x_0..x_(r-k-2) = 0.
        const std::size_t coord = pr_.r >= k + 2 ? pr_.r - k - 1 : 0;
        ModMatrix C{0, n, {}};
        for (std::size_t i = 0; i < S.rows; ++i)
            for (const Vec* G : {&pr_.A, &pr_.B}) {
                for (std::size_t j = 0; j < n; ++j) {
                    std::uint64_t acc = 0;
                    for (std::size_t l = 0; l < n; ++l) acc = (acc + std::uint64_t{S.at(i, l)} * (*G)[l * n + j]) % F.p;
                    C.a.push_back(static_cast<std::uint32_t>(acc));
                }
                ++C.rows;
            }
        for (std::size_t j = 0; j < coord; ++j) {
            Vec e(n, 0);
            e[j] = 1;
            C.a.insert(C.a.end(), e.begin(), e.end());
            ++C.rows;
        }
        ModMatrix W = kernel_mod(C, F);
        // Complement of S inside W: greedily keep W vectors that raise the rank.
        ModMatrix span = S;
        ModMatrix comp{0, n, {}};
        for (std::size_t i = 0; i < W.rows; ++i) {
            ModMatrix trial = span;
            trial.a.insert(trial.a.end(), W.a.begin() + i * n, W.a.begin() + (i + 1) * n);
            ++trial.rows;
            const std::size_t before = span.rows;
            rref_mod(trial, F);
            if (trial.rows > before) {
                span = std::move(trial);
                comp.a.insert(comp.a.end(), W.a.begin() + i * n, W.a.begin() + (i + 1) * n);
                ++comp.rows;
            }
        }
        const std::size_t c = comp.rows;
        Vec Aq = restrict_form(pr_.A, comp), Bq = restrict_form(pr_.B, comp);
        quotient_points(Aq, Bq, c, F, [&](const Vec& y) {
            ModMatrix T = S;
            for (std::size_t j = 0; j < n; ++j) {
                std::uint64_t acc = 0;
                for (std::size_t i = 0; i < c; ++i) acc = (acc + std::uint64_t{y[i]} * comp.at(i, j)) % F.p;
                T.a.push_back(static_cast<std::uint32_t>(acc));
            }
            ++T.rows;
            rref_mod(T, F);
            if (visited_[k + 1].insert(encode(T.a, pr_.key_width)).second) extend(T, k + 1);
        });
    }

    void add_root(const Vec& point) {
        ModMatrix S{1, pr_.n, point};
        if (visited_[0].insert(encode(point, pr_.key_width)).second) extend(S, 0);
    }

    std::unordered_set<std::string>& results() { return visited_[pr_.r]; }

private:
    Vec restrict_form(const Vec& G, const ModMatrix& comp) const {
        const auto& F = pr_.F;
        const std::size_t n = pr_.n, c = comp.rows;
        Vec GC(c * n, 0);  // comp * G
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::uint64_t acc = 0;
                for (std::size_t l = 0; l < n; ++l) acc = (acc + std::uint64_t{comp.at(i, l)} * G[l * n + j]) % F.p;
                GC[i * n + j] = static_cast<std::uint32_t>(acc);
            }
        Vec out(c * c, 0);
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                std::uint64_t acc = 0;
                for (std::size_t l = 0; l < n; ++l) acc = (acc + std::uint64_t{GC[i * n + l]} * comp.at(j, l)) % F.p;
                out[i * c + j] = static_cast<std::uint32_t>(acc);
            }
        return out;
    }

    const Problem& pr_;
    std::vector<std::unordered_set<std::string>> visited_;
};

Problem make_problem(const QuadricPencil& pencil, std::size_t r) {
    const Field f = pencil.field();
    if (!f.is_finite()) throw std::invalid_argument("subspace enumeration needs a finite field");
    const std::size_t n = pencil.ambient_dimension() + 1;
    auto pack = [&](const Matrix& m) {
        Vec v(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v[i * n + j] = static_cast<std::uint32_t>(m(i, j).residue_value());
        return v;
    };
    if (f.size() > (1u << 20)) throw std::invalid_argument("field too large for exhaustive enumeration: " + f.name());
    const auto p = static_cast<std::uint32_t>(f.size());
    unsigned width = p <= 256 ? 1 : p <= 65536 ? 2 : 4;
    return Problem{PrimeField(p), n, r, pack(pencil.first().gram()), pack(pencil.second().gram()), width};
}

}  // namespace

SubspaceList::SubspaceList(Field field, std::size_t dimension, std::size_t ambient_dimension)
    : field_(field), r_(dimension), n_(ambient_dimension + 1) {}

LinearSubspace SubspaceList::at(std::size_t i) const {
    auto raw_entries = raw(i);
    std::vector<FieldElement> e;
    e.reserve(raw_entries.size());
    for (auto v : raw_entries) e.push_back(field_.from_int(v));
    return LinearSubspace(Matrix(field_, r_ + 1, n_, std::move(e)));
}

std::vector<LinearSubspace> SubspaceList::materialize() const {
    std::vector<LinearSubspace> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i));
    return out;
}

void SubspaceList::push_back(std::span<const std::uint32_t> echelon_entries) {
    if (echelon_entries.size() != stride()) throw std::invalid_argument("packed subspace of the wrong size");
    data_.insert(data_.end(), echelon_entries.begin(), echelon_entries.end());
}

SubspaceList enumerate_subspaces(const QuadricPencil& pencil, std::size_t r, const EnumerationOptions& options) {
    const std::size_t N = pencil.ambient_dimension();
    if (r >= N) throw std::invalid_argument("subspace dimension " + std::to_string(r) + " must be below N = " + std::to_string(N));
    const Problem pr = make_problem(pencil, r);
    const std::size_t n = pr.n;

    // Roots: points of the base locus inside x_0 = ... = x_(r-1) = 0.
    std::vector<Vec> roots;
    {
        const std::size_t c = n - r;
        Vec Aq(c * c), Bq(c * c);
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                Aq[i * c + j] = pr.A[(i + r) * n + (j + r)];
                Bq[i * c + j] = pr.B[(i + r) * n + (j + r)];
            }
        quotient_points(Aq, Bq, c, pr.F, [&](const Vec& y) {
            Vec pt(n, 0);
            std::copy(y.begin(), y.end(), pt.begin() + static_cast<std::ptrdiff_t>(r));
            roots.push_back(std::move(pt));
        });
        std::sort(roots.begin(), roots.end());
    }

    const unsigned workers = std::max(1u, options.workers);
    std::vector<std::unordered_set<std::string>> partial(workers);
    auto run = [&](unsigned w) {
        Searcher s(pr);
        for (std::size_t i = w; i < roots.size(); i += workers) s.add_root(roots[i]);
        partial[w] = std::move(s.results());
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    std::vector<std::string> keys;
    for (auto& part : partial) keys.insert(keys.end(), part.begin(), part.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    SubspaceList out(pencil.field(), r, N);
    for (const auto& k : keys) out.push_back(decode(k, pr.key_width));
    return out;
}

std::uint64_t count_points(const QuadricPencil& pencil, const EnumerationOptions& options) {
    const Problem pr = make_problem(pencil, 0);
    const std::size_t n = pr.n;
    const std::uint32_t p = pr.F.p;
    const unsigned workers = std::max(1u, options.workers);
    std::vector<std::uint64_t> counts(workers, 0);
    // Work unit: (lead index, value of the coordinate right after it).
    auto run = [&](unsigned w) {
        Vec x(n, 0);
        std::uint64_t unit = 0;
        for (std::size_t lead = 0; lead < n; ++lead) {
            const std::uint32_t top = lead + 1 < n ? p : 1;
            for (std::uint32_t v = 0; v < top; ++v, ++unit) {
                if (unit % workers != w) continue;
                std::fill(x.begin(), x.end(), 0);
                x[lead] = 1;
                if (lead + 1 < n) x[lead + 1] = v;
                const std::size_t first_free = lead + 2;
                while (true) {
                    if (quad(pr.A, n, x.data(), pr.F) == 0 && quad(pr.B, n, x.data(), pr.F) == 0) ++counts[w];
                    std::size_t k = first_free;
                    while (k < n) {
                        if (++x[k] < p) break;
                        x[k] = 0;
                        ++k;
                    }
                    if (k >= n) break;
                }
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
}

void write_subspaces_text(const SubspaceList& list, std::ostream& os) {
    os << "r=" << list.dimension() << " N=" << list.ambient_dimension() << " q=" << list.field().name() << '\n';
    const std::size_t n = list.ambient_dimension() + 1;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto e = list.raw(i);
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (k) os << (k % n == 0 ? ';' : ' ');
            os << e[k];
        }
        os << '\n';
    }
}

nlohmann::json subspaces_to_json(const SubspaceList& list) {
    nlohmann::json subspaces = nlohmann::json::array();
    const std::size_t n = list.ambient_dimension() + 1;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto e = list.raw(i);
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t k = 0; k < e.size(); k += n) rows.push_back(std::vector<std::uint32_t>(e.begin() + k, e.begin() + k + n));
        subspaces.push_back(std::move(rows));
    }
    return {{"r", list.dimension()}, {"N", list.ambient_dimension()}, {"q", list.field().size()},
            {"count", list.size()}, {"subspaces", std::move(subspaces)}};
}

FixedLocusComparison compare_fixed_locus(const std::vector<FieldElement>& lambdas, const FieldElement& extra, std::size_t r,
                                         const EnumerationOptions& options) {
    const SubspaceList lifted = enumerate_subspaces(lifted_pencil(lambdas, extra), r, options);
    const SubspaceList direct = enumerate_subspaces(pencil_from_marks(lambdas), r, options);
    const Field field = extra.field();
    std::vector<FieldElement> pole(lambdas.size() + 1, field.zero());
    pole.back() = field.one();

    FixedLocusComparison out;
    out.lifted = lifted.size();
    out.direct = direct.size();
    std::vector<LinearSubspace> fixed, inside;
    for (const auto& l : lifted.materialize()) {
        if (involution_fixed(l)) fixed.push_back(l);
        const Matrix& b = l.basis();
        bool in_h = true;
        for (std::size_t i = 0; i < b.rows(); ++i) in_h = in_h && b(i, b.cols() - 1).is_zero();
        if (in_h) inside.push_back(l);
        if (l.contains_point(pole)) ++out.through_pole;
    }
    out.fixed = fixed.size();
    out.in_hyperplane = inside.size();
    out.fixed_equals_hyperplane = fixed == inside;
    if (out.fixed_equals_hyperplane) {
        std::vector<LinearSubspace> restricted = restrict_to_hyperplane(inside);
        std::sort(restricted.begin(), restricted.end());
        out.restriction_equals_direct = restricted == direct.materialize();
    }
    return out;
}

}  // namespace qpencil
