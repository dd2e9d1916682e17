#include "qpencil/census.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qpencil/enumerate.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/quadric.hpp"

namespace qpencil {

namespace {

// Runs body(i) for i in [0, n) on up to `workers` threads, stride-partitioned.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i, 0u);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i, w);
        });
    for (auto& t : pool) t.join();
}

void check_marks(int g, const std::vector<FieldElement>& lambdas) {
    if (g < 2) throw std::invalid_argument("census needs g >= 2, got g = " + std::to_string(g));
    if (lambdas.size() != static_cast<std::size_t>(2 * g + 1))
        throw std::invalid_argument("census needs 2g+1 = " + std::to_string(2 * g + 1) + " marks, got " + std::to_string(lambdas.size()));
    MarkedLine marks(lambdas);  // distinctness, i.e. smoothness of the pencil
    if (!marks.field().is_finite()) throw std::invalid_argument("census needs a finite field");
}

FieldElement interpolate_at(const std::vector<FieldElement>& xs, const std::vector<FieldElement>& ys, const FieldElement& x) {
    FieldElement acc = x.field().zero();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        FieldElement term = ys[i];
        for (std::size_t k = 0; k < xs.size(); ++k)
            if (k != i) term *= (x - xs[k]) / (xs[i] - xs[k]);
        acc += term;
    }
    return acc;
}

}  // namespace

mpz_class verlinde(int g) {
    if (g < 1) throw std::invalid_argument("verlinde needs g >= 1, got " + std::to_string(g));
    mpz_class four_g;
    mpz_ui_pow_ui(four_g.get_mpz_t(), 4, static_cast<unsigned long>(g));
    return (four_g - 1) / 3;
}

ParityPartition weierstrass_partition(int g, const std::vector<long long>& coefficients) {
    if (g < 1) throw std::invalid_argument("weierstrass_partition needs g >= 1");
    if (coefficients.size() != static_cast<std::size_t>(2 * g + 2))
        throw std::invalid_argument("expected 2g+2 = " + std::to_string(2 * g + 2) + " coefficients, got " + std::to_string(coefficients.size()));
    ParityPartition p;
    for (std::size_t j = 0; j < coefficients.size(); ++j)
        (coefficients[j] % 2 != 0 ? p.S : p.T).push_back(static_cast<int>(j + 1));
    return p;
}

std::vector<Flag> decode_flags(Field field, const std::vector<std::uint32_t>& values) {
    const std::uint64_t q = field.size();
    std::vector<Flag> flags;
    flags.reserve(values.size());
    for (std::uint32_t v : values) {
        if (v > q) throw std::invalid_argument("flag code " + std::to_string(v) + " out of range");
        flags.push_back(v == q ? Flag{field.one(), field.zero()} : Flag{field.from_int(v), field.one()});
    }
    return flags;
}

void for_each_canonical_candidate(int g, std::uint64_t q, int a, const std::function<bool(const std::vector<std::uint32_t>&)>& fn) {
    const std::size_t r = static_cast<std::size_t>(2 * g + 1);
    const std::uint32_t inf = static_cast<std::uint32_t>(q);
    std::vector<std::uint32_t> cur(r, 0);

    if (a == 0) {
        // First appearances in the order 0, 1, infinity.
        const std::uint32_t next_new[3] = {0, 1, inf};
        bool stop = false;
        std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int seen) {
            if (stop) return;
            if (pos == r) {
                if (seen == 3 && !fn(cur)) stop = true;
                return;
            }
            if (seen == 3) {
                for (std::uint32_t v = 0; v <= inf && !stop; ++v) {
                    cur[pos] = v;
                    rec(pos + 1, 3);
                }
                return;
            }
            for (int i = 0; i < seen && !stop; ++i) {
                cur[pos] = next_new[i];
                rec(pos + 1, seen);
            }
            if (stop) return;
            cur[pos] = next_new[seen];
            rec(pos + 1, seen + 1);
        };
        rec(0, 0);
        return;
    }

    if (a < 0) throw std::invalid_argument("negative splitting parameter");
    const int max_inf = g - 2 * a;
    if (max_inf < 0) return;
    for (std::uint64_t mask = 0; mask < (1ull << r); ++mask) {
        if (__builtin_popcountll(mask) > max_inf) continue;
        std::vector<std::size_t> finite;
        for (std::size_t j = 0; j < r; ++j) {
            if (mask >> j & 1)
                cur[j] = inf;
            else
                finite.push_back(j);
        }
        const std::size_t fixed = static_cast<std::size_t>(2 * a + 1);
        if (finite.size() < fixed + 1) continue;
        for (std::size_t i = 0; i < fixed; ++i) cur[finite[i]] = 0;
        const std::size_t free = finite.size() - fixed;
        for (std::size_t lead = 0; lead < free; ++lead) {
            for (std::size_t i = 0; i < lead; ++i) cur[finite[fixed + i]] = 0;
            cur[finite[fixed + lead]] = 1;
            std::vector<std::uint32_t> digits(free - lead - 1, 0);
            while (true) {
                for (std::size_t i = 0; i < digits.size(); ++i) cur[finite[fixed + lead + 1 + i]] = digits[i];
                if (!fn(cur)) return;
                std::size_t i = 0;
                while (i < digits.size() && ++digits[i] == q) digits[i++] = 0;
                if (i == digits.size()) break;
            }
        }
    }
}

QPBundle canonical_form(const QPBundle& bundle) {
    const Field field = bundle.field();
    const int a = bundle.a();
    if (bundle.b() != -a) throw std::invalid_argument("canonical_form expects splitting type (a, -a)");
    const auto& flags = bundle.flags();
    std::vector<Flag> out;

    if (a == 0) {
        std::vector<std::size_t> firsts;
        for (std::size_t j = 0; j < flags.size() && firsts.size() < 3; ++j) {
            bool fresh = std::none_of(firsts.begin(), firsts.end(), [&](std::size_t i) { return same_point(flags[i], flags[j]); });
            if (fresh) firsts.push_back(j);
        }
        if (firsts.size() < 3) throw std::invalid_argument("fewer than three distinct flags; the Moebius action is not free");
        const Flag& P1 = flags[firsts[0]];
        const Flag& P2 = flags[firsts[1]];
        const Flag& P3 = flags[firsts[2]];
        // K = [P3 P1], c = K^{-1} P2, M = diag(1/c) K^{-1}: P1 -> 0, P2 -> 1, P3 -> infinity.
        const FieldElement det = P3.u * P1.v - P1.u * P3.v;
        const FieldElement k00 = P1.v / det, k01 = -P1.u / det, k10 = -P3.v / det, k11 = P3.u / det;
        const FieldElement c1 = k00 * P2.u + k01 * P2.v, c2 = k10 * P2.u + k11 * P2.v;
        for (const Flag& F : flags) {
            Flag img{(k00 * F.u + k01 * F.v) / c1, (k10 * F.u + k11 * F.v) / c2};
            out.push_back(img.normalized());
        }
        return QPBundle(bundle.marks(), a, -a, std::move(out));
    }

    std::vector<std::size_t> finite;
    for (std::size_t j = 0; j < flags.size(); ++j)
        if (!flags[j].v.is_zero()) finite.push_back(j);
    const std::size_t fixed = static_cast<std::size_t>(2 * a + 1);
    if (finite.size() < fixed + 1) throw std::invalid_argument("too few finite flags; the triangular action is not free");
    std::vector<FieldElement> xs, ys;
    for (std::size_t i = 0; i < fixed; ++i) {
        xs.push_back(bundle.marks()[finite[i]]);
        ys.push_back(-(flags[finite[i]].u / flags[finite[i]].v));
    }
    std::vector<FieldElement> value(flags.size(), field.zero());
    std::optional<FieldElement> scale;
    for (std::size_t j : finite) {
        value[j] = flags[j].u / flags[j].v + interpolate_at(xs, ys, bundle.marks()[j]);
        if (!scale && !value[j].is_zero()) scale = value[j];
    }
    if (!scale) throw std::invalid_argument("flags lie on a section of O(-a); the triangular action is not free");
    for (std::size_t j = 0; j < flags.size(); ++j) {
        if (flags[j].v.is_zero())
            out.push_back({field.one(), field.zero()});
        else
            out.push_back({value[j] / *scale, field.one()});
    }
    return QPBundle(bundle.marks(), a, -a, std::move(out));
}

BundleCensus census_bundles(int g, const std::vector<FieldElement>& lambdas, const CensusOptions& options) {
    check_marks(g, lambdas);
    const MarkedLine marks(lambdas);
    const Field field = marks.field();
    BundleCensus out;
    for (int a = 0; 2 * a <= g; ++a) {
        std::vector<std::vector<std::uint32_t>> candidates;
        for_each_canonical_candidate(g, field.size(), a, [&](const std::vector<std::uint32_t>& c) {
            candidates.push_back(c);
            return true;
        });
        const unsigned workers = std::max(1u, options.workers);
        std::vector<std::uint64_t> partial(workers, 0);
        parallel_for(candidates.size(), workers, [&](std::size_t i, unsigned w) {
            QPBundle B(marks, a, -a, decode_flags(field, candidates[i]));
            if (is_stable(B).stable) ++partial[w];
        });
        SplittingCount sc{a, candidates.size(), 0};
        for (auto p : partial) sc.stable += p;
        out.count += sc.stable;
        out.breakdown.push_back(sc);
    }
    return out;
}

std::uint64_t census_subspaces(int g, const std::vector<FieldElement>& lambdas, const CensusOptions& options) {
    check_marks(g, lambdas);
    QuadricPencil pencil = pencil_from_marks(lambdas);
    if (!is_smooth_intersection(pencil)) throw std::invalid_argument("pencil is not smooth");
    return enumerate_subspaces(pencil, static_cast<std::size_t>(g - 2), {options.workers}).size();
}

CensusReport compare_theorem(int g, const std::vector<FieldElement>& lambdas, const CensusOptions& options) {
    CensusReport rep;
    rep.g = g;
    rep.lambda = lambdas;
    BundleCensus bundles = census_bundles(g, lambdas, options);
    rep.q = lambdas.front().field().size();
    rep.bundle_count = bundles.count;
    rep.breakdown = bundles.breakdown;
    rep.subspace_count = census_subspaces(g, lambdas, options);
    rep.maximal_subspace_count =
        enumerate_subspaces(pencil_from_marks(lambdas), static_cast<std::size_t>(g - 1), {options.workers}).size();
    rep.fully_split = rep.maximal_subspace_count == (1ull << (2 * g));
    rep.match = rep.bundle_count == rep.subspace_count;
    if (rep.match)
        rep.verdict = "consistent with the Theorem (char-0 statement)";
    else if (!rep.fully_split)
        rep.verdict = "mismatch at a configuration that is not fully split (rationality finding)";
    else
        rep.verdict = "mismatch at a fully split configuration";
    rep.assumptions = {
        "the correspondence is established over algebraically closed fields of characteristic 0; over F_q the comparison is evidence, not proof",
        "isomorphism classes over F_q are identified with F_q-points of a fine moduli space whose stable objects have only scalar automorphisms",
        "bundles are counted with F_q-rational splitting O(a) + O(-a), 0 <= a <= g/2, and F_q-rational flags",
        "weights {0, 1/2} at every mark",
    };
    return rep;
}

nlohmann::json CensusReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["report"] = "census";
    j["g"] = g;
    j["q"] = q;
    j["lambda"] = nlohmann::json::array();
    for (const auto& l : lambda) j["lambda"].push_back(l.residue_value());
    j["bundle_count"] = bundle_count;
    j["subspace_count"] = subspace_count;
    j["breakdown"] = nlohmann::json::array();
    for (const auto& b : breakdown) j["breakdown"].push_back({{"a", b.a}, {"b", -b.a}, {"candidates", b.candidates}, {"count", b.stable}});
    j["maximal_subspace_count"] = maximal_subspace_count;
    j["fully_split"] = fully_split;
    j["match"] = match;
    j["verdict"] = verdict;
    j["assumptions"] = assumptions;
    j["metadata"] = {{"eff_cone_extremal_rays", 1ull << (2 * g)},
                     {"eff_cone_extremal_rays_note", "2^(n+2) with n = 2g-2, recorded constant for the blow-up of P^n at n+3 points; not computed"}};
    return j;
}

std::string CensusReport::csv_header() { return "g,q,lambda,bundle_count,subspace_count,maximal_subspace_count,fully_split,match,breakdown"; }

std::string CensusReport::csv_row() const {
    std::ostringstream os;
    os << g << ',' << q << ',';
    for (std::size_t i = 0; i < lambda.size(); ++i) os << (i ? ";" : "") << lambda[i];
    os << ',' << bundle_count << ',' << subspace_count << ',' << maximal_subspace_count << ',' << (fully_split ? "true" : "false") << ','
       << (match ? "true" : "false") << ',';
    for (std::size_t i = 0; i < breakdown.size(); ++i) os << (i ? ";" : "") << "a=" << breakdown[i].a << ':' << breakdown[i].stable;
    return os.str();
}

std::string CensusReport::to_text() const {
    std::ostringstream os;
    os << "g = " << g << ", q = " << q << ", lambda = (";
    for (std::size_t i = 0; i < lambda.size(); ++i) os << (i ? "," : "") << lambda[i];
    os << ")\n";
    os << "stable bundles: " << bundle_count << "\n";
    for (const auto& b : breakdown) os << "  O(" << b.a << ")+O(" << -b.a << "): " << b.stable << " of " << b.candidates << " canonical tuples\n";
    os << "subspaces of dimension " << g - 2 << ": " << subspace_count << "\n";
    os << "subspaces of dimension " << g - 1 << ": " << maximal_subspace_count << (fully_split ? " (fully split)" : " (not fully split)") << "\n";
    os << "verdict: " << verdict << "\n";
    return os.str();
}

BettiFit betti_fit(const std::vector<std::pair<std::int64_t, mpz_class>>& counts, int dimension) {
    if (dimension < 0) throw std::invalid_argument("negative dimension");
    if (counts.size() < static_cast<std::size_t>(dimension) + 1)
        throw std::invalid_argument("betti_fit needs at least " + std::to_string(dimension + 1) + " points, got " + std::to_string(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (std::size_t k = 0; k < i; ++k)
            if (counts[i].first == counts[k].first) throw std::invalid_argument("repeated q = " + std::to_string(counts[i].first));

    // Newton divided differences, then expand to the monomial basis.
    const std::size_t n = counts.size();
    std::vector<mpq_class> x(n), dd(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = counts[i].first;
        dd[i] = counts[i].second;
    }
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = n - 1; i >= level; --i) dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - level]);
    std::vector<mpq_class> poly{dd[n - 1]};
    for (std::size_t i = n - 1; i-- > 0;) {
        // poly = poly * (q - x_i) + dd_i
        std::vector<mpq_class> next(poly.size() + 1, 0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k + 1] += poly[k];
            next[k] -= poly[k] * x[i];
        }
        next[0] += dd[i];
        poly = std::move(next);
    }
    for (auto& c : poly) c.canonicalize();
    while (poly.size() > 1 && poly.back() == 0) poly.pop_back();

    BettiFit fit;
    fit.coefficients = poly;
    fit.degree = poly.size() == 1 && poly[0] == 0 ? 0 : static_cast<int>(poly.size()) - 1;
    fit.integral = std::all_of(poly.begin(), poly.end(), [](const mpq_class& c) { return c.get_den() == 1; });
    fit.nonnegative = std::all_of(poly.begin(), poly.end(), [](const mpq_class& c) { return c >= 0; });
    fit.palindromic = true;
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (poly[i] != poly[poly.size() - 1 - i]) fit.palindromic = false;
    fit.within_dimension = fit.degree <= dimension;
    return fit;
}

bool general_position(const std::vector<FieldElement>& lambdas, int n) {
    if (n < 0 || lambdas.size() != static_cast<std::size_t>(n) + 3)
        throw std::invalid_argument("general_position needs n+3 = " + std::to_string(n + 3) + " values, got " + std::to_string(lambdas.size()));
    const Field field = lambdas.front().field();
    const std::size_t m = lambdas.size(), k = static_cast<std::size_t>(n) + 1;

    bool by_minors = true;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (by_minors) {
        Matrix V(field, k, k);
        for (std::size_t i = 0; i < k; ++i) {
            FieldElement p = field.one();
            for (std::size_t e = 0; e < k; ++e) {
                V.set(i, e, p);
                p *= lambdas[idx[i]];
            }
        }
        if (determinant(V).is_zero()) by_minors = false;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }

    bool distinct = true;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (lambdas[i] == lambdas[j]) distinct = false;
    if (distinct != by_minors) throw std::logic_error("Vandermonde minors disagree with distinctness");
    return by_minors;
}

bool split_prefilter(int g, const std::vector<FieldElement>& lambdas) {
    const Field field = lambdas.front().field();
    if (!field.is_finite()) throw std::invalid_argument("split_prefilter needs a finite field");
    const std::uint64_t half = (field.size() - 1) / 2;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        FieldElement c = g % 2 ? -field.one() : field.one();
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            if (i != j) c *= lambdas[i] - lambdas[j];
        if (c.is_zero() || !c.pow(half).is_one()) return false;
    }
    return true;
}

std::vector<ConfigurationCount> survey_configurations(int g, std::uint64_t q, bool prefilter_only, const CensusOptions& options) {
    if (g < 1) throw std::invalid_argument("survey needs g >= 1");
    const Field field = Field::prime(q);
    const std::size_t r = static_cast<std::size_t>(2 * g + 1);
    if (r > q) return {};
    std::vector<ConfigurationCount> out;
    const std::size_t k = r - 2, pool = static_cast<std::size_t>(q) - 2;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<FieldElement> lambdas{field.zero(), field.one()};
        for (std::size_t i : idx) lambdas.push_back(field.from_int(static_cast<long long>(i) + 2));
        if (!prefilter_only || split_prefilter(g, lambdas)) {
            auto list = enumerate_subspaces(pencil_from_marks(lambdas), static_cast<std::size_t>(g - 1), {options.workers});
            out.push_back({lambdas, list.size()});
        }
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == pool - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

std::vector<std::vector<FieldElement>> find_split_configurations(int g, std::uint64_t q, std::size_t limit, const CensusOptions& options) {
    std::vector<std::vector<FieldElement>> found;
    if (limit == 0) return found;
    const Field field = Field::prime(q);
    const std::size_t r = static_cast<std::size_t>(2 * g + 1);
    if (g < 1 || r > q) return found;
    const std::uint64_t full = 1ull << (2 * g);
    const std::size_t k = r - 2, pool = static_cast<std::size_t>(q) - 2;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<FieldElement> lambdas{field.zero(), field.one()};
        for (std::size_t i : idx) lambdas.push_back(field.from_int(static_cast<long long>(i) + 2));
        if (split_prefilter(g, lambdas) &&
            enumerate_subspaces(pencil_from_marks(lambdas), static_cast<std::size_t>(g - 1), {options.workers}).size() == full) {
            found.push_back(lambdas);
            if (found.size() == limit) break;
        }
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == pool - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return found;
}

}  // namespace qpencil
