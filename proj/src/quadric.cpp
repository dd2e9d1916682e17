#include "qpencil/quadric.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpencil {

namespace {

void require_distinct(const std::vector<FieldElement>& lambdas, const FieldElement& extra) {
    for (const auto& l : lambdas)
        if (l == extra) throw std::invalid_argument("extra mark " + extra.to_string() + " coincides with a mark");
}

// Lexicographic k-subsets of {0..n-1}; calls fn for each.
template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

QuadraticForm::QuadraticForm(Matrix gram) : gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols() || gram_.rows() == 0) throw std::invalid_argument("quadratic form needs a nonempty square matrix");
    if (gram_.is_zero()) throw std::invalid_argument("zero quadratic form");
    diagonal_ = true;
    for (std::size_t i = 0; i < gram_.rows(); ++i)
        for (std::size_t j = 0; j < gram_.cols(); ++j) {
            if (gram_(i, j) != gram_(j, i)) throw std::invalid_argument("quadratic form matrix is not symmetric");
            if (i != j && !gram_(i, j).is_zero()) diagonal_ = false;
        }
}

QuadraticForm QuadraticForm::diagonal(const std::vector<FieldElement>& coefficients) {
    if (coefficients.empty()) throw std::invalid_argument("empty diagonal");
    Field f = coefficients.front().field();
    Matrix m(f, coefficients.size(), coefficients.size());
    for (std::size_t i = 0; i < coefficients.size(); ++i) m.set(i, i, coefficients[i]);
    return QuadraticForm(std::move(m));
}

FieldElement QuadraticForm::evaluate(const std::vector<FieldElement>& x) const { return polar(x, x); }

FieldElement QuadraticForm::polar(const std::vector<FieldElement>& x, const std::vector<FieldElement>& y) const {
    const std::size_t n = gram_.rows();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("vector length does not match the quadratic form");
    FieldElement acc = field().zero();
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].is_zero()) continue;
        FieldElement row = field().zero();
        for (std::size_t j = 0; j < n; ++j)
            if (!gram_(i, j).is_zero()) row += gram_(i, j) * y[j];
        acc += x[i] * row;
    }
    return acc;
}

QuadricPencil::QuadricPencil(QuadraticForm first, QuadraticForm second, std::optional<std::vector<FieldElement>> marks)
    : first_(std::move(first)), second_(std::move(second)), marks_(std::move(marks)) {
    if (first_.field() != second_.field()) throw FieldMismatch("pencil forms over different fields");
    if (first_.ambient_dimension() != second_.ambient_dimension()) throw std::invalid_argument("pencil forms on different projective spaces");
}

LinearSubspace::LinearSubspace(const Matrix& spanning_rows) : basis_(spanning_rows) {
    if (spanning_rows.rows() == 0 || spanning_rows.cols() == 0) throw std::invalid_argument("empty subspace basis");
    RowEchelon e = rref(spanning_rows);
    if (e.rank != spanning_rows.rows())
        throw std::invalid_argument("subspace basis rows are linearly dependent: " + spanning_rows.to_string());
    basis_ = std::move(e.matrix);
}

LinearSubspace LinearSubspace::point(const std::vector<FieldElement>& coordinates) {
    if (coordinates.empty()) throw std::invalid_argument("empty point");
    return LinearSubspace(Matrix(coordinates.front().field(), 1, coordinates.size(), coordinates));
}

bool LinearSubspace::contains_point(const std::vector<FieldElement>& x) const {
    if (x.size() != basis_.cols()) throw std::invalid_argument("point of the wrong ambient dimension");
    Matrix row(field(), 1, x.size(), x);
    return rank(basis_.stack(row)) == basis_.rows();
}

std::string LinearSubspace::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < basis_.rows(); ++i) {
        if (i) out += ';';
        for (std::size_t j = 0; j < basis_.cols(); ++j) {
            if (j) out += ' ';
            out += basis_(i, j).to_string();
        }
    }
    return out;
}

bool operator<(const LinearSubspace& a, const LinearSubspace& b) {
    if (a.basis_.rows() != b.basis_.rows()) return a.basis_.rows() < b.basis_.rows();
    if (a.basis_.cols() != b.basis_.cols()) return a.basis_.cols() < b.basis_.cols();
    const auto& x = a.basis_.entries();
    const auto& y = b.basis_.entries();
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto c = compare(x[i], y[i]);
        if (c != 0) return c < 0;
    }
    return false;
}

QuadricPencil pencil_from_marks(const std::vector<FieldElement>& lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("pencil_from_marks needs at least one mark");
    Field f = lambdas.front().field();
    for (const auto& l : lambdas)
        if (l.field() != f) throw FieldMismatch("marks over different fields");
    std::vector<FieldElement> ones(lambdas.size(), f.one());
    return QuadricPencil(QuadraticForm::diagonal(ones), QuadraticForm::diagonal(lambdas), lambdas);
}

QuadricPencil lifted_pencil(const std::vector<FieldElement>& lambdas, const FieldElement& extra) {
    require_distinct(lambdas, extra);
    std::vector<FieldElement> all = lambdas;
    all.push_back(extra);
    return pencil_from_marks(all);
}

FieldElement default_extra_mark(const std::vector<FieldElement>& lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("no marks");
    Field f = lambdas.front().field();
    for (long long k = 0;; ++k) {
        if (f.is_finite() && static_cast<std::uint64_t>(k) >= f.size())
            throw std::invalid_argument("every element of F_" + f.name() + " is already a mark");
        FieldElement c = f.from_int(k);
        if (std::none_of(lambdas.begin(), lambdas.end(), [&](const FieldElement& l) { return l == c; })) return c;
    }
}

BinaryForm pencil_determinant(const QuadricPencil& pencil) {
    const Matrix& A = pencil.first().gram();
    const Matrix& B = pencil.second().gram();
    const Field f = pencil.field();
    const std::size_t n = A.rows();
    // Fraction-free (Bareiss) elimination over binary forms.
    std::vector<std::vector<BinaryForm>> m(n, std::vector<BinaryForm>(n, BinaryForm::zero(f, 1)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = BinaryForm(f, {A(i, j), B(i, j)});
    bool negate = false;
    BinaryForm prev = BinaryForm::constant(f.one());
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t piv = k;
        while (piv < n && m[piv][k].is_zero()) ++piv;
        if (piv == n) return BinaryForm::zero(f, static_cast<int>(n));
        if (piv != k) {
            std::swap(m[piv], m[k]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = divide_exact(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
            m[i][k] = BinaryForm::zero(f, m[k][k].degree());
        }
        prev = m[k][k];
    }
    BinaryForm det = m[n - 1][n - 1];
    return negate ? det.scaled(-f.one()) : det;
}

bool is_smooth_by_determinant(const QuadricPencil& pencil) {
    if (pencil.ambient_dimension() < 2) return false;
    BinaryForm det = pencil_determinant(pencil);
    if (det.is_zero()) return false;
    return is_squarefree(det);
}

bool is_smooth_intersection(const QuadricPencil& pencil) {
    if (pencil.ambient_dimension() < 2) return false;
    const auto& A = pencil.first();
    const auto& B = pencil.second();
    if (!A.is_diagonal() || !B.is_diagonal()) return is_smooth_by_determinant(pencil);
    // Diagonal pair: smooth iff the ratios (a_i : b_i) are defined and pairwise distinct.
    const std::size_t n = A.gram().rows();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ai = A.gram()(i, i);
        const auto& bi = B.gram()(i, i);
        if (ai.is_zero() && bi.is_zero()) return false;
        for (std::size_t j = i + 1; j < n; ++j)
            if (ai * B.gram()(j, j) == bi * A.gram()(j, j)) return false;
    }
    return true;
}

bool contains(const LinearSubspace& subspace, const QuadraticForm& form) {
    if (subspace.field() != form.field()) throw FieldMismatch("subspace and quadric over different fields");
    if (subspace.ambient_dimension() != form.ambient_dimension())
        throw std::invalid_argument("subspace and quadric live on different projective spaces");
    const Matrix& M = subspace.basis();
    return (M * form.gram() * M.transpose()).is_zero();
}

bool contained_in_base_locus(const LinearSubspace& subspace, const QuadricPencil& pencil) {
    return contains(subspace, pencil.first()) && contains(subspace, pencil.second());
}

LinearSubspace flip_last_coordinate(const LinearSubspace& subspace) {
    Matrix m = subspace.basis();
    const std::size_t last = m.cols() - 1;
    for (std::size_t i = 0; i < m.rows(); ++i) m.set(i, last, -m(i, last));
    return LinearSubspace(m);
}

bool involution_fixed_by_branches(const LinearSubspace& subspace) {
    const Matrix& m = subspace.basis();
    const std::size_t last = m.cols() - 1;
    bool in_hyperplane = true;
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!m(i, last).is_zero()) in_hyperplane = false;
    if (in_hyperplane) return true;
    std::vector<FieldElement> apex(m.cols(), subspace.field().zero());
    apex[last] = subspace.field().one();
    return subspace.contains_point(apex);
}

bool involution_fixed(const LinearSubspace& subspace) {
    const bool direct = flip_last_coordinate(subspace) == subspace;
    if (direct != involution_fixed_by_branches(subspace))
        throw std::logic_error("involution fixed-locus tests disagree on " + subspace.serialize());
    return direct;
}

std::vector<LinearSubspace> restrict_to_hyperplane(const std::vector<LinearSubspace>& subspaces) {
    std::vector<LinearSubspace> out;
    out.reserve(subspaces.size());
    for (const auto& s : subspaces) {
        const Matrix& m = s.basis();
        const std::size_t last = m.cols() - 1;
        if (last == 0) throw std::invalid_argument("cannot restrict a subspace of P^0");
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (!m(i, last).is_zero()) throw std::invalid_argument("subspace not contained in x_last = 0: " + s.serialize());
        std::vector<std::size_t> keep(last);
        for (std::size_t j = 0; j < last; ++j) keep[j] = j;
        out.emplace_back(m.select_columns(keep));
    }
    return out;
}

std::vector<FieldElement> plucker(const LinearSubspace& subspace) {
    const Matrix& m = subspace.basis();
    std::vector<FieldElement> coords;
    for_each_subset(m.cols(), m.rows(), [&](const std::vector<std::size_t>& cols) {
        coords.push_back(determinant(m.select_columns(cols)));
    });
    auto first = std::find_if(coords.begin(), coords.end(), [](const FieldElement& x) { return !x.is_zero(); });
    if (first != coords.end()) {
        FieldElement inv = first->inverse();
        for (auto& c : coords) c *= inv;
    }
    return coords;
}

}  // namespace qpencil
