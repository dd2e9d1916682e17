#include "qpencil/matrix.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace qpencil {

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), entries_(rows * cols, field.zero()) {}

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols, std::vector<FieldElement> entries)
    : field_(field), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols)
        throw std::invalid_argument("matrix entry count " + std::to_string(entries_.size()) + " != " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    for (const auto& e : entries_)
        if (e.field() != field_) throw FieldMismatch("matrix entry " + e.to_string() + " not over field " + field_.name());
}

Matrix Matrix::identity(Field field, std::size_t n) {
    Matrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = field.one();
    return m;
}

Matrix Matrix::from_ints(Field field, const std::vector<std::vector<long long>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows.front().size() : 0;
    std::vector<FieldElement> e;
    e.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("ragged matrix rows");
        for (long long v : row) e.push_back(field.from_int(v));
    }
    return Matrix(field, r, c, std::move(e));
}

void Matrix::set(std::size_t i, std::size_t j, FieldElement v) {
    if (v.field() != field_) throw FieldMismatch("matrix entry " + v.to_string() + " not over field " + field_.name());
    entries_.at(i * cols_ + j) = std::move(v);
}

std::vector<FieldElement> Matrix::row(std::size_t i) const {
    return {entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

Matrix Matrix::transpose() const {
    Matrix t(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.entries_[j * rows_ + i] = (*this)(i, j);
    return t;
}

Matrix Matrix::stack(const Matrix& other) const {
    if (other.field_ != field_) throw FieldMismatch("stacking matrices over different fields");
    if (other.cols_ != cols_ && other.rows_ != 0 && rows_ != 0) throw std::invalid_argument("stacking matrices of different widths");
    std::size_t c = rows_ ? cols_ : other.cols_;
    std::vector<FieldElement> e = entries_;
    e.insert(e.end(), other.entries_.begin(), other.entries_.end());
    return Matrix(field_, rows_ + other.rows_, c, std::move(e));
}

Matrix Matrix::submatrix_rows(std::size_t first, std::size_t count) const {
    if (first + count > rows_) throw std::out_of_range("row range");
    std::vector<FieldElement> e(entries_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                                entries_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_));
    return Matrix(field_, count, cols_, std::move(e));
}

Matrix Matrix::select_columns(const std::vector<std::size_t>& cols) const {
    Matrix out(field_, rows_, cols.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols.size(); ++k) out.entries_[i * cols.size() + k] = (*this)(i, cols.at(k));
    return out;
}

void Matrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap(entries_[a * cols_ + j], entries_[b * cols_ + j]);
}

bool Matrix::is_zero() const {
    for (const auto& e : entries_)
        if (!e.is_zero()) return false;
    return true;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.field_ != b.field_) throw FieldMismatch("multiplying matrices over different fields");
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix out(a.field_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const auto& aik = a(i, k);
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) out.entries_[i * b.cols_ + j] += aik * b(k, j);
        }
    return out;
}

bool operator==(const Matrix& a, const Matrix& b) {
    if (a.field_ != b.field_ || a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i)
        if (a.entries_[i] != b.entries_[i]) return false;
    return true;
}

std::string Matrix::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j);
        os << ']';
    }
    os << ']';
    return os.str();
}

RowEchelon rref(const Matrix& m) {
    RowEchelon out{m, 0, {}};
    Matrix& a = out.matrix;
    const std::size_t rows = a.rows(), cols = a.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a(piv, c).is_zero()) ++piv;
        if (piv == rows) continue;
        a.swap_rows(r, piv);
        FieldElement inv = a(r, c).inverse();
        for (std::size_t j = c; j < cols; ++j) a.set(r, j, a(r, j) * inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a(i, c).is_zero()) continue;
            FieldElement f = a(i, c);
            for (std::size_t j = c; j < cols; ++j) a.set(i, j, a(i, j) - f * a(r, j));
        }
        out.pivots.push_back(c);
        ++r;
    }
    out.rank = r;
    return out;
}

std::size_t rank(const Matrix& m) { return rref(m).rank; }

Matrix kernel_basis(const Matrix& m) {
    RowEchelon e = rref(m);
    const std::size_t cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : e.pivots) is_pivot[c] = true;
    std::vector<FieldElement> entries;
    std::size_t count = 0;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<FieldElement> v(cols, m.field().zero());
        v[f] = m.field().one();
        for (std::size_t i = 0; i < e.rank; ++i) v[e.pivots[i]] = -e.matrix(i, f);
        entries.insert(entries.end(), v.begin(), v.end());
        ++count;
    }
    return Matrix(m.field(), count, cols, std::move(entries));
}

FieldElement determinant(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
    Matrix a = m;
    const std::size_t n = a.rows();
    FieldElement det = m.field().one();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a(piv, c).is_zero()) ++piv;
        if (piv == n) return m.field().zero();
        if (piv != c) {
            a.swap_rows(piv, c);
            det = -det;
        }
        det *= a(c, c);
        FieldElement inv = a(c, c).inverse();
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a(i, c).is_zero()) continue;
            FieldElement f = a(i, c) * inv;
            for (std::size_t j = c; j < n; ++j) a.set(i, j, a(i, j) - f * a(c, j));
        }
    }
    return det;
}

}  // namespace qpencil
