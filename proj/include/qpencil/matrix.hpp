#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "qpencil/field.hpp"

namespace qpencil {

/// Dense row-major matrix over a single field.
class Matrix {
public:
    Matrix(Field field, std::size_t rows, std::size_t cols);
    /// Throws std::invalid_argument on a size mismatch, FieldMismatch on a foreign entry.
    Matrix(Field field, std::size_t rows, std::size_t cols, std::vector<FieldElement> entries);

    static Matrix identity(Field field, std::size_t n);
    static Matrix from_ints(Field field, const std::vector<std::vector<long long>>& rows);

    Field field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    const FieldElement& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, FieldElement v);

    std::vector<FieldElement> row(std::size_t i) const;
    const std::vector<FieldElement>& entries() const { return entries_; }

    Matrix transpose() const;
    /// Rows of *this followed by rows of other.
    Matrix stack(const Matrix& other) const;
    Matrix submatrix_rows(std::size_t first, std::size_t count) const;
    Matrix select_columns(const std::vector<std::size_t>& cols) const;
    void swap_rows(std::size_t a, std::size_t b);

    bool is_zero() const;

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend bool operator==(const Matrix& a, const Matrix& b);
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    std::string to_string() const;

private:
    Field field_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<FieldElement> entries_;
};

struct RowEchelon {
    Matrix matrix;
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
};

/// Reduced row echelon form. Pivot search is leftmost column first, then the
/// topmost nonzero row below the current one, so the output is reproducible.
RowEchelon rref(const Matrix& m);

std::size_t rank(const Matrix& m);

/// Basis of the right null space, one vector per row, one row per free column
/// (in increasing column order), with that free variable set to 1.
Matrix kernel_basis(const Matrix& m);

/// Requires a square matrix.
FieldElement determinant(const Matrix& m);

}  // namespace qpencil
