#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

// Dense matrix over Rat. Everything here is exact; sizes stay small (a few
// hundred rows at most in the annihilator solvers), so plain Gauss-Jordan
// with the first nonzero pivot is enough.
class RatMatrix {
  public:
    RatMatrix() = default;
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rat& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const Rat& at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    bool is_zero() const {
        for (const auto& v : data_)
            if (!rat_is_zero(v)) return false;
        return true;
    }

    bool operator==(const RatMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    RatMatrix transpose() const {
        RatMatrix t(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    RatMatrix operator*(const RatMatrix& o) const {
        RatMatrix p(rows_, o.cols_);
        for (int r = 0; r < rows_; ++r)
            for (int k = 0; k < cols_; ++k) {
                const Rat& a = at(r, k);
                if (rat_is_zero(a)) continue;
                for (int c = 0; c < o.cols_; ++c) {
                    if (rat_is_zero(o.at(k, c))) continue;
                    p.at(r, c) += a * o.at(k, c);
                }
            }
        return p;
    }

    RatMatrix operator+(const RatMatrix& o) const {
        RatMatrix s(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) s.data_[i] = data_[i] + o.data_[i];
        return s;
    }

    RatMatrix operator-(const RatMatrix& o) const {
        RatMatrix s(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) s.data_[i] = data_[i] - o.data_[i];
        return s;
    }

    RatMatrix operator-() const {
        RatMatrix s(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) s.data_[i] = -data_[i];
        return s;
    }

    RatMatrix scaled(const Rat& c) const {
        RatMatrix s(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) s.data_[i] = data_[i] * c;
        return s;
    }

    std::vector<Rat> column(int c) const {
        std::vector<Rat> v(rows_);
        for (int r = 0; r < rows_; ++r) v[r] = at(r, c);
        return v;
    }

    // In-place reduced row echelon form; returns the pivot columns.
    std::vector<int> rref() {
        std::vector<int> pivots;
        int row = 0;
        for (int col = 0; col < cols_ && row < rows_; ++col) {
            int p = -1;
            for (int r = row; r < rows_; ++r)
                if (!rat_is_zero(at(r, col))) { p = r; break; }
            if (p < 0) continue;
            if (p != row)
                for (int c = 0; c < cols_; ++c) std::swap(at(p, c), at(row, c));
            Rat inv = Rat(1) / at(row, col);
            for (int c = col; c < cols_; ++c) at(row, c) *= inv;
            for (int r = 0; r < rows_; ++r) {
                if (r == row || rat_is_zero(at(r, col))) continue;
                Rat f = at(r, col);
                for (int c = col; c < cols_; ++c) at(r, c) -= f * at(row, c);
            }
            pivots.push_back(col);
            ++row;
        }
        return pivots;
    }

    int rank() const {
        RatMatrix m = *this;
        return static_cast<int>(m.rref().size());
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rat> data_;
};

inline RatMatrix vstack(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix s(a.rows() + b.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) s.at(r, c) = a.at(r, c);
    for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c) s.at(a.rows() + r, c) = b.at(r, c);
    return s;
}

inline RatMatrix hstack(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix s(a.rows(), a.cols() + b.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) s.at(r, c) = a.at(r, c);
        for (int c = 0; c < b.cols(); ++c) s.at(r, a.cols() + c) = b.at(r, c);
    }
    return s;
}

// Columns form a basis of the kernel; cols() == 0 means trivial kernel.
inline RatMatrix nullspace(const RatMatrix& m) {
    RatMatrix r = m;
    std::vector<int> pivots = r.rref();
    std::vector<bool> is_pivot(m.cols(), false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < m.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    RatMatrix basis(m.cols(), static_cast<int>(free_cols.size()));
    for (size_t k = 0; k < free_cols.size(); ++k) {
        int fc = free_cols[k];
        basis.at(fc, static_cast<int>(k)) = 1;
        for (size_t i = 0; i < pivots.size(); ++i)
            basis.at(pivots[i], static_cast<int>(k)) = -r.at(static_cast<int>(i), fc);
    }
    return basis;
}

// Particular solution of m x = b with free variables set to zero, or nullopt.
inline std::optional<std::vector<Rat>> solve(const RatMatrix& m, const std::vector<Rat>& b) {
    RatMatrix aug(m.rows(), m.cols() + 1);
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) aug.at(r, c) = m.at(r, c);
        aug.at(r, m.cols()) = b[static_cast<size_t>(r)];
    }
    std::vector<int> pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
    std::vector<Rat> x(m.cols());
    for (size_t i = 0; i < pivots.size(); ++i) x[static_cast<size_t>(pivots[i])] = aug.at(static_cast<int>(i), m.cols());
    return x;
}

// Independent spanning subset of the columns, found by pivoting on the
// transpose-free rref of the matrix itself.
inline RatMatrix column_space_basis(const RatMatrix& m) {
    RatMatrix r = m;
    std::vector<int> pivots = r.rref();
    RatMatrix basis(m.rows(), static_cast<int>(pivots.size()));
    for (size_t k = 0; k < pivots.size(); ++k)
        for (int row = 0; row < m.rows(); ++row) basis.at(row, static_cast<int>(k)) = m.at(row, pivots[k]);
    return basis;
}

// Basis of colspace(u) ∩ colspace(w). Vectors in the intersection are u·a
// with (a, b) in the kernel of [u | -w].
inline RatMatrix intersect_column_spaces(const RatMatrix& u, const RatMatrix& w) {
    if (u.cols() == 0 || w.cols() == 0) return RatMatrix(u.rows(), 0);
    RatMatrix joint = hstack(u, -w);
    RatMatrix ker = nullspace(joint);
    RatMatrix vecs(u.rows(), ker.cols());
    for (int k = 0; k < ker.cols(); ++k)
        for (int r = 0; r < u.rows(); ++r) {
            Rat s = 0;
            for (int c = 0; c < u.cols(); ++c) s += u.at(r, c) * ker.at(c, k);
            vecs.at(r, k) = s;
        }
    return column_space_basis(vecs);
}

// Is v in the column space of m?
inline bool in_column_space(const RatMatrix& m, const std::vector<Rat>& v) {
    return solve(m, v).has_value();
}

} // namespace carnot
