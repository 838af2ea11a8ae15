#pragma once

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <vector>

#include "formal/error.hpp"
#include "formal/rational.hpp"
#include "formal/upoly.hpp"

namespace formal {

using Vec = std::vector<Rational>;

/// Dense row-major matrix over Q.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
    Matrix(std::initializer_list<std::initializer_list<Rational>> rows)
    {
        r_ = static_cast<int>(rows.size());
        c_ = r_ ? static_cast<int>(rows.begin()->size()) : 0;
        for (const auto& row : rows) {
            require(static_cast<int>(row.size()) == c_, Errc::DimensionMismatch, "ragged matrix");
            a_.insert(a_.end(), row.begin(), row.end());
        }
    }
    static Matrix identity(int n)
    {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const noexcept { return r_; }
    int cols() const noexcept { return c_; }
    Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * c_ + j]; }
    const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * c_ + j]; }

    Vec row(int i) const { return Vec(a_.begin() + i * c_, a_.begin() + (i + 1) * c_); }
    Vec col(int j) const
    {
        Vec v(r_);
        for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    bool is_zero() const
    {
        for (const auto& x : a_)
            if (sgn(x) != 0) return false;
        return true;
    }
    bool is_square() const { return r_ == c_; }

    friend bool operator==(const Matrix& a, const Matrix& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_; }

    friend Matrix operator+(Matrix a, const Matrix& b)
    {
        require(a.r_ == b.r_ && a.c_ == b.c_, Errc::DimensionMismatch, "matrix shapes differ");
        for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix& b)
    {
        require(a.r_ == b.r_ && a.c_ == b.c_, Errc::DimensionMismatch, "matrix shapes differ");
        for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] -= b.a_[k];
        return a;
    }
    friend Matrix operator*(const Rational& s, Matrix a)
    {
        for (auto& x : a.a_) x *= s;
        return a;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        require(a.c_ == b.r_, Errc::DimensionMismatch, "matrix product shapes");
        Matrix m(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                if (sgn(a(i, k)) == 0) continue;
                for (int j = 0; j < b.c_; ++j) m(i, j) += a(i, k) * b(k, j);
            }
        return m;
    }
    friend Vec operator*(const Matrix& a, const Vec& v)
    {
        require(a.c_ == static_cast<int>(v.size()), Errc::DimensionMismatch, "matrix-vector shapes");
        Vec out(a.r_);
        for (int i = 0; i < a.r_; ++i)
            for (int j = 0; j < a.c_; ++j) out[i] += a(i, j) * v[j];
        return out;
    }

    Matrix transpose() const
    {
        Matrix t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    int r_ = 0;
    int c_ = 0;
    std::vector<Rational> a_;
};

inline Matrix matrix_pow(const Matrix& m, int k)
{
    Matrix r = Matrix::identity(m.rows());
    for (int i = 0; i < k; ++i) r = r * m;
    return r;
}

struct Rref {
    Matrix reduced;
    std::vector<int> pivots;
};

/// Reduced row echelon form by exact Gauss-Jordan elimination.
inline Rref rref(Matrix m)
{
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int p = -1;
        for (int i = row; i < m.rows(); ++i)
            if (sgn(m(i, col)) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
        Rational inv = 1 / m(row, col);
        for (int j = col; j < m.cols(); ++j) m(row, j) *= inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == row || sgn(m(i, col)) == 0) continue;
            Rational f = m(i, col);
            for (int j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return {std::move(m), std::move(pivots)};
}

inline int rank(const Matrix& m) { return static_cast<int>(rref(m).pivots.size()); }

/// Basis of {v : m v = 0}; one vector per free column with a 1 there.
inline std::vector<Vec> nullspace(const Matrix& m)
{
    auto [r, piv] = rref(m);
    std::vector<bool> is_piv(m.cols(), false);
    for (int p : piv) is_piv[p] = true;
    std::vector<Vec> basis;
    for (int f = 0; f < m.cols(); ++f) {
        if (is_piv[f]) continue;
        Vec v(m.cols());
        v[f] = 1;
        for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -r(static_cast<int>(k), f);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Some solution of a x = b with free variables set to zero.
inline std::optional<Vec> solve(const Matrix& a, const Vec& b)
{
    require(a.rows() == static_cast<int>(b.size()), Errc::DimensionMismatch, "right-hand side length");
    Matrix aug(a.rows(), a.cols() + 1);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    auto [r, piv] = rref(aug);
    if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
    Vec x(a.cols());
    for (std::size_t k = 0; k < piv.size(); ++k) x[piv[k]] = r(static_cast<int>(k), a.cols());
    return x;
}

inline std::optional<Matrix> inverse(const Matrix& m)
{
    require(m.is_square(), Errc::DimensionMismatch, "inverse of non-square matrix");
    const int n = m.rows();
    Matrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    auto [r, piv] = rref(aug);
    if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
    Matrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = r(i, n + j);
    return inv;
}

inline Rational det(Matrix m)
{
    require(m.is_square(), Errc::DimensionMismatch, "determinant of non-square matrix");
    const int n = m.rows();
    Rational d = 1;
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && sgn(m(p, c)) == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            d = -d;
        }
        d *= m(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (sgn(m(i, c)) == 0) continue;
            Rational f = m(i, c) / m(c, c);
            for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return d;
}

inline Rational trace(const Matrix& m)
{
    Rational t = 0;
    for (int i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
    return t;
}

/// Monic characteristic polynomial det(tI - m) via Faddeev-LeVerrier.
inline upoly::Poly charpoly(const Matrix& m)
{
    require(m.is_square(), Errc::DimensionMismatch, "characteristic polynomial of non-square matrix");
    const int n = m.rows();
    upoly::Poly c(n + 1);
    c[n] = 1;
    Matrix mk(n, n);
    for (int k = 1; k <= n; ++k) {
        mk = m * mk;
        for (int i = 0; i < n; ++i) mk(i, i) += c[n - k + 1];
        Matrix am = m * mk;
        c[n - k] = -trace(am) / k;
    }
    upoly::trim(c);
    return c;
}

inline bool is_nilpotent_matrix(const Matrix& m)
{
    require(m.is_square(), Errc::DimensionMismatch, "nilpotency of non-square matrix");
    return matrix_pow(m, m.rows()).is_zero();
}

/// Evaluates a polynomial at a square matrix.
inline Matrix eval_at(const upoly::Poly& p, const Matrix& m)
{
    Matrix r(m.rows(), m.cols());
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * m + *it * Matrix::identity(m.rows());
    return r;
}

/// Columns of `basis` stacked into a matrix.
inline Matrix from_columns(const std::vector<Vec>& basis, int n)
{
    Matrix m(n, static_cast<int>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (int i = 0; i < n; ++i) m(i, static_cast<int>(j)) = basis[j][i];
    return m;
}

} // namespace formal
