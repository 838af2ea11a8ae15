#pragma once

#include <algorithm>
#include <vector>

#include "formal/jet.hpp"
#include "formal/matrix.hpp"

namespace formal {

/// Formal vector field sum_i X_i d/dx_i. All components share dim and
/// trunc, and carry the same reliable order (the minimum over components).
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(std::vector<Jet> comps) : c_(std::move(comps))
    {
        require(!c_.empty(), Errc::DimensionMismatch, "field needs components");
        const int n = c_.front().dim(), t = c_.front().trunc();
        require(static_cast<int>(c_.size()) == n, Errc::DimensionMismatch, "component count must equal dim");
        int rel = t;
        for (const auto& j : c_) {
            require(j.dim() == n, Errc::DimensionMismatch, "component dimensions differ");
            require(j.trunc() == t, Errc::TruncMismatch, "component truncations differ");
            rel = std::min(rel, j.reliable());
        }
        for (auto& j : c_) j = j.with_reliable(rel);
    }

    static VectorField zero(int dim, int trunc) { return VectorField(std::vector<Jet>(dim, Jet(dim, trunc))); }
    static VectorField linear(const Matrix& m, int trunc)
    {
        require(m.is_square(), Errc::DimensionMismatch, "linear field needs a square matrix");
        const int n = m.rows();
        std::vector<Jet> comps;
        for (int i = 0; i < n; ++i) {
            Jet c(n, trunc);
            for (int j = 0; j < n; ++j) c.accumulate(mono::var(j), m(i, j));
            comps.push_back(std::move(c));
        }
        return VectorField(std::move(comps));
    }
    /// Radial field x_1 d/dx_1 + ... + x_n d/dx_n.
    static VectorField euler(int dim, int trunc) { return linear(Matrix::identity(dim), trunc); }
    /// The coordinate field c d/dx_i.
    static VectorField coordinate(int dim, int trunc, int i, const Jet& c)
    {
        VectorField v = zero(dim, trunc);
        v.c_[i] = c;
        return VectorField(v.c_);
    }

    int dim() const { return c_.front().dim(); }
    int trunc() const { return c_.front().trunc(); }
    int reliable() const { return c_.front().reliable(); }
    const std::vector<Jet>& comps() const { return c_; }
    const Jet& operator[](int i) const { return c_[i]; }

    bool is_zero() const
    {
        return std::all_of(c_.begin(), c_.end(), [](const Jet& j) { return j.is_zero(); });
    }

    template <class F>
    VectorField map(F&& f) const
    {
        std::vector<Jet> out;
        out.reserve(c_.size());
        for (const auto& j : c_) out.push_back(f(j));
        return VectorField(std::move(out));
    }

    VectorField homogeneous(int d) const { return map([d](const Jet& j) { return j.homogeneous(d); }); }
    VectorField part(int lo, int hi) const { return map([=](const Jet& j) { return j.part(lo, hi); }); }
    VectorField truncated(int n) const { return map([n](const Jet& j) { return j.truncated(n); }); }
    VectorField extended(int n) const { return map([n](const Jet& j) { return j.extended(n); }); }
    VectorField with_reliable(int r) const { return map([r](const Jet& j) { return j.with_reliable(r); }); }
    VectorField as_exact(int n) const { return map([n](const Jet& j) { return j.as_exact(n); }); }

    std::optional<int> lowest_degree() const
    {
        std::optional<int> best;
        for (const auto& j : c_)
            if (auto d = j.lowest_degree(); d && (!best || *d < *best)) best = d;
        return best;
    }
    std::optional<int> highest_degree() const
    {
        std::optional<int> best;
        for (const auto& j : c_)
            if (auto d = j.highest_degree(); d && (!best || *d > *best)) best = d;
        return best;
    }

    bool agrees(const VectorField& o, int upto) const
    {
        if (o.c_.size() != c_.size()) return false;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].agrees(o.c_[i], upto)) return false;
        return true;
    }
    bool same_terms(const VectorField& o) const
    {
        if (o.c_.size() != c_.size()) return false;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].same_terms(o.c_[i])) return false;
        return true;
    }
    friend bool operator==(const VectorField& a, const VectorField& b) { return a.c_ == b.c_; }

    friend VectorField operator+(const VectorField& a, const VectorField& b)
    {
        require(a.c_.size() == b.c_.size(), Errc::DimensionMismatch, "field dimensions differ");
        std::vector<Jet> out;
        for (std::size_t i = 0; i < a.c_.size(); ++i) out.push_back(a.c_[i] + b.c_[i]);
        return VectorField(std::move(out));
    }
    friend VectorField operator-(const VectorField& a) { return a.map([](const Jet& j) { return -j; }); }
    friend VectorField operator-(const VectorField& a, const VectorField& b) { return a + (-b); }
    friend VectorField operator*(const Rational& s, const VectorField& a)
    {
        return a.map([&s](const Jet& j) { return s * j; });
    }
    /// Multiplication by a function, f X.
    friend VectorField operator*(const Jet& f, const VectorField& a)
    {
        return a.map([&f](const Jet& j) { return f * j; });
    }
    VectorField& operator+=(const VectorField& b) { return *this = *this + b; }
    VectorField& operator-=(const VectorField& b) { return *this = *this - b; }

private:
    std::vector<Jet> c_;
};

/// The derivation X(f) = sum_i X_i df/dx_i.
inline Jet apply(const VectorField& x, const Jet& f)
{
    require(x.dim() == f.dim(), Errc::DimensionMismatch, "field and jet dimensions differ");
    require(x.trunc() == f.trunc(), Errc::TruncMismatch, "field and jet truncations differ");
    Jet out(f.dim(), f.trunc());
    int rel = std::min(f.reliable(), x.reliable());
    for (int i = 0; i < x.dim(); ++i) {
        Jet term = x[i] * differentiate(f, i);
        rel = std::min(rel, term.reliable());
        out += term;
    }
    return out.with_reliable(rel);
}

/// Lie bracket [X, Y]_j = X(Y_j) - Y(X_j).
inline VectorField bracket(const VectorField& x, const VectorField& y)
{
    require(x.dim() == y.dim(), Errc::DimensionMismatch, "field dimensions differ");
    std::vector<Jet> out;
    for (int j = 0; j < x.dim(); ++j) out.push_back(apply(x, y[j]) - apply(y, x[j]));
    return VectorField(std::move(out));
}

inline Matrix linear_part(const VectorField& x)
{
    const int n = x.dim();
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        require(sgn(x[i].constant_term()) == 0, Errc::NonSingularityViolated, "field does not vanish at 0");
        for (int j = 0; j < n; ++j) m(i, j) = x[i].coeff(mono::var(j));
    }
    return m;
}

/// Lowest degree carrying a nonzero coefficient within the reliable range.
inline int vanishing_order(const VectorField& x)
{
    auto d = x.lowest_degree();
    require(d && *d <= x.reliable(), Errc::ZeroWithinReliable, "no nonzero coefficient up to the reliable order");
    return *d;
}

} // namespace formal
