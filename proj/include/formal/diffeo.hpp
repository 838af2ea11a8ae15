#pragma once

#include <cstdlib>
#include <utility>
#include <vector>

#include "formal/vector_field.hpp"

namespace formal {

/// Formal diffeomorphism germ at 0: components vanish at the origin and the
/// linear part is invertible.
class Diffeo {
public:
    Diffeo() = default;
    explicit Diffeo(std::vector<Jet> comps) : c_(std::move(comps))
    {
        require(!c_.empty(), Errc::DimensionMismatch, "diffeo needs components");
        const int n = c_.front().dim(), t = c_.front().trunc();
        require(static_cast<int>(c_.size()) == n, Errc::DimensionMismatch, "component count must equal dim");
        for (const auto& j : c_) {
            require(j.dim() == n, Errc::DimensionMismatch, "component dimensions differ");
            require(j.trunc() == t, Errc::TruncMismatch, "component truncations differ");
            require(sgn(j.constant_term()) == 0, Errc::NonzeroConstantTerm, "diffeo must fix the origin");
        }
        require(t >= 1 && sgn(det(linear_part())) != 0, Errc::SingularLinearPart, "linear part is not invertible");
    }

    static Diffeo identity(int dim, int trunc) { return linear(Matrix::identity(dim), trunc); }
    static Diffeo linear(const Matrix& m, int trunc)
    {
        return Diffeo(VectorField::linear(m, trunc).comps());
    }

    int dim() const { return c_.front().dim(); }
    int trunc() const { return c_.front().trunc(); }
    int reliable() const
    {
        int r = trunc();
        for (const auto& j : c_) r = std::min(r, j.reliable());
        return r;
    }
    const std::vector<Jet>& comps() const { return c_; }
    const Jet& operator[](int i) const { return c_[i]; }

    Matrix linear_part() const
    {
        const int n = dim();
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = c_[i].coeff(mono::var(j));
        return m;
    }

    bool agrees(const Diffeo& o, int upto) const
    {
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].agrees(o.c_[i], upto)) return false;
        return true;
    }
    bool is_identity(int upto) const { return agrees(identity(dim(), trunc()), upto); }
    bool same_terms(const Diffeo& o) const
    {
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].same_terms(o.c_[i])) return false;
        return true;
    }
    friend bool operator==(const Diffeo& a, const Diffeo& b) { return a.c_ == b.c_; }

private:
    std::vector<Jet> c_;
};

/// f o g.
inline Diffeo compose(const Diffeo& f, const Diffeo& g)
{
    require(f.dim() == g.dim(), Errc::DimensionMismatch, "diffeo dimensions differ");
    std::vector<Jet> out;
    for (const auto& fi : f.comps()) out.push_back(substitute(fi, g.comps()));
    return Diffeo(std::move(out));
}

/// Applies a constant matrix to a vector of jets.
inline std::vector<Jet> apply_matrix(const Matrix& m, const std::vector<Jet>& v)
{
    int rel = v.front().trunc();
    for (const auto& c : v) rel = std::min(rel, c.reliable());
    std::vector<Jet> out;
    for (int i = 0; i < m.rows(); ++i) {
        Jet s(v.front().dim(), v.front().trunc());
        for (int j = 0; j < m.cols(); ++j)
            if (sgn(m(i, j)) != 0) s += m(i, j) * v[j];
        out.push_back(s.with_reliable(rel));
    }
    return out;
}

/// Compositional inverse. Writing f = A x + h, the fixed point of
/// g = A^{-1}(x - h(g)) gains one correct degree per sweep.
inline Diffeo inverse(const Diffeo& f)
{
    auto ainv = formal::inverse(f.linear_part());
    require(ainv.has_value(), Errc::SingularLinearPart, "linear part is not invertible");
    const int n = f.dim(), t = f.trunc();
    std::vector<Jet> h;
    for (const auto& c : f.comps()) h.push_back(c.part(2, t));
    std::vector<Jet> x;
    for (int i = 0; i < n; ++i) x.push_back(Jet::variable(n, t, i));
    std::vector<Jet> g = apply_matrix(*ainv, x);
    for (int sweep = 2; sweep <= t; ++sweep) {
        std::vector<Jet> rhs;
        for (int i = 0; i < n; ++i) rhs.push_back(x[i] - substitute(h[i], g));
        g = apply_matrix(*ainv, rhs);
    }
    int rel = f.reliable();
    for (auto& c : g) c = c.with_reliable(std::min(c.reliable(), rel));
    return Diffeo(std::move(g));
}

/// Push-forward with a precomputed inverse: (Df . X) o f^{-1}.
inline VectorField pushforward(const Diffeo& f, const Diffeo& finv, const VectorField& x)
{
    require(f.dim() == x.dim(), Errc::DimensionMismatch, "diffeo and field dimensions differ");
    require(f.trunc() == x.trunc(), Errc::TruncMismatch, "diffeo and field truncations differ");
    std::vector<Jet> out;
    for (const auto& fi : f.comps()) out.push_back(substitute(apply(x, fi), finv.comps()));
    return VectorField(std::move(out));
}

inline VectorField pushforward(const Diffeo& f, const VectorField& x) { return pushforward(f, inverse(f), x); }

/// Word in a free group: (generator index, nonzero exponent) letters.
struct GroupWord {
    std::vector<std::pair<int, int>> letters;

    /// Free reduction: merge neighbours with equal index, drop zero powers.
    GroupWord reduced() const
    {
        std::vector<std::pair<int, int>> st;
        for (auto [g, e] : letters) {
            if (e == 0) continue;
            if (!st.empty() && st.back().first == g) {
                st.back().second += e;
                if (st.back().second == 0) st.pop_back();
            } else {
                st.emplace_back(g, e);
            }
        }
        return GroupWord{std::move(st)};
    }
    bool is_reduced() const { return reduced().letters == letters; }
    std::size_t length() const
    {
        std::size_t n = 0;
        for (auto [g, e] : letters) n += static_cast<std::size_t>(std::abs(e));
        return n;
    }
    friend bool operator==(const GroupWord&, const GroupWord&) = default;
};

/// Evaluates the reduced word left to right, so g1 g2 means g1 o g2.
inline Diffeo evaluate_word(const GroupWord& w, const std::vector<Diffeo>& gens)
{
    require(!gens.empty(), Errc::BadIndex, "no generators");
    GroupWord r = w.reduced();
    std::vector<std::optional<Diffeo>> inverses(gens.size());
    Diffeo acc = Diffeo::identity(gens.front().dim(), gens.front().trunc());
    for (auto [g, e] : r.letters) {
        require(g >= 0 && g < static_cast<int>(gens.size()), Errc::BadIndex, "generator index out of range");
        const Diffeo* step = &gens[g];
        if (e < 0) {
            if (!inverses[g]) inverses[g] = inverse(gens[g]);
            step = &*inverses[g];
        }
        for (int k = 0; k < std::abs(e); ++k) acc = compose(acc, *step);
    }
    return acc;
}

/// Averaging h = (1/m) sum_k a^{-k} o f^{k} for a diffeo of finite order m;
/// then h o f = a o h with a the linear part of f, and J^1 h = Id.
inline Diffeo bochner_linearize(const Diffeo& f, int m)
{
    require(m >= 1, Errc::NotPeriodic, "order must be positive");
    const int n = f.dim(), t = f.trunc();
    std::vector<Diffeo> iter{Diffeo::identity(n, t)};
    for (int k = 1; k <= m; ++k) iter.push_back(compose(f, iter.back()));
    const Diffeo& fm = iter.back();
    require(fm.is_identity(fm.reliable()), Errc::NotPeriodic, "f^m differs from the identity within the reliable order");
    Matrix a = f.linear_part();
    Matrix ainv = *formal::inverse(a);
    std::vector<Jet> sum(n, Jet(n, t));
    Matrix ak = Matrix::identity(n);
    for (int k = 0; k < m; ++k) {
        auto term = apply_matrix(ak, iter[k].comps());
        for (int i = 0; i < n; ++i) sum[i] += term[i];
        ak = ak * ainv;
    }
    Rational inv_m(1, m);
    for (auto& c : sum) c = inv_m * c;
    return Diffeo(std::move(sum));
}

} // namespace formal
