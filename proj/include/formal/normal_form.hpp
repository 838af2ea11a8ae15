#pragma once

#include <utility>
#include <vector>

#include "formal/diffeo.hpp"
#include "formal/resonance.hpp"

namespace formal {

struct JordanSplit {
    Matrix s; // semisimple
    Matrix n; // nilpotent
};

/// Additive Jordan decomposition over Q. Accepts characteristic
/// polynomials that split into rational linear factors and simple
/// irreducible quadratics with complex roots.
inline JordanSplit jordan_linear(const Matrix& m)
{
    require(m.is_square(), Errc::DimensionMismatch, "jordan decomposition needs a square matrix");
    const int n = m.rows();
    upoly::Poly cp = charpoly(m);
    auto roots = upoly::rational_roots(cp);
    upoly::Poly rest = cp;
    for (const auto& [r, mult] : roots)
        for (int k = 0; k < mult; ++k) rest = upoly::divmod(rest, upoly::Poly{-r, 1}).first;

    // Each block: generalized eigenspace basis and the action of S on it.
    std::vector<Vec> basis;
    std::vector<Matrix> s_blocks;
    for (const auto& [r, mult] : roots) {
        Matrix shifted = m - r * Matrix::identity(n);
        auto ker = nullspace(matrix_pow(shifted, mult));
        basis.insert(basis.end(), ker.begin(), ker.end());
        s_blocks.push_back(r * Matrix::identity(static_cast<int>(ker.size())));
    }
    if (upoly::degree(rest) > 0) {
        require(upoly::degree(rest) == 2, Errc::IrrationalSpectrum, "eigenvalues are not rational");
        Rational disc = rest[1] * rest[1] - 4 * rest[0] * rest[2];
        require(sgn(disc) < 0, Errc::IrrationalSpectrum, "real irrational eigenvalues");
        Matrix qm = eval_at(rest, m);
        auto ker = nullspace(qm);
        // M restricted to ker q(M) is semisimple since q is squarefree there.
        Matrix b = from_columns(ker, n);
        Matrix bt = b.transpose();
        Matrix restricted = *formal::inverse(bt * b) * bt * m * b;
        basis.insert(basis.end(), ker.begin(), ker.end());
        s_blocks.push_back(restricted);
    }
    Matrix v = from_columns(basis, n);
    Matrix d(n, n);
    int off = 0;
    for (const auto& blk : s_blocks) {
        for (int i = 0; i < blk.rows(); ++i)
            for (int j = 0; j < blk.cols(); ++j) d(off + i, off + j) = blk(i, j);
        off += blk.rows();
    }
    Matrix s = v * d * *formal::inverse(v);
    return {s, m - s};
}

inline bool is_diagonal(const Matrix& m)
{
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (i != j && sgn(m(i, j)) != 0) return false;
    return true;
}

/// Weight <i, lambda> - lambda_j of the monomial field x^i d/dx_j.
inline Rational weight(Mono m, int j, const std::vector<Rational>& lambda)
{
    Rational w = -lambda[j];
    for (std::size_t i = 0; i < lambda.size(); ++i) w += lambda[i] * mono::exponent(m, static_cast<int>(i));
    return w;
}

struct HomologicalSolution {
    VectorField y;
    VectorField residual;
};

namespace detail {

inline std::vector<Rational> diagonal_of(const VectorField& s)
{
    Matrix l = linear_part(s);
    require(is_diagonal(l) && !s.part(2, s.trunc()).lowest_degree(), Errc::NotDiagonal,
            "S must be a diagonal linear field");
    std::vector<Rational> lambda;
    for (int i = 0; i < l.rows(); ++i) lambda.push_back(l(i, i));
    return lambda;
}

inline int homogeneous_degree(const VectorField& term)
{
    auto lo = term.lowest_degree(), hi = term.highest_degree();
    if (!lo) return -1;
    require(*lo == *hi, Errc::NotHomogeneous, "term is not homogeneous");
    return *lo;
}

/// Coordinates of degree-d fields in the basis x^m d/dx_j.
struct HomogeneousBasis {
    int dim, trunc, degree;
    std::vector<Mono> monos;

    int size() const { return dim * static_cast<int>(monos.size()); }
    Vec coords(const VectorField& x) const
    {
        Vec v(size());
        for (int j = 0; j < dim; ++j)
            for (std::size_t k = 0; k < monos.size(); ++k) v[j * monos.size() + k] = x[j].coeff(monos[k]);
        return v;
    }
    VectorField field(const Vec& v) const
    {
        std::vector<Jet> comps;
        for (int j = 0; j < dim; ++j) {
            Jet c(dim, trunc);
            for (std::size_t k = 0; k < monos.size(); ++k) c.accumulate(monos[k], v[j * monos.size() + k]);
            comps.push_back(std::move(c));
        }
        return VectorField(std::move(comps));
    }
    VectorField element(int idx) const
    {
        Vec v(size());
        v[idx] = 1;
        return field(v);
    }
};

/// Matrix of Y -> [S, Y] on degree-d homogeneous fields.
inline Matrix ad_matrix(const VectorField& s, const HomogeneousBasis& hb)
{
    Matrix a(hb.size(), hb.size());
    for (int c = 0; c < hb.size(); ++c) {
        Vec col = hb.coords(bracket(s, hb.element(c)).as_exact(hb.trunc));
        for (int r = 0; r < hb.size(); ++r) a(r, c) = col[r];
    }
    return a;
}

} // namespace detail

/// Splits a homogeneous term as [S, Y] + residual with the residual in the
/// kernel of ad S and Y free of kernel components.
inline HomologicalSolution homological_solve(const VectorField& s, const VectorField& term)
{
    require(s.dim() == term.dim(), Errc::DimensionMismatch, "field dimensions differ");
    auto lambda = detail::diagonal_of(s);
    detail::homogeneous_degree(term);
    const int n = s.dim(), t = term.trunc();
    std::vector<Jet> y(n, Jet(n, t)), res(n, Jet(n, t));
    for (int j = 0; j < n; ++j)
        for (const auto& [m, c] : term[j].terms()) {
            Rational w = weight(m, j, lambda);
            if (sgn(w) == 0) res[j].accumulate(m, c);
            else y[j].accumulate(m, c / w);
        }
    return {VectorField(y).with_reliable(term.reliable()), VectorField(res).with_reliable(term.reliable())};
}

/// Same splitting for any semisimple linear S, via kernel and image of ad S.
inline HomologicalSolution homological_solve_semisimple(const VectorField& s, const VectorField& term)
{
    const int d = detail::homogeneous_degree(term);
    const int n = s.dim(), t = term.trunc();
    if (d < 0) return {VectorField::zero(n, t), VectorField::zero(n, t)};
    detail::HomogeneousBasis hb{n, t, d, mono::of_degree(n, d)};
    Matrix l = detail::ad_matrix(s, hb);
    auto ker = nullspace(l);
    Matrix l2 = l * l;
    const int k = static_cast<int>(ker.size()), sz = hb.size();
    Matrix sys(sz, k + sz);
    for (int r = 0; r < sz; ++r) {
        for (int c = 0; c < k; ++c) sys(r, c) = ker[c][r];
        for (int c = 0; c < sz; ++c) sys(r, k + c) = l2(r, c);
    }
    auto sol = solve(sys, hb.coords(term));
    require(sol.has_value(), Errc::NotSemisimple, "ad S is not semisimple on this degree");
    Vec resid(sz), z(sz);
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < sz; ++r) resid[r] += (*sol)[c] * ker[c][r];
    for (int c = 0; c < sz; ++c) z[c] = (*sol)[k + c];
    return {hb.field(l * z).with_reliable(term.reliable()), hb.field(resid).with_reliable(term.reliable())};
}

struct RemovedTerm {
    int degree;
    std::vector<int> exponents;
    int component; // 0-based
    Rational coefficient;
    friend bool operator==(const RemovedTerm&, const RemovedTerm&) = default;
};

struct NormalFormResult {
    Diffeo conjugator;
    VectorField normal;
    std::vector<RemovedTerm> removed;
};

namespace detail {

inline bool is_rotation_scaling(const Matrix& l)
{
    if (l.rows() != 2) return false;
    Rational tr = trace(l), dt = det(l);
    return sgn(tr * tr - 4 * dt) < 0;
}

} // namespace detail

/// Kills every non-resonant monomial of degree 2..upto by successive
/// tangent-to-identity changes id - Y, lowest degree first.
inline NormalFormResult poincare_dulac_normalize(const VectorField& x, int upto)
{
    require(upto >= 2, Errc::DegreeBoundTooSmall, "upto must be at least 2");
    const int n = x.dim(), t = x.trunc();
    upto = std::min(upto, t);
    Matrix l = linear_part(x);
    const bool diagonal = is_diagonal(l);
    require(diagonal || detail::is_rotation_scaling(l), Errc::NotDiagonal,
            "linear part must be diagonal or a 2x2 block with complex eigenvalues");
    VectorField s = VectorField::linear(l, t);
    std::vector<Rational> lambda;
    if (diagonal)
        for (int i = 0; i < n; ++i) lambda.push_back(l(i, i));

    NormalFormResult out{Diffeo::identity(n, t), x, {}};
    for (int d = 2; d <= upto; ++d) {
        VectorField term = out.normal.homogeneous(d);
        if (term.is_zero()) continue;
        HomologicalSolution hs = diagonal ? homological_solve(s, term) : homological_solve_semisimple(s, term);
        if (hs.y.is_zero()) continue;
        if (diagonal) {
            for (int j = 0; j < n; ++j)
                for (const auto& [m, c] : term[j].terms())
                    if (sgn(weight(m, j, lambda)) != 0) out.removed.push_back({d, mono::exponents(m, n), j, c});
        } else {
            VectorField killed = term - hs.residual;
            for (int j = 0; j < n; ++j)
                for (const auto& [m, c] : killed[j].terms()) out.removed.push_back({d, mono::exponents(m, n), j, c});
        }
        std::vector<Jet> phi;
        for (int i = 0; i < n; ++i) phi.push_back(Jet::variable(n, t, i) - hs.y[i].with_reliable(t));
        Diffeo step(std::move(phi));
        out.normal = pushforward(step, out.normal);
        out.conjugator = compose(step, out.conjugator);
    }
    return out;
}

/// Conjugates a field with diagonal non-resonant linear part to that part.
inline NormalFormResult linearize_nonresonant(const VectorField& x, int upto)
{
    Matrix l = linear_part(x);
    require(is_diagonal(l), Errc::NotDiagonal, "linear part must be diagonal");
    const int n = x.dim();
    std::vector<Rational> lambda;
    for (int i = 0; i < n; ++i) lambda.push_back(l(i, i));
    if (n == 2 && (sgn(lambda[0]) != 0 || sgn(lambda[1]) != 0)) {
        require(is_nonresonant(lambda), Errc::ResonantSpectrum, "eigenvalues are resonant");
    } else {
        for (int d = 2; d <= std::min(upto, x.trunc()); ++d)
            for (Mono m : mono::of_degree(n, d))
                for (int j = 0; j < n; ++j)
                    require(sgn(weight(m, j, lambda)) != 0, Errc::ResonantSpectrum, "eigenvalues are resonant");
    }
    return poincare_dulac_normalize(x, upto);
}

/// Semisimple and nilpotent parts of a field already in normal form with
/// diagonal linear part.
struct JordanPair {
    VectorField s;
    VectorField n;
};

inline JordanPair jordan_pair(const VectorField& normal)
{
    Matrix l = linear_part(normal);
    require(is_diagonal(l), Errc::NotDiagonal, "expects a diagonal linear part");
    VectorField s = VectorField::linear(l, normal.trunc()).with_reliable(normal.reliable());
    return {s, normal - s};
}

} // namespace formal
