#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formal/division.hpp"
#include "formal/normal_form.hpp"

namespace formal {

/// Finite family of vector fields, with structure constants once the span
/// is known to be closed under brackets.
struct AlgebraPresentation {
    std::vector<VectorField> generators;
    /// structure[i][j][k] is the coefficient of g_k in [g_i, g_j].
    std::optional<std::vector<std::vector<Vec>>> structure;

    int size() const { return static_cast<int>(generators.size()); }
    int dim() const { return generators.front().dim(); }
    int trunc() const { return generators.front().trunc(); }
};

class NotClosedError : public Error {
public:
    NotClosedError(int i, int j, VectorField residual)
        : Error(Errc::NotClosed, "bracket of generators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                     " leaves the span"),
          i_(i), j_(j), residual_(std::move(residual))
    {}
    int i() const { return i_; }
    int j() const { return j_; }
    const VectorField& residual() const { return residual_; }

private:
    int i_, j_;
    VectorField residual_;
};

class NotInvariantError : public Error {
public:
    NotInvariantError(int index, Jet residual)
        : Error(Errc::NotInvariant, "image of basis element " + std::to_string(index + 1) + " leaves the span"),
          index_(index), residual_(std::move(residual))
    {}
    int index() const { return index_; }
    const Jet& residual() const { return residual_; }

private:
    int index_;
    Jet residual_;
};

class StarConditionError : public Error {
public:
    StarConditionError(int i, int j)
        : Error(Errc::StarConditionFails,
                "coefficient pair " + std::to_string(i + 1) + ", " + std::to_string(j + 1) + " violates the condition"),
          i_(i), j_(j)
    {}
    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_, j_;
};

namespace detail {

/// Sparse coordinates over (component, monomial) pairs up to a degree.
class TermIndex {
public:
    explicit TermIndex(int upto) : upto_(upto) {}

    void add(const Jet& f, int comp = 0)
    {
        for (const auto& [m, c] : f.terms())
            if (mono::degree(m) <= upto_) index_.try_emplace({comp, m}, 0);
    }
    void add(const VectorField& x)
    {
        for (int j = 0; j < x.dim(); ++j) add(x[j], j);
    }
    /// Freezes column numbers in ascending (component, monomial) order.
    void freeze()
    {
        int k = 0;
        for (auto& kv : index_) kv.second = k++;
    }
    int size() const { return static_cast<int>(index_.size()); }

    Vec of(const Jet& f, int comp = 0) const
    {
        Vec v(size());
        fill(v, f, comp);
        return v;
    }
    Vec of(const VectorField& x) const
    {
        Vec v(size());
        for (int j = 0; j < x.dim(); ++j) fill(v, x[j], j);
        return v;
    }
    Jet jet(const Vec& v, int dim, int trunc) const { return field(v, dim, trunc, 1)[0]; }
    VectorField field(const Vec& v, int dim, int trunc) const { return VectorField(field(v, dim, trunc, dim)); }

private:
    void fill(Vec& v, const Jet& f, int comp) const
    {
        for (const auto& [m, c] : f.terms()) {
            if (mono::degree(m) > upto_) continue;
            auto it = index_.find({comp, m});
            require(it != index_.end(), Errc::BadIndex, "term missing from coordinate index");
            v[it->second] = c;
        }
    }
    std::vector<Jet> field(const Vec& v, int dim, int trunc, int comps) const
    {
        std::vector<Jet> out(comps, Jet(dim, trunc));
        for (const auto& [key, k] : index_) out[key.first].accumulate(key.second, v[k]);
        return out;
    }

    int upto_;
    std::map<std::pair<int, Mono>, int> index_;
};

/// Echelon form of a list of vectors that remembers how each row was
/// combined from the inputs, so membership queries return coefficients.
class SpanReducer {
public:
    explicit SpanReducer(const std::vector<Vec>& gens) : k_(static_cast<int>(gens.size()))
    {
        for (int i = 0; i < k_; ++i) {
            Vec combo(k_);
            combo[i] = 1;
            Vec row = gens[i];
            eliminate(row, combo);
            auto p = std::find_if(row.begin(), row.end(), [](const Rational& x) { return sgn(x) != 0; });
            if (p == row.end()) {
                dependent_ = true;
                continue;
            }
            const int col = static_cast<int>(p - row.begin());
            Rational inv = 1 / row[col];
            for (auto& x : row) x *= inv;
            for (auto& x : combo) x *= inv;
            for (auto& r : rows_) {
                Rational f = r.row[col];
                if (sgn(f) == 0) continue;
                for (std::size_t c = 0; c < row.size(); ++c) r.row[c] -= f * row[c];
                for (int c = 0; c < k_; ++c) r.combo[c] -= f * combo[c];
            }
            rows_.push_back({col, std::move(row), std::move(combo)});
        }
    }

    bool dependent() const { return dependent_; }
    int rank() const { return static_cast<int>(rows_.size()); }

    /// Splits v as (sum coeffs_i gens_i) + residual with the residual zero
    /// on every pivot column.
    std::pair<Vec, Vec> reduce(Vec v) const
    {
        Vec coeffs(k_);
        for (const auto& r : rows_) {
            Rational f = v[r.pivot];
            if (sgn(f) == 0) continue;
            for (std::size_t c = 0; c < v.size(); ++c) v[c] -= f * r.row[c];
            for (int c = 0; c < k_; ++c) coeffs[c] += f * r.combo[c];
        }
        return {coeffs, v};
    }

private:
    struct Row {
        int pivot;
        Vec row;
        Vec combo;
    };
    void eliminate(Vec& v, Vec& combo) const
    {
        for (const auto& r : rows_) {
            Rational f = v[r.pivot];
            if (sgn(f) == 0) continue;
            for (std::size_t c = 0; c < v.size(); ++c) v[c] -= f * r.row[c];
            for (int c = 0; c < k_; ++c) combo[c] -= f * r.combo[c];
        }
    }

    int k_;
    bool dependent_ = false;
    std::vector<Row> rows_;
};

inline Vec scaled(const Rational& s, Vec v)
{
    for (auto& x : v) x *= s;
    return v;
}

inline bool is_zero_vec(const Vec& v)
{
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

struct Membership {
    Vec coeffs;
    VectorField residual;
};

/// Writes v in the span of basis, comparing coefficients up to degree upto.
inline Membership span_membership(const std::vector<VectorField>& basis, const VectorField& v, int upto)
{
    TermIndex idx(upto);
    for (const auto& b : basis) idx.add(b);
    idx.add(v);
    idx.freeze();
    std::vector<Vec> rows;
    for (const auto& b : basis) rows.push_back(idx.of(b));
    SpanReducer red(rows);
    auto [coeffs, rest] = red.reduce(idx.of(v));
    return {coeffs, idx.field(rest, v.dim(), v.trunc()).with_reliable(upto)};
}

inline std::optional<Vec> span_coefficients(const std::vector<VectorField>& basis, const VectorField& v, int upto)
{
    Membership m = span_membership(basis, v, upto);
    if (!m.residual.is_zero()) return std::nullopt;
    return m.coeffs;
}

inline VectorField combine(const std::vector<VectorField>& gens, const Vec& c)
{
    VectorField out = VectorField::zero(gens.front().dim(), gens.front().trunc());
    int rel = gens.front().trunc();
    for (std::size_t k = 0; k < gens.size(); ++k) {
        rel = std::min(rel, gens[k].reliable());
        if (sgn(c[k]) != 0) out = out + c[k] * gens[k];
    }
    return out.with_reliable(rel);
}

inline int common_reliable(const std::vector<VectorField>& gens)
{
    int r = gens.front().trunc();
    for (const auto& g : gens) r = std::min(r, g.reliable());
    return r;
}

/// Determinant of a small matrix of jets by cofactor expansion.
inline Jet jet_det(const std::vector<std::vector<Jet>>& m)
{
    const std::size_t k = m.size();
    if (k == 1) return m[0][0];
    Jet acc(m[0][0].dim(), m[0][0].trunc());
    int rel = m[0][0].trunc();
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::vector<Jet>> minor;
        for (std::size_t r = 1; r < k; ++r) {
            std::vector<Jet> row;
            for (std::size_t cc = 0; cc < k; ++cc)
                if (cc != c) row.push_back(m[r][cc]);
            minor.push_back(std::move(row));
        }
        Jet term = m[0][c] * jet_det(minor);
        rel = std::min(rel, term.reliable());
        acc = c % 2 ? acc - term : acc + term;
    }
    return acc.with_reliable(rel);
}

inline void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<int>> subsets(int n, int k)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    subsets(n, k, 0, cur, out);
    return out;
}

} // namespace detail

/// Checks that the span of gens is closed under brackets and records the
/// structure constants. Comparisons run up to the common reliable order.
inline AlgebraPresentation closure_check(const std::vector<VectorField>& gens)
{
    require(!gens.empty(), Errc::DimensionMismatch, "presentation needs generators");
    const int n = gens.front().dim(), t = gens.front().trunc();
    for (const auto& g : gens) {
        require(g.dim() == n, Errc::DimensionMismatch, "generator dimensions differ");
        require(g.trunc() == t, Errc::TruncMismatch, "generator truncations differ");
    }
    const int r0 = detail::common_reliable(gens);
    {
        detail::TermIndex idx(r0);
        for (const auto& g : gens) idx.add(g);
        idx.freeze();
        std::vector<Vec> rows;
        for (const auto& g : gens) rows.push_back(idx.of(g));
        require(!detail::SpanReducer(rows).dependent(), Errc::DependentGenerators,
                "generators are linearly dependent");
    }
    const int k = static_cast<int>(gens.size());
    std::vector<std::vector<Vec>> c(k, std::vector<Vec>(k, Vec(k)));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            VectorField b = bracket(gens[i], gens[j]);
            const int r = std::min(b.reliable(), r0);
            detail::Membership m = detail::span_membership(gens, b, r);
            if (!m.residual.is_zero()) throw NotClosedError(i, j, m.residual);
            c[i][j] = m.coeffs;
            for (int l = 0; l < k; ++l) c[j][i][l] = -m.coeffs[l];
        }
    return {gens, std::move(c)};
}

inline const std::vector<std::vector<Vec>>& structure_of(AlgebraPresentation& a)
{
    if (!a.structure) a = closure_check(a.generators);
    return *a.structure;
}

/// Matrix of ad g_i in the generator basis: column k holds [g_i, g_k].
inline Matrix ad_matrix(const AlgebraPresentation& a, int i)
{
    require(a.structure.has_value(), Errc::NotClosed, "structure constants are missing");
    const int k = a.size();
    Matrix m(k, k);
    for (int col = 0; col < k; ++col)
        for (int row = 0; row < k; ++row) m(row, col) = (*a.structure)[i][col][row];
    return m;
}

struct RankReport {
    int rank;
    /// Order up to which vanishing of the larger minors was decided.
    int order;
};

/// Generic pointwise rank: the largest k with a nonvanishing k x k minor of
/// the component matrix, decided within reliable order.
inline RankReport generic_rank_report(const AlgebraPresentation& a)
{
    require(a.size() > 0, Errc::DimensionMismatch, "presentation needs generators");
    const int n = a.dim(), m = a.size();
    int order = a.trunc();
    for (int k = std::min(n, m); k >= 1; --k) {
        for (const auto& cols : detail::subsets(m, k))
            for (const auto& rows : detail::subsets(n, k)) {
                std::vector<std::vector<Jet>> sub;
                for (int r : rows) {
                    std::vector<Jet> line;
                    for (int c : cols) line.push_back(a.generators[c][r]);
                    sub.push_back(std::move(line));
                }
                Jet d = detail::jet_det(sub);
                if (d.order() <= d.reliable()) return {k, order};
                order = std::min(order, d.reliable());
            }
    }
    return {0, order};
}

inline int generic_rank(const AlgebraPresentation& a) { return generic_rank_report(a).rank; }

struct Rank1Saturation {
    VectorField director;
    std::vector<Jet> coefficient_space; // one coefficient per generator
    bool saturable;
};

/// Writes a rank-one algebra as E * X with X of trivial component gcd.
inline Rank1Saturation saturate_rank1(const AlgebraPresentation& a)
{
    require(generic_rank(a) == 1, Errc::NotRank1, "generic rank is not one");
    require(a.dim() <= 2, Errc::GcdUnsupported, "gcd needs at most two variables");
    const auto& gens = a.generators;
    auto y = std::find_if(gens.begin(), gens.end(), [](const VectorField& g) { return !g.is_zero(); });
    Jet g(a.dim(), a.trunc());
    for (const Jet& c : y->comps())
        if (!c.is_zero()) g = g.is_zero() ? gcd_poly(c, c) : gcd_poly(g, c);
    std::vector<Jet> dir;
    for (const Jet& c : y->comps()) dir.push_back(c.is_zero() ? c.with_reliable(c.reliable() - g.order()) : divide_exact(c, g));
    VectorField x(dir);

    // Components of the director ordered by vanishing order, best divisor first.
    std::vector<int> order(a.dim());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int p, int q) { return x[p].order() < x[q].order(); });

    std::vector<Jet> coeffs;
    for (const auto& gen : gens) {
        std::optional<Jet> found;
        for (int j : order) {
            if (x[j].is_zero()) continue;
            Jet f;
            try {
                f = divide_exact(gen[j], x[j]);
            } catch (const Error&) {
                continue;
            }
            VectorField back = f * x;
            const int r = std::min(back.reliable(), gen.reliable());
            if (back.agrees(gen, r)) {
                found = f;
                break;
            }
        }
        require(found.has_value(), Errc::NotRank1, "generator is not a multiple of the director");
        coeffs.push_back(*found);
    }

    // Condition f X(g) - g X(f) in span E.
    const int k = static_cast<int>(coeffs.size());
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            Jet w = coeffs[i] * apply(x, coeffs[j]) - coeffs[j] * apply(x, coeffs[i]);
            int r = w.reliable();
            for (const auto& f : coeffs) r = std::min(r, f.reliable());
            detail::TermIndex idx(r);
            for (const auto& f : coeffs) idx.add(f);
            idx.add(w);
            idx.freeze();
            std::vector<Vec> rows;
            for (const auto& f : coeffs) rows.push_back(idx.of(f));
            if (!detail::is_zero_vec(detail::SpanReducer(rows).reduce(idx.of(w)).second)) throw StarConditionError(i, j);
        }
    bool saturable = std::any_of(coeffs.begin(), coeffs.end(), [](const Jet& f) { return sgn(f.constant_term()) != 0; });
    return {x, coeffs, saturable};
}

/// Matrix (l_i^j) with X(f_i) = sum_j l_i^j f_j; row i describes X(f_i).
inline Matrix derivation_matrix(const VectorField& x, const std::vector<Jet>& basis)
{
    require(!basis.empty(), Errc::DimensionMismatch, "basis is empty");
    const int k = static_cast<int>(basis.size());
    Matrix out(k, k);
    for (int i = 0; i < k; ++i) {
        Jet y = apply(x, basis[i]);
        int r = y.reliable();
        for (const auto& f : basis) r = std::min(r, f.reliable());
        detail::TermIndex idx(r);
        for (const auto& f : basis) idx.add(f);
        idx.add(y);
        idx.freeze();
        std::vector<Vec> rows;
        for (const auto& f : basis) rows.push_back(idx.of(f));
        auto [coeffs, rest] = detail::SpanReducer(rows).reduce(idx.of(y));
        if (!detail::is_zero_vec(rest)) throw NotInvariantError(i, idx.jet(rest, y.dim(), y.trunc()).with_reliable(r));
        for (int j = 0; j < k; ++j) out(i, j) = coeffs[j];
    }
    return out;
}

/// Fundamental matrix exp(L x) of g' = L g as one-variable jets;
/// result[c][r] is row r of column c.
inline std::vector<std::vector<Jet>> solve_linear_ode_jet(const Matrix& l, int upto)
{
    require(l.is_square(), Errc::DimensionMismatch, "system matrix must be square");
    require(upto >= 0, Errc::DegreeBoundTooSmall, "upto must be non-negative");
    const int n = l.rows();
    std::vector<std::vector<Jet>> cols(n, std::vector<Jet>(n, Jet(1, upto)));
    Matrix term = Matrix::identity(n);
    for (int k = 0; k <= upto; ++k) {
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < n; ++r) cols[c][r].accumulate(mono::var(0, k), term(r, c));
        term = Rational(1, k + 1) * (l * term);
    }
    return cols;
}

/// Lower central series test on the structure constants.
inline bool is_nilpotent(AlgebraPresentation a)
{
    const auto& c = structure_of(a);
    const int k = a.size();
    std::vector<Vec> cur;
    for (int i = 0; i < k; ++i) {
        Vec e(k);
        e[i] = 1;
        cur.push_back(e);
    }
    for (int step = 0; step <= k; ++step) {
        std::vector<Vec> next;
        for (int i = 0; i < k; ++i)
            for (const Vec& v : cur) {
                Vec w(k);
                for (int j = 0; j < k; ++j)
                    if (sgn(v[j]) != 0)
                        for (int l = 0; l < k; ++l) w[l] += v[j] * c[i][j][l];
                next.push_back(std::move(w));
            }
        Matrix m(static_cast<int>(next.size()), k);
        for (int r = 0; r < m.rows(); ++r)
            for (int j = 0; j < k; ++j) m(r, j) = next[r][j];
        Rref red = rref(m);
        const int dim = static_cast<int>(red.pivots.size());
        if (dim == 0) return true;
        if (dim == static_cast<int>(cur.size())) return false;
        cur.clear();
        for (int r = 0; r < dim; ++r) cur.push_back(red.reduced.row(r));
    }
    return false;
}

/// Solves X(f) = 0 with f(0) = 0 for f of degree <= upto. Among solutions
/// returns the one with the lowest leading monomial, scaled to coefficient 1
/// there and reduced against the other solutions.
inline std::optional<Jet> first_integral_jet(const VectorField& x, int upto)
{
    for (const Jet& c : x.comps())
        require(sgn(c.constant_term()) == 0, Errc::NonSingularityViolated, "field must vanish at the origin");
    const int n = x.dim(), t = x.trunc();
    const int ord = vanishing_order(x);
    const int top = std::min({upto, t, x.reliable() - ord + 1});
    if (top < 1) return std::nullopt;
    const int eq_top = top + ord - 1;

    std::vector<Mono> unknowns;
    for (int d = 1; d <= top; ++d)
        for (Mono m : mono::of_degree(n, d)) unknowns.push_back(m);
    std::vector<Jet> images;
    detail::TermIndex idx(eq_top);
    for (Mono m : unknowns) {
        images.push_back(apply(x, Jet::monomial(n, t, m)));
        idx.add(images.back());
    }
    idx.freeze();
    Matrix sys(idx.size(), static_cast<int>(unknowns.size()));
    for (std::size_t c = 0; c < unknowns.size(); ++c) {
        Vec col = idx.of(images[c]);
        for (int r = 0; r < idx.size(); ++r) sys(r, static_cast<int>(c)) = col[r];
    }
    auto ker = nullspace(sys);
    if (ker.empty()) return std::nullopt;
    Matrix kb(static_cast<int>(ker.size()), static_cast<int>(unknowns.size()));
    for (int r = 0; r < kb.rows(); ++r)
        for (int c = 0; c < kb.cols(); ++c) kb(r, c) = ker[r][c];
    Rref red = rref(kb);
    Jet f(n, t);
    for (int c = 0; c < kb.cols(); ++c) f.accumulate(unknowns[c], red.reduced(0, c));
    return f.with_reliable(top);
}

/// Fields of degree <= upto commuting with every generator, compared up
/// to the same degree.
inline std::vector<VectorField> centralizer(const std::vector<VectorField>& gens, int upto)
{
    const int n = gens.front().dim(), t = gens.front().trunc();
    const int top = std::min(upto, detail::common_reliable(gens) - 1);
    require(top >= 0, Errc::DegreeBoundTooSmall, "nothing reliable to compare");
    std::vector<VectorField> basis;
    for (int j = 0; j < n; ++j)
        for (int d = 0; d <= top; ++d)
            for (Mono m : mono::of_degree(n, d)) basis.push_back(VectorField::coordinate(n, t, j, Jet::monomial(n, t, m)));
    std::vector<std::vector<VectorField>> images(gens.size());
    detail::TermIndex idx(top);
    for (std::size_t g = 0; g < gens.size(); ++g)
        for (const auto& b : basis) {
            images[g].push_back(bracket(b, gens[g]));
            idx.add(images[g].back().with_reliable(top));
        }
    idx.freeze();
    const int per = idx.size();
    Matrix sys(per * static_cast<int>(gens.size()), static_cast<int>(basis.size()));
    for (std::size_t g = 0; g < gens.size(); ++g)
        for (std::size_t c = 0; c < basis.size(); ++c) {
            Vec col = idx.of(images[g][c]);
            for (int r = 0; r < per; ++r) sys(static_cast<int>(g) * per + r, static_cast<int>(c)) = col[r];
        }
    std::vector<VectorField> out;
    for (const Vec& v : nullspace(sys)) out.push_back(detail::combine(basis, v).with_reliable(top));
    return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class Family {
    Translation,  // <d/dx>
    PowerLambda,  // <x^(p+1)/(1 - lambda x^p) d/dx>
    Affine,       // <d/dx, x d/dx>
    AffinePower,  // <x d/dx, x^p d/dx>
    Projective,   // <d/dx, x d/dx, x^2 d/dx>
    Type1,
    Type2,
    Type3,
    Type4,
    Type5,
    Type6,
    Type7,
};

inline std::string family_name(Family f)
{
    switch (f) {
    case Family::Translation: return "translation";
    case Family::PowerLambda: return "power-lambda";
    case Family::Affine: return "affine";
    case Family::AffinePower: return "affine-power";
    case Family::Projective: return "projective";
    case Family::Type1: return "type-1";
    case Family::Type2: return "type-2";
    case Family::Type3: return "type-3";
    case Family::Type4: return "type-4";
    case Family::Type5: return "type-5";
    case Family::Type6: return "type-6";
    case Family::Type7: return "type-7";
    }
    return "unknown";
}

struct ClassificationTag {
    Family family;
    std::vector<std::pair<std::string, Rational>> parameters;
    /// One-variable series a(t) for the families that carry one.
    std::optional<Jet> series;
    Diffeo certificate;
    /// Model generators: the certificate moves the input span onto theirs.
    std::vector<VectorField> normal_basis;

    std::optional<Rational> parameter(const std::string& name) const
    {
        for (const auto& [k, v] : parameters)
            if (k == name) return v;
        return std::nullopt;
    }
};

/// Pushes every generator forward and checks that the images span the same
/// space as the model generators, coefficientwise up to reliable order.
inline bool certificate_sound(const AlgebraPresentation& a, const ClassificationTag& tag)
{
    if (static_cast<int>(tag.normal_basis.size()) != a.size()) return false;
    Diffeo inv = inverse(tag.certificate);
    std::vector<VectorField> pushed;
    for (const auto& g : a.generators) pushed.push_back(pushforward(tag.certificate, inv, g));
    const int r = std::min(detail::common_reliable(pushed), detail::common_reliable(tag.normal_basis));
    if (r < 1) return false;
    for (const auto& p : pushed)
        if (!detail::span_coefficients(tag.normal_basis, p, r)) return false;
    for (const auto& b : tag.normal_basis)
        if (!detail::span_coefficients(pushed, b, r)) return false;
    return true;
}

namespace detail {

inline ClassificationTag checked(const AlgebraPresentation& a, ClassificationTag tag)
{
    require(certificate_sound(a, tag), Errc::Unclassifiable, "certificate does not verify");
    return tag;
}

/// Diffeo of the line with Phi' = b(0)/b, sending b d/dx to b(0) d/dx.
inline Diffeo straighten_line(const Jet& b)
{
    Jet d = b.constant_term() * invert_unit(b);
    return Diffeo({integrate(d, 0)});
}

inline VectorField line_field(int trunc, std::initializer_list<std::pair<int, Rational>> terms)
{
    Jet c(1, trunc);
    for (const auto& [k, v] : terms) c.accumulate(mono::var(0, k), v);
    return VectorField({c});
}

/// Element A of span{u, v} with [A, B] = B, where B = [u, v] = c0 u + c1 v.
inline std::optional<Vec> affine_partner(const Vec& c)
{
    if (sgn(c[1]) != 0) return Vec{1 / c[1], 0};
    if (sgn(c[0]) != 0) return Vec{0, -1 / c[0]};
    return std::nullopt;
}

inline ClassificationTag classify_line_one(const AlgebraPresentation& a)
{
    const VectorField& x = a.generators[0];
    const int t = a.trunc();
    const Jet& c = x[0];
    if (sgn(c.constant_term()) != 0) {
        Diffeo phi = straighten_line(c);
        return checked(a, {Family::Translation, {}, std::nullopt, phi, {line_field(t, {{0, 1}})}});
    }
    const int ord = vanishing_order(x);
    const int p = ord - 1;
    if (p == 0) {
        NormalFormResult lin = linearize_nonresonant(x, t);
        return checked(a, {Family::PowerLambda, {{"p", 0}, {"lambda", 0}}, std::nullopt, lin.conjugator,
                           {line_field(t, {{1, 1}})}});
    }
    // Unit leading coefficient, then order by order toward x^(p+1)/(1 - lambda x^p).
    VectorField f = (1 / c.coeff({ord})) * x;
    Diffeo conj = Diffeo::identity(1, t);
    Rational lambda = 0;
    auto target = [&](int deg) -> Rational {
        int j = deg - p - 1;
        if (j % p != 0) return 0;
        Rational v = 1;
        for (int k = 0; k < j / p; ++k) v *= lambda;
        return v;
    };
    for (int j = 1; p + 1 + j <= f.reliable(); ++j) {
        const int deg = p + 1 + j;
        if (j == p) {
            lambda = f[0].coeff({deg});
            continue;
        }
        Rational gap = target(deg) - f[0].coeff({deg});
        if (sgn(gap) == 0) continue;
        Jet step = Jet::variable(1, t, 0) + Jet::monomial(1, t, mono::var(0, j + 1), gap / (j - p));
        Diffeo phi({step});
        f = pushforward(phi, f);
        conj = compose(phi, conj);
    }
    Jet model(1, t);
    for (int deg = p + 1; deg <= t; ++deg) model.accumulate(mono::var(0, deg), target(deg));
    return checked(a, {Family::PowerLambda, {{"p", p}, {"lambda", lambda}}, std::nullopt, conj, {VectorField({model})}});
}

inline ClassificationTag classify_line_two(const AlgebraPresentation& a, const std::vector<VectorField>& pair,
                                           const Vec& c)
{
    const int t = a.trunc();
    auto partner = affine_partner(c);
    require(partner.has_value(), Errc::Unclassifiable, "two-dimensional algebra on the line must be non-abelian");
    VectorField b = combine(pair, c);
    VectorField al = combine(pair, *partner);
    if (sgn(b[0].constant_term()) != 0) {
        Diffeo phi = straighten_line(b[0]);
        return checked(a, {Family::Affine, {}, std::nullopt, phi, {line_field(t, {{0, 1}}), line_field(t, {{1, 1}})}});
    }
    const int p = vanishing_order(b);
    require(p >= 2, Errc::Unclassifiable, "no affine model for this bracket");
    NormalFormResult lin = linearize_nonresonant(al, t);
    return checked(a, {Family::AffinePower, {{"p", p}}, std::nullopt, lin.conjugator,
                       {line_field(t, {{1, 1}}), line_field(t, {{p, 1}})}});
}

inline ClassificationTag classify_line_three(const AlgebraPresentation& a)
{
    const auto& g = a.generators;
    const int t = a.trunc();
    // Singular subalgebra: kernel of the evaluation at 0.
    Matrix ev(1, 3);
    for (int i = 0; i < 3; ++i) ev(0, i) = g[i][0].constant_term();
    auto ker = nullspace(ev);
    require(ker.size() == 2, Errc::Unclassifiable, "no regular element");
    std::vector<VectorField> sub{combine(g, ker[0]), combine(g, ker[1])};
    VectorField b = bracket(sub[0], sub[1]);
    auto c = span_coefficients(sub, b, std::min(b.reliable(), common_reliable(sub)));
    require(c.has_value(), Errc::Unclassifiable, "singular part is not a subalgebra");
    auto partner = affine_partner(*c);
    require(partner.has_value(), Errc::Unclassifiable, "singular part is abelian");
    require(vanishing_order(b) == 2, Errc::Unclassifiable, "bracket of singular part has the wrong order");
    NormalFormResult lin = linearize_nonresonant(combine(sub, *partner), t);
    return checked(a, {Family::Projective, {}, std::nullopt, lin.conjugator,
                       {line_field(t, {{0, 1}}), line_field(t, {{1, 1}}), line_field(t, {{2, 1}})}});
}

} // namespace detail

/// Classification of finite-dimensional algebras of formal fields on the line.
inline ClassificationTag classify_dim1(AlgebraPresentation a)
{
    require(a.dim() == 1, Errc::UnsupportedDimension, "ambient dimension must be 1");
    require(a.size() <= 3, Errc::Unclassifiable, "dimension above 3 has no model on the line");
    const auto& c = structure_of(a);
    if (a.size() == 1) return detail::classify_line_one(a);
    if (a.size() == 2) return detail::classify_line_two(a, a.generators, c[0][1]);
    return detail::classify_line_three(a);
}

namespace detail {

/// Linear change of coordinates as a diffeo.
inline Diffeo linear_diffeo(const Matrix& p, int t) { return Diffeo::linear(p, t); }

/// Coefficients a_k with f = sum a_k u^k, returned as a one-variable jet.
inline Jet series_in(const Jet& f, const Jet& u)
{
    const int t = f.trunc();
    const int du = *u.lowest_degree();
    const Mono lead = u.terms().rbegin()->first;
    const Rational lc = u.terms().rbegin()->second;
    const int kmax = f.reliable() / du;
    Jet a(1, t), rebuilt(f.dim(), t);
    Jet power = Jet::constant(f.dim(), t, 1);
    Rational lp = 1;
    for (int k = 0; k <= kmax; ++k) {
        Mono mk = 0;
        for (int s = 0; s < k; ++s) mk += lead;
        Rational ak = f.coeff(mk) / lp;
        a.accumulate(mono::var(0, k), ak);
        rebuilt += ak * power;
        power = power * u;
        lp *= lc;
    }
    require(rebuilt.agrees(f, f.reliable()), Errc::Unclassifiable, "coefficient is not a function of the invariant");
    return a.with_reliable(kmax);
}

/// Resonant model S, complement T and invariant u for the families whose
/// second generator is a(u) W.
struct ResonantFrame {
    Family family;
    VectorField s, tfield;
    Jet u;
    Rational tau; // T(u) = tau u^e
    int e;
};

inline std::pair<Jet, Jet> frame_coefficients(const ResonantFrame& fr, const VectorField& b, int p, int q)
{
    const int t = b.trunc();
    Jet x1 = Jet::variable(2, t, 0), x2 = Jet::variable(2, t, 1);
    Jet b1, b2;
    switch (fr.family) {
    case Family::Type3:
        b1 = -(1 / Rational(p)) * divide_exact(b[1], x2);
        b2 = divide_exact(b[0], x1) - Rational(q) * b1;
        break;
    case Family::Type6:
        b1 = divide_exact(x2 * b[0] - x1 * b[1], fr.u);
        b2 = divide_exact(x1 * b[0] + x2 * b[1], fr.u);
        break;
    default:
        b1 = divide_exact(b[0], x1);
        b2 = b[1];
        break;
    }
    return {series_in(b1, fr.u), series_in(b2, fr.u)};
}

/// Time-one flow of h(u) S, which commutes with S.
inline Diffeo frame_flow(const ResonantFrame& fr, const Jet& h, int p, int q)
{
    const int t = h.trunc();
    Jet x1 = Jet::variable(2, t, 0), x2 = Jet::variable(2, t, 1);
    switch (fr.family) {
    case Family::Type3: return Diffeo({x1 * exp_jet(Rational(q) * h), x2 * exp_jet(Rational(-p) * h)});
    case Family::Type6: {
        Jet c = cos_jet(h), s = sin_jet(h);
        return Diffeo({x1 * c + x2 * s, x2 * c - x1 * s});
    }
    default: return Diffeo({x1 * exp_jet(h), x2});
    }
}

inline ClassificationTag classify_pencil_with_identity(const AlgebraPresentation& a, const Vec& ab)
{
    const auto& g = a.generators;
    const int t = a.trunc();
    VectorField al = combine(g, ab);
    VectorField other = sgn(ab[0]) != 0 ? g[1] : g[0];
    NormalFormResult lin = linearize_nonresonant(al, t);
    VectorField b = pushforward(lin.conjugator, other);
    require(!b.part(2, b.reliable()).lowest_degree(), Errc::Unclassifiable, "partner of the radial field is not linear");
    Matrix m = linear_part(b);
    Rational half = trace(m) / 2;
    Matrix m0 = m - half * Matrix::identity(2);
    Rational dt = det(m0);
    Matrix pinv(2, 2);
    Family fam;
    std::vector<VectorField> model;
    VectorField r2 = VectorField::euler(2, t);
    if (sgn(dt) == 0) {
        // Jordan basis v, M0 v so that M0 acts as x1 d/dx2.
        Vec v{1, 0};
        if (detail::is_zero_vec(m0 * v)) v = {0, 1};
        Vec w = m0 * v;
        pinv = from_columns({v, w}, 2);
        fam = Family::Type4;
        model = {r2, VectorField::linear(Matrix{{0, 0}, {1, 0}}, t)};
    } else if (sgn(dt) < 0) {
        auto mu = upoly::rational_sqrt(-dt);
        require(mu.has_value(), Errc::Unclassifiable, "eigenvalues are irrational");
        auto v1 = nullspace(m0 - *mu * Matrix::identity(2));
        auto v2 = nullspace(m0 + *mu * Matrix::identity(2));
        pinv = from_columns({v1[0], v2[0]}, 2);
        fam = Family::Type1;
        model = {VectorField::linear(Matrix{{1, 0}, {0, 0}}, t), VectorField::linear(Matrix{{0, 0}, {0, 1}}, t)};
    } else {
        auto om = upoly::rational_sqrt(dt);
        require(om.has_value(), Errc::Unclassifiable, "rotation speed is irrational");
        Vec v2{1, 0};
        Vec v1 = scaled(1 / *om, m0 * v2);
        pinv = from_columns({v1, v2}, 2);
        fam = Family::Type5;
        model = {r2, VectorField::linear(Matrix{{0, 1}, {-1, 0}}, t)};
    }
    Diffeo cert = compose(linear_diffeo(*inverse(pinv), t), lin.conjugator);
    return checked(a, {fam, {}, std::nullopt, cert, model});
}

inline ClassificationTag classify_single_pencil(const AlgebraPresentation& a, const Vec& kernel)
{
    const auto& g = a.generators;
    const int t = a.trunc();
    VectorField b = combine(g, kernel);
    VectorField al = linear_part(g[0]).is_zero() ? g[1] : g[0];
    Matrix l = linear_part(al);
    upoly::Poly cp = charpoly(l);
    auto roots = upoly::rational_roots(cp);

    Matrix pinv(2, 2);
    Rational scale;
    Family fam;
    int n = 0, p = 0, q = 0;
    if (roots.size() == 2) {
        Rational r1 = roots[0].first, r2 = roots[1].first;
        if (sgn(r1) == 0 || sgn(r2) == 0) {
            fam = Family::Type7;
            Rational r = sgn(r1) == 0 ? r2 : r1;
            scale = 1 / r;
            pinv = from_columns({nullspace(l - r * Matrix::identity(2))[0], nullspace(l)[0]}, 2);
        } else if (sgn(r1) != sgn(r2)) {
            fam = Family::Type3;
            Rational pos = sgn(r1) > 0 ? r1 : r2, neg = sgn(r1) > 0 ? r2 : r1;
            Rational ratio = pos / -neg; // q/p
            q = static_cast<int>(ratio.get_num().get_si());
            p = static_cast<int>(ratio.get_den().get_si());
            scale = Rational(q) / pos;
            pinv = from_columns({nullspace(l - pos * Matrix::identity(2))[0], nullspace(l - neg * Matrix::identity(2))[0]},
                                2);
        } else {
            Rational small = abs(r1) < abs(r2) ? r1 : r2, big = abs(r1) < abs(r2) ? r2 : r1;
            Rational ratio = big / small;
            require(ratio.get_den() == 1 && ratio >= 2, Errc::Unclassifiable, "node without resonance");
            fam = Family::Type2;
            n = static_cast<int>(ratio.get_num().get_si());
            scale = 1 / small;
            pinv = from_columns({nullspace(l - small * Matrix::identity(2))[0], nullspace(l - big * Matrix::identity(2))[0]},
                                2);
        }
    } else {
        require(roots.empty() && sgn(trace(l)) == 0, Errc::Unclassifiable,
                "linear part is one-determined, the partner would be linear");
        auto om = upoly::rational_sqrt(det(l));
        require(om.has_value(), Errc::Unclassifiable, "rotation speed is irrational");
        fam = Family::Type6;
        scale = 1 / *om;
        Vec v2{1, 0};
        Vec v1 = scaled(scale, l * v2);
        pinv = from_columns({v1, v2}, 2);
    }
    Diffeo pl = linear_diffeo(*inverse(pinv), t);
    VectorField a1 = scale * pushforward(pl, al);
    VectorField b1 = pushforward(pl, b);
    NormalFormResult nf = poincare_dulac_normalize(a1, t);
    VectorField an = nf.normal;
    VectorField bn = pushforward(nf.conjugator, b1);
    Diffeo cert = compose(nf.conjugator, pl);
    Jet x1 = Jet::variable(2, t, 0), x2 = Jet::variable(2, t, 1);
    const int rel = std::min(an.reliable(), bn.reliable());

    if (fam == Family::Type2) {
        Jet xn = pow(x1, n);
        Rational c = bn[1].coeff(mono::var(0, n));
        VectorField rest = bn - VectorField({Jet(2, t), c * xn});
        require(sgn(c) != 0 && !rest.part(0, rel).lowest_degree(), Errc::Unclassifiable,
                "partner is not a multiple of x1^n d/dx2");
        VectorField s = VectorField::linear(Matrix{{1, 0}, {0, n}}, t);
        return checked(a, {fam, {{"n", n}}, std::nullopt, cert, {s, VectorField({Jet(2, t), xn})}});
    }

    ResonantFrame fr{fam, {}, {}, {}, 0, 1};
    if (fam == Family::Type3) {
        fr.s = VectorField::linear(Matrix{{q, 0}, {0, -p}}, t);
        fr.tfield = VectorField::linear(Matrix{{1, 0}, {0, 0}}, t);
        fr.u = pow(x1, p) * pow(x2, q);
        fr.tau = p;
    } else if (fam == Family::Type6) {
        fr.s = VectorField::linear(Matrix{{0, 1}, {-1, 0}}, t);
        fr.tfield = VectorField::euler(2, t);
        fr.u = x1 * x1 + x2 * x2;
        fr.tau = 2;
    } else {
        fr.s = VectorField::linear(Matrix{{1, 0}, {0, 0}}, t);
        fr.tfield = VectorField({Jet(2, t), Jet::constant(2, t, 1)});
        fr.u = x2;
        fr.tau = 1;
        fr.e = 0;
    }
    // The nilpotent part of the distinguished generator must lie in the span.
    VectorField nil = an - fr.s;
    Rational kappa = 0;
    if (nil.part(0, rel).lowest_degree()) {
        std::optional<Rational> found;
        for (int j = 0; j < 2 && !found; ++j)
            for (const auto& [m, c] : bn[j].terms())
                if (mono::degree(m) <= rel) {
                    found = nil[j].coeff(m) / c;
                    break;
                }
        require(found.has_value(), Errc::Unclassifiable, "partner vanishes within reliable order");
        kappa = *found;
        require(!(nil - kappa * bn).part(0, rel).lowest_degree(), Errc::Unclassifiable,
                "no element of the algebra has a semisimple model");
    }

    auto [c1, c2] = frame_coefficients(fr, bn, p, q);
    const int tt = c1.trunc();
    Rational w = 0;
    VectorField wfield = fr.s;
    if (c2.order() > c2.reliable()) {
        // Partner is already a(u) S.
        c2 = c1;
    } else {
        const int k = c2.order();
        require(c1.order() >= k, Errc::Unclassifiable, "partner has no model of the form a(u) W");
        if (fam != Family::Type7) w = c1.coeff({k}) / c2.coeff({k});
        Jet num = w * c2 - c1;
        Jet den = fr.tau * (fr.e ? Jet::variable(1, tt, 0) * c2 : c2);
        Jet hprime = num.is_zero() ? num : divide_exact(num, den);
        Jet h = integrate(hprime, 0);
        if (!h.is_zero()) {
            Diffeo flow = frame_flow(fr, substitute(h, {fr.u}), p, q);
            bn = pushforward(flow, bn);
            cert = compose(flow, cert);
        }
        wfield = w * fr.s + fr.tfield;
    }
    // Unit leading coefficient for a.
    Jet aser = c2;
    Rational lead = aser.coeff({aser.order()});
    aser = (1 / lead) * aser;
    wfield = lead * wfield;
    VectorField second = substitute(aser, {fr.u}) * wfield;

    std::vector<std::pair<std::string, Rational>> params;
    if (fam == Family::Type3) {
        params = {{"p", p}, {"q", q}, {"lambda1", wfield[0].coeff({1, 0})}, {"lambda2", wfield[1].coeff({0, 1})}};
    } else if (fam == Family::Type6) {
        // W = alpha R + beta J.
        params = {{"alpha", wfield[0].coeff({1, 0})}, {"beta", wfield[0].coeff({0, 1})}};
    }
    return checked(a, {fam, params, aser, cert, {fr.s, second}});
}

} // namespace detail

/// Classification of abelian rank-two algebras of singular plane fields.
inline ClassificationTag classify_abelian_rank2(AlgebraPresentation a)
{
    require(a.dim() == 2, Errc::UnsupportedDimension, "ambient dimension must be 2");
    const auto& c = structure_of(a);
    for (const auto& row : c)
        for (const auto& v : row) require(detail::is_zero_vec(v), Errc::NotAbelian, "generators do not commute");
    require(a.size() == 2 && generic_rank(a) == 2, Errc::NotRank2, "needs two generators of generic rank 2");
    Matrix l1 = linear_part(a.generators[0]), l2 = linear_part(a.generators[1]);
    bool nilpotent_pencil = sgn(trace(l1)) == 0 && sgn(trace(l2)) == 0 && sgn(det(l1)) == 0 && sgn(det(l2)) == 0 &&
                            sgn(det(l1 + l2)) == 0;
    require(!nilpotent_pencil, Errc::NilpotentPencil, "every linear part in the pencil is nilpotent");

    Matrix pencil(4, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            pencil(2 * i + j, 0) = l1(i, j);
            pencil(2 * i + j, 1) = l2(i, j);
        }
    if (rank(pencil) == 2) {
        auto ab = solve(pencil, Vec{1, 0, 0, 1});
        require(ab.has_value(), Errc::Unclassifiable, "two-dimensional pencil without the identity");
        return detail::classify_pencil_with_identity(a, *ab);
    }
    auto ker = nullspace(pencil);
    return detail::classify_single_pencil(a, ker.front());
}

} // namespace formal
