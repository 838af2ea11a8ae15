#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "formal/division.hpp"
#include "formal/jet.hpp"
#include "formal/matrix.hpp"
#include "formal/vector_field.hpp"

namespace formal {

namespace detail {

inline void index_subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        index_subsets(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

/// Sorts idx in place; returns the permutation sign, or 0 on a repeat.
inline int sort_with_sign(std::vector<int>& idx)
{
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    return sign;
}

} // namespace detail

/// Alternating k-form sum_I f_I dx_I over sorted index sets I (0-based).
/// Storage is dense: every k-subset has a coefficient, possibly zero, so
/// reliable orders survive on zero coefficients.
class FormJet {
public:
    using Index = std::vector<int>;

    FormJet() = default;
    FormJet(int dim, int degree, int trunc) : dim_(dim), degree_(degree), trunc_(trunc)
    {
        require(dim >= 1, Errc::DimensionMismatch, "form needs dim >= 1");
        require(degree >= 0 && degree <= dim, Errc::DegreeOverflow, "form degree exceeds dim");
        std::vector<Index> all;
        Index cur;
        detail::index_subsets(dim, degree, 0, cur, all);
        for (auto& idx : all) c_.emplace(std::move(idx), Jet(dim, trunc));
    }

    static FormJet function(const Jet& f)
    {
        FormJet w(f.dim(), 0, f.trunc());
        w.c_.begin()->second = f;
        return w;
    }
    static FormJet one_form(const std::vector<Jet>& coeffs)
    {
        require(!coeffs.empty(), Errc::DimensionMismatch, "1-form needs coefficients");
        const Jet& f = coeffs.front();
        require(static_cast<int>(coeffs.size()) == f.dim(), Errc::DimensionMismatch, "one coefficient per variable");
        FormJet w(f.dim(), 1, f.trunc());
        for (int i = 0; i < f.dim(); ++i) w.set({i}, coeffs[i]);
        return w;
    }
    /// The constant form dx_{i1} ^ ... ^ dx_{ik}; indices in any order.
    static FormJet basis(int dim, int trunc, Index idx)
    {
        FormJet w(dim, static_cast<int>(idx.size()), trunc);
        w.add_term(std::move(idx), Jet::constant(dim, trunc, 1));
        return w;
    }

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    int trunc() const { return trunc_; }
    int reliable() const
    {
        int r = trunc_;
        for (const auto& [i, f] : c_) r = std::min(r, f.reliable());
        return r;
    }
    const std::map<Index, Jet>& coeffs() const { return c_; }

    const Jet& coeff(const Index& idx) const
    {
        auto it = c_.find(idx);
        require(it != c_.end(), Errc::BadIndex, "index set must be sorted, distinct and in range");
        return it->second;
    }
    void set(const Index& idx, const Jet& f)
    {
        auto it = c_.find(idx);
        require(it != c_.end(), Errc::BadIndex, "index set must be sorted, distinct and in range");
        require(f.dim() == dim_, Errc::DimensionMismatch, "coefficient dimension");
        require(f.trunc() == trunc_, Errc::TruncMismatch, "coefficient truncation");
        it->second = f;
    }
    /// Adds f dx_idx with idx in any order; a repeated index contributes 0.
    void add_term(Index idx, const Jet& f)
    {
        require(static_cast<int>(idx.size()) == degree_, Errc::DegreeOverflow, "index count differs from degree");
        for (int i : idx) require(i >= 0 && i < dim_, Errc::BadIndex, "variable index out of range");
        int s = detail::sort_with_sign(idx);
        if (s == 0) return;
        Jet& slot = c_.at(idx);
        slot = s > 0 ? slot + f : slot - f;
    }

    bool is_zero() const
    {
        return std::all_of(c_.begin(), c_.end(), [](const auto& kv) { return kv.second.is_zero(); });
    }
    /// True when every coefficient vanishes through the form's reliable order.
    bool vanishes() const
    {
        const int r = reliable();
        for (const auto& [i, f] : c_) {
            auto lo = f.lowest_degree();
            if (lo && *lo <= r) return false;
        }
        return true;
    }
    bool agrees(const FormJet& b, int upto) const
    {
        if (dim_ != b.dim_ || degree_ != b.degree_) return false;
        for (const auto& [i, f] : c_)
            if (!f.agrees(b.c_.at(i), upto)) return false;
        return true;
    }
    bool same_terms(const FormJet& b) const
    {
        if (dim_ != b.dim_ || degree_ != b.degree_ || trunc_ != b.trunc_) return false;
        for (const auto& [i, f] : c_)
            if (!f.same_terms(b.c_.at(i))) return false;
        return true;
    }
    FormJet with_reliable(int r) const
    {
        FormJet w = *this;
        for (auto& [i, f] : w.c_) f = f.with_reliable(r);
        return w;
    }

    friend bool operator==(const FormJet& a, const FormJet& b)
    {
        return a.dim_ == b.dim_ && a.degree_ == b.degree_ && a.trunc_ == b.trunc_ && a.c_ == b.c_;
    }
    friend FormJet operator+(const FormJet& a, const FormJet& b)
    {
        check_shape(a, b);
        FormJet r = a;
        for (auto& [i, f] : r.c_) f += b.c_.at(i);
        return r;
    }
    friend FormJet operator-(const FormJet& a)
    {
        FormJet r = a;
        for (auto& [i, f] : r.c_) f = -f;
        return r;
    }
    friend FormJet operator-(const FormJet& a, const FormJet& b) { return a + (-b); }
    friend FormJet operator*(const Jet& g, const FormJet& a)
    {
        FormJet r = a;
        for (auto& [i, f] : r.c_) f = g * f;
        return r;
    }
    friend FormJet operator*(const Rational& s, const FormJet& a)
    {
        FormJet r = a;
        for (auto& [i, f] : r.c_) f = s * f;
        return r;
    }

    static void check_shape(const FormJet& a, const FormJet& b)
    {
        require(a.dim_ == b.dim_, Errc::DimensionMismatch, "form dimensions differ");
        require(a.degree_ == b.degree_, Errc::DegreeOverflow, "form degrees differ");
        require(a.trunc_ == b.trunc_, Errc::TruncMismatch, "form truncations differ");
    }

private:
    int dim_ = 0;
    int degree_ = 0;
    int trunc_ = 0;
    std::map<Index, Jet> c_;
};

inline FormJet exterior_d(const FormJet& w)
{
    require(w.degree() < w.dim(), Errc::TopDegree, "d of a top-degree form");
    FormJet r(w.dim(), w.degree() + 1, w.trunc());
    for (const auto& [idx, f] : w.coeffs())
        for (int i = 0; i < w.dim(); ++i) {
            if (std::find(idx.begin(), idx.end(), i) != idx.end()) continue;
            FormJet::Index full{i};
            full.insert(full.end(), idx.begin(), idx.end());
            r.add_term(std::move(full), differentiate(f, i));
        }
    // Keep the reduced reliable order even where every derivative vanished.
    int rel = w.reliable() - 1;
    return r.reliable() > rel ? r.with_reliable(rel) : r;
}

inline FormJet wedge(const FormJet& a, const FormJet& b)
{
    require(a.dim() == b.dim(), Errc::DimensionMismatch, "form dimensions differ");
    require(a.trunc() == b.trunc(), Errc::TruncMismatch, "form truncations differ");
    require(a.degree() + b.degree() <= a.dim(), Errc::DegreeOverflow, "wedge degree exceeds dim");
    FormJet r(a.dim(), a.degree() + b.degree(), a.trunc());
    int rel = a.trunc();
    for (const auto& [ia, fa] : a.coeffs())
        for (const auto& [ib, fb] : b.coeffs()) {
            Jet p = fa * fb;
            rel = std::min(rel, p.reliable());
            FormJet::Index full = ia;
            full.insert(full.end(), ib.begin(), ib.end());
            r.add_term(std::move(full), p);
        }
    return r.with_reliable(std::min(r.reliable(), rel));
}

/// Interior product i_X w.
inline FormJet contract(const VectorField& x, const FormJet& w)
{
    require(w.degree() >= 1, Errc::DegreeZero, "contraction of a function");
    require(x.dim() == w.dim(), Errc::DimensionMismatch, "field and form dimensions differ");
    require(x.trunc() == w.trunc(), Errc::TruncMismatch, "field and form truncations differ");
    FormJet r(w.dim(), w.degree() - 1, w.trunc());
    int rel = w.trunc();
    for (const auto& [idx, f] : w.coeffs())
        for (std::size_t s = 0; s < idx.size(); ++s) {
            Jet p = x[idx[s]] * f;
            rel = std::min(rel, p.reliable());
            FormJet::Index rest = idx;
            rest.erase(rest.begin() + static_cast<long>(s));
            r.add_term(std::move(rest), s % 2 ? -p : p);
        }
    return r.with_reliable(std::min(r.reliable(), rel));
}

/// The field X with i_X(dx1 ^ dx2) = w.
inline VectorField dual_field_dim2(const FormJet& w)
{
    require(w.dim() == 2, Errc::UnsupportedDimension, "duality is implemented in dim 2");
    require(w.degree() == 1, Errc::DegreeOverflow, "duality expects a 1-form");
    return VectorField({w.coeff({1}), -w.coeff({0})});
}

/// w ^ dw = 0 through the tracked reliable order.
inline bool is_integrable(const FormJet& w)
{
    require(w.degree() == 1, Errc::DegreeOverflow, "integrability applies to 1-forms");
    if (w.dim() <= 2) return true;
    return wedge(w, exterior_d(w)).vanishes();
}

/// F^* w, where F lists the target coordinates as jets on the source.
inline FormJet pullback(const std::vector<Jet>& f, const FormJet& w)
{
    require(static_cast<int>(f.size()) == w.dim(), Errc::DimensionMismatch, "one map component per target variable");
    const int m = f.front().dim(), t = f.front().trunc();
    require(w.trunc() == t, Errc::TruncMismatch, "map and form truncations differ");
    for (const Jet& c : f) require(sgn(c.constant_term()) == 0, Errc::NonzeroConstantTerm, "map must fix the origin");
    require(w.degree() <= m, Errc::DegreeOverflow, "pulled-back degree exceeds source dim");
    std::vector<FormJet> df;
    for (const Jet& c : f) df.push_back(exterior_d(FormJet::function(c)));
    FormJet r(m, w.degree(), t);
    for (const auto& [idx, g] : w.coeffs()) {
        FormJet term = FormJet::function(substitute(g, f));
        for (int i : idx) term = wedge(term, df[i]);
        r = r + term;
    }
    return r;
}

/// Theta / denominator with Theta a 1-form.
struct MeromorphicForm {
    FormJet numerator;
    Jet denominator;

    MeromorphicForm(FormJet num, Jet den) : numerator(std::move(num)), denominator(std::move(den))
    {
        require(numerator.degree() == 1, Errc::DegreeOverflow, "numerator must be a 1-form");
        require(denominator.dim() == numerator.dim(), Errc::DimensionMismatch, "numerator and denominator dims differ");
        require(denominator.trunc() == numerator.trunc(), Errc::TruncMismatch, "numerator and denominator truncs differ");
        auto lo = denominator.lowest_degree();
        require(lo && *lo <= denominator.reliable(), Errc::ZeroDivisor, "denominator vanishes within its reliable order");
    }
};

/// den * dTheta - d(den) ^ Theta; zero exactly when Theta/den is closed.
inline FormJet closedness_defect(const MeromorphicForm& w)
{
    const FormJet& th = w.numerator;
    return w.denominator * exterior_d(th) - wedge(exterior_d(FormJet::function(w.denominator)), th);
}

inline bool is_closed(const MeromorphicForm& w)
{
    if (w.numerator.dim() == 1) return true;
    return closedness_defect(w).vanishes();
}

struct RealFactor {
    Jet f;
    Rational lambda;
};

/// Contributes a d(P^2+Q^2)/(P^2+Q^2) + b (P dQ - Q dP)/(P^2+Q^2).
struct PairFactor {
    Jet p, q;
    Rational a, b;
};

/// Exact part d(H / prod f_i^{n_i} prod g_j^{m_j}); exponents list the
/// real factors first, then the pair factors.
struct HamPart {
    Jet h;
    std::vector<int> exponents;
};

struct LogSpec {
    std::vector<RealFactor> real_factors;
    std::vector<PairFactor> pair_factors;
    std::optional<HamPart> ham;
};

/// Builds the logarithmic form over the cleared denominator
/// D' F0 with F0 = prod f_i prod g_j and D' = prod f_i^{n_i} prod g_j^{m_j}.
inline MeromorphicForm log_synthesize(const LogSpec& spec)
{
    std::vector<Jet> factors;
    for (const auto& r : spec.real_factors) factors.push_back(r.f);
    for (const auto& p : spec.pair_factors) factors.push_back(p.p * p.p + p.q * p.q);
    const Jet* any = !factors.empty() ? &factors.front() : spec.ham ? &spec.ham->h : nullptr;
    require(any != nullptr, Errc::DimensionMismatch, "empty logarithmic specification");
    const int n = any->dim(), t = any->trunc();
    auto check = [&](const Jet& j) {
        require(j.dim() == n, Errc::DimensionMismatch, "factor dimensions differ");
        require(j.trunc() == t, Errc::TruncMismatch, "factor truncations differ");
    };
    for (const auto& r : spec.real_factors) {
        check(r.f);
        require(sgn(r.f.constant_term()) == 0, Errc::NonzeroConstantTerm, "factor must vanish at 0");
    }
    for (const auto& p : spec.pair_factors) {
        check(p.p);
        check(p.q);
        require(sgn(p.p.constant_term()) == 0 && sgn(p.q.constant_term()) == 0, Errc::NonzeroConstantTerm,
                "pair factor must vanish at 0");
    }
    const std::size_t nf = factors.size();
    std::vector<int> expo(nf, 0);
    if (spec.ham) {
        check(spec.ham->h);
        require(spec.ham->exponents.size() == nf, Errc::DimensionMismatch, "one exponent per factor");
        for (int e : spec.ham->exponents) require(e >= 0, Errc::BadIndex, "exponents must be non-negative");
        expo = spec.ham->exponents;
    }

    const Jet one = Jet::constant(n, t, 1);
    auto d = [](const Jet& f) { return exterior_d(FormJet::function(f)); };
    std::vector<Jet> others(nf, one); // F0 / factor_i
    Jet f0 = one, dprime = one;
    for (std::size_t i = 0; i < nf; ++i) {
        f0 *= factors[i];
        dprime *= pow(factors[i], expo[i]);
        for (std::size_t j = 0; j < nf; ++j)
            if (j != i) others[i] *= factors[j];
    }

    FormJet log_part(n, 1, t);
    std::size_t k = 0;
    for (const auto& r : spec.real_factors) {
        log_part = log_part + r.lambda * (others[k] * d(r.f));
        ++k;
    }
    for (const auto& p : spec.pair_factors) {
        FormJet rot = p.p * d(p.q) - p.q * d(p.p);
        log_part = log_part + others[k] * (p.a * d(factors[k]) + p.b * rot);
        ++k;
    }
    FormJet theta = dprime * log_part;
    if (spec.ham) {
        const Jet& h = spec.ham->h;
        FormJet corr(n, 1, t);
        for (std::size_t i = 0; i < nf; ++i)
            if (expo[i]) corr = corr + Rational(expo[i]) * (others[i] * d(factors[i]));
        theta = theta + f0 * d(h) - h * corr;
    }
    return MeromorphicForm(theta, dprime * f0);
}

namespace detail {

inline bool remainder_vanishes(const Jet& r)
{
    auto lo = r.lowest_degree();
    return !lo || *lo > r.reliable();
}

} // namespace detail

/// Residues lambda_i of a closed form with simple poles along the given
/// pairwise coprime factors: Theta - lambda_i u (F0/f_i) df_i must be
/// divisible by f_i, where den = u F0 with u a unit.
inline std::vector<Rational> residue_extract(const MeromorphicForm& w, const std::vector<Jet>& factors)
{
    const Jet& den = w.denominator;
    const int n = den.dim(), t = den.trunc();
    require(n <= 2, Errc::UnsupportedDimension, "residues need polynomial gcd, dim <= 2");
    for (const Jet& f : factors) {
        require(f.dim() == n, Errc::DimensionMismatch, "factor dimension");
        require(f.trunc() == t, Errc::TruncMismatch, "factor truncation");
        require(sgn(f.constant_term()) == 0, Errc::NonzeroConstantTerm, "factor must vanish at 0");
    }
    require(is_closed(w), Errc::NotClosed, "closedness identity fails");
    for (std::size_t i = 0; i < factors.size(); ++i)
        for (std::size_t j = i + 1; j < factors.size(); ++j) {
            auto hd = gcd_poly(factors[i], factors[j]).highest_degree();
            require(hd && *hd == 0, Errc::NonCoprimeFactors, "factors share a common divisor");
        }

    Jet f0 = Jet::constant(n, t, 1);
    for (const Jet& f : factors) f0 *= f;
    SeriesDivision ud = series_divide(den, f0);
    require(detail::remainder_vanishes(ud.remainder), Errc::NotSimplePole, "denominator is not a multiple of the factors");
    const Jet& unit = ud.quotient;
    require(sgn(unit.constant_term()) != 0, Errc::NotSimplePole, "denominator has a repeated factor");

    std::vector<Rational> out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const Jet& fi = factors[i];
        Jet others = unit;
        for (std::size_t j = 0; j < factors.size(); ++j)
            if (j != i) others *= factors[j];
        FormJet v = others * exterior_d(FormJet::function(fi));
        // Normal forms modulo f_i are linear, so lambda solves NF(Theta) = lambda NF(v).
        std::optional<Rational> lambda;
        for (int k = 0; k < n && !lambda; ++k) {
            Jet sv = reduce_mod(v.coeff({k}), fi);
            Jet st = reduce_mod(w.numerator.coeff({k}), fi);
            const int r = std::min(sv.reliable(), st.reliable());
            for (const auto& [m, c] : sv.terms()) {
                if (mono::degree(m) > r) break;
                lambda = st.coeff(m) / c;
                break;
            }
        }
        require(lambda.has_value(), Errc::NotSimplePole, "residue undetermined along a factor");
        FormJet rest = w.numerator - *lambda * v;
        for (int k = 0; k < n; ++k)
            require(detail::remainder_vanishes(reduce_mod(rest.coeff({k}), fi)), Errc::NotSimplePole,
                    "pole along a factor is not logarithmic");
        out.push_back(*lambda);
    }
    return out;
}

/// Parametrized formal curve t -> (gamma_1(t), ..., gamma_n(t)).
struct CurveJet {
    std::vector<Jet> components;

    int trunc() const { return components.front().trunc(); }
    bool is_trivial() const
    {
        return std::all_of(components.begin(), components.end(), [](const Jet& c) { return c.is_zero(); });
    }
};

/// gamma^* w as the coefficient of dt.
inline Jet curve_pullback(const CurveJet& g, const FormJet& w)
{
    require(w.degree() == 1, Errc::DegreeOverflow, "curves pull back 1-forms");
    require(static_cast<int>(g.components.size()) == w.dim(), Errc::DimensionMismatch, "curve length differs from dim");
    Jet acc(1, g.trunc());
    for (int i = 0; i < w.dim(); ++i)
        acc += substitute(w.coeff({i}), g.components) * differentiate(g.components[i], 0);
    return acc;
}

struct SeparatrixSearch {
    std::optional<CurveJet> curve;
    /// Order at which the solve failed (the t^k coefficient of gamma^* w
    /// blocks order k+1 of the curve); 0 on success.
    int obstruction_order = 0;
    /// Highest power of t through which gamma^* w vanishes.
    int solved_to = 0;
};

/// Smooth separatrix tangent to `direction`. At t^m the unknown c_m enters
/// through (M^T v + m M v) . c_m with M the linear part of w; c_m is kept
/// orthogonal-free by fixing its component along v to zero.
inline SeparatrixSearch separatrix_search(const FormJet& w, const std::vector<Rational>& direction, int upto)
{
    require(w.dim() == 2 && w.degree() == 1, Errc::UnsupportedDimension, "separatrices need a 1-form in dim 2");
    require(direction.size() == 2, Errc::DimensionMismatch, "direction must be a 2-vector");
    require(sgn(direction[0]) != 0 || sgn(direction[1]) != 0, Errc::ZeroDirection, "direction is zero");
    for (int i = 0; i < 2; ++i)
        require(sgn(w.coeff({i}).constant_term()) == 0, Errc::NonzeroConstantTerm, "form must vanish at 0");
    Matrix lin(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) lin(i, j) = w.coeff({i}).coeff(mono::var(j));
    require(!lin.is_zero(), Errc::DegenerateLinearPart, "linear part vanishes");

    const int t = w.trunc();
    const int top = std::min(upto, w.reliable());
    const std::vector<Rational>& v = direction;
    const std::vector<Rational> perp{-v[1], v[0]};
    CurveJet g{{Jet::variable(1, t, 0, v[0]).as_exact(t), Jet::variable(1, t, 0, v[1]).as_exact(t)}};
    SeparatrixSearch out;
    for (int m = 1; m <= top; ++m) {
        Rational e = curve_pullback(g, w).coeff(mono::var(0, m));
        if (sgn(e) == 0) continue;
        if (m == 1) {
            out.obstruction_order = 2;
            return out;
        }
        Rational slope = 0;
        for (int j = 0; j < 2; ++j) {
            Rational mt = 0, mv = 0;
            for (int i = 0; i < 2; ++i) {
                mt += lin(i, j) * v[i];
                mv += lin(j, i) * v[i];
            }
            slope += (mt + m * mv) * perp[j];
        }
        if (sgn(slope) == 0) {
            out.obstruction_order = m + 1;
            return out;
        }
        Rational s = -e / slope;
        for (int i = 0; i < 2; ++i) g.components[i] += Jet::monomial(1, t, mono::var(0, m), s * perp[i]).as_exact(t);
    }
    for (auto& c : g.components) c = c.with_reliable(top);
    out.curve = std::move(g);
    out.solved_to = top;
    return out;
}

inline std::optional<CurveJet> find_separatrix(const FormJet& w, const std::vector<Rational>& direction, int upto)
{
    return separatrix_search(w, direction, upto).curve;
}

} // namespace formal
