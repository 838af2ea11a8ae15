#pragma once

#include <algorithm>
#include <initializer_list>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "formal/error.hpp"
#include "formal/multidegree.hpp"
#include "formal/rational.hpp"

namespace formal {

/// Truncated power series in `dim` variables with exact rational
/// coefficients. Coefficients of degree <= reliable() are certified; the
/// value -1 means nothing is certified.
class Jet {
public:
    using Terms = std::map<Mono, Rational>;

    Jet() : Jet(1, 0) {}
    Jet(int dim, int trunc) : dim_(dim), trunc_(trunc), reliable_(trunc)
    {
        require(dim >= 1 && dim <= kMaxDim, Errc::UnsupportedDimension, "dim must be in 1..7");
        require(trunc >= 0 && trunc <= kMaxTrunc, Errc::DegreeOverflow, "trunc out of range");
    }

    static Jet make(int dim, int trunc, const std::vector<std::pair<std::vector<int>, Rational>>& terms)
    {
        Jet j(dim, trunc);
        for (const auto& [e, c] : terms) {
            require(static_cast<int>(e.size()) == dim, Errc::DimensionMismatch, "exponent vector length");
            Mono m = mono::from_exponents(e);
            require(mono::degree(m) <= trunc, Errc::DegreeOverflow, "term exceeds trunc");
            j.accumulate(m, c);
        }
        return j;
    }
    static Jet constant(int dim, int trunc, const Rational& c)
    {
        Jet j(dim, trunc);
        j.accumulate(mono::one(), c);
        return j;
    }
    static Jet variable(int dim, int trunc, int i, const Rational& c = 1)
    {
        require(i >= 0 && i < dim, Errc::BadIndex, "variable index");
        return monomial(dim, trunc, mono::var(i), c);
    }
    static Jet monomial(int dim, int trunc, Mono m, const Rational& c = 1)
    {
        Jet j(dim, trunc);
        if (mono::degree(m) <= trunc) j.accumulate(m, c);
        return j;
    }

    int dim() const noexcept { return dim_; }
    int trunc() const noexcept { return trunc_; }
    int reliable() const noexcept { return reliable_; }
    const Terms& terms() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }

    Rational coeff(Mono m) const
    {
        auto it = c_.find(m);
        return it == c_.end() ? Rational(0) : it->second;
    }
    Rational coeff(const std::vector<int>& e) const { return coeff(mono::from_exponents(e)); }
    Rational coeff(std::initializer_list<int> e) const { return coeff(std::vector<int>(e)); }
    Rational constant_term() const { return coeff(mono::one()); }

    /// Lowest stored degree, ignoring reliability.
    std::optional<int> lowest_degree() const
    {
        if (c_.empty()) return std::nullopt;
        return mono::degree(c_.begin()->first);
    }
    std::optional<int> highest_degree() const
    {
        if (c_.empty()) return std::nullopt;
        return mono::degree(c_.rbegin()->first);
    }

    /// Certified lower bound on the vanishing order of the true series.
    int order() const
    {
        auto d = lowest_degree();
        return (d && *d <= reliable_) ? *d : reliable_ + 1;
    }

    Jet homogeneous(int d) const { return part(d, d); }
    Jet part(int lo, int hi) const
    {
        Jet r(dim_, trunc_);
        r.reliable_ = reliable_;
        for (const auto& [m, c] : c_) {
            int d = mono::degree(m);
            if (d >= lo && d <= hi) r.c_.emplace_hint(r.c_.end(), m, c);
        }
        return r;
    }

    Jet with_reliable(int r) const
    {
        Jet j = *this;
        j.reliable_ = std::clamp(r, -1, trunc_);
        return j;
    }
    /// Lowers the truncation order, dropping higher terms.
    Jet truncated(int n) const
    {
        require(n >= 0 && n <= trunc_, Errc::TruncMismatch, "can only lower trunc");
        Jet j = part(0, n);
        j.trunc_ = n;
        j.reliable_ = std::min(reliable_, n);
        return j;
    }
    /// Raises the truncation order without certifying new coefficients.
    Jet extended(int n) const
    {
        require(n >= trunc_ && n <= kMaxTrunc, Errc::TruncMismatch, "can only raise trunc");
        Jet j = *this;
        j.trunc_ = n;
        return j;
    }
    /// Same coefficients, trunc and reliable set to n; used when the caller
    /// knows the value is an exact polynomial.
    Jet as_exact(int n) const
    {
        Jet j = n >= trunc_ ? extended(n) : truncated(n);
        j.reliable_ = n;
        return j;
    }

    /// Adds c * m in place; terms beyond trunc are dropped.
    void accumulate(Mono m, const Rational& c)
    {
        if (mono::degree(m) > trunc_ || sgn(c) == 0) return;
        auto [it, fresh] = c_.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (sgn(it->second) == 0) c_.erase(it);
        }
    }

    /// Coefficient equality for degrees <= upto.
    bool agrees(const Jet& b, int upto) const
    {
        auto lo = [upto](const Terms& t) {
            auto it = t.begin();
            while (it != t.end() && mono::degree(it->first) <= upto) ++it;
            return it;
        };
        auto ea = lo(c_), eb = lo(b.c_);
        return std::distance(c_.begin(), ea) == std::distance(b.c_.begin(), eb) &&
               std::equal(c_.begin(), ea, b.c_.begin());
    }

    friend bool operator==(const Jet& a, const Jet& b)
    {
        return a.dim_ == b.dim_ && a.trunc_ == b.trunc_ && a.reliable_ == b.reliable_ && a.c_ == b.c_;
    }
    /// Coefficients and shape equal, reliable ignored.
    bool same_terms(const Jet& b) const { return dim_ == b.dim_ && trunc_ == b.trunc_ && c_ == b.c_; }

    friend Jet operator+(const Jet& a, const Jet& b)
    {
        check_shape(a, b);
        Jet r = a;
        for (const auto& [m, c] : b.c_) r.accumulate(m, c);
        r.reliable_ = std::min(a.reliable_, b.reliable_);
        return r;
    }
    friend Jet operator-(const Jet& a)
    {
        Jet r = a;
        for (auto& kv : r.c_) kv.second = -kv.second;
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
    Jet& operator+=(const Jet& b) { return *this = *this + b; }
    Jet& operator-=(const Jet& b) { return *this = *this - b; }

    friend Jet operator*(const Rational& s, const Jet& a)
    {
        if (sgn(s) == 0) {
            Jet z(a.dim_, a.trunc_);
            z.reliable_ = a.reliable_;
            return z;
        }
        Jet r = a;
        for (auto& kv : r.c_) kv.second *= s;
        return r;
    }
    friend Jet operator*(const Jet& a, const Rational& s) { return s * a; }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        check_shape(a, b);
        Jet r(a.dim_, a.trunc_);
        const int n = a.trunc_;
        Rational t;
        for (const auto& [ma, ca] : a.c_) {
            const int da = mono::degree(ma);
            if (da > n) break;
            for (const auto& [mb, cb] : b.c_) {
                if (da + mono::degree(mb) > n) break;
                mpq_mul(t.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
                r.c_[ma + mb] += t;
            }
        }
        std::erase_if(r.c_, [](const auto& kv) { return sgn(kv.second) == 0; });
        r.reliable_ = std::clamp(std::min({a.reliable_ + b.order(), b.reliable_ + a.order(), n}), -1, n);
        return r;
    }
    Jet& operator*=(const Jet& b) { return *this = *this * b; }

    static void check_shape(const Jet& a, const Jet& b)
    {
        require(a.dim_ == b.dim_, Errc::DimensionMismatch, "jet dimensions differ");
        require(a.trunc_ == b.trunc_, Errc::TruncMismatch, "jet truncations differ");
    }

private:
    friend Jet differentiate(const Jet&, int);
    friend Jet integrate(const Jet&, int);

    int dim_;
    int trunc_;
    int reliable_;
    Terms c_;
};

inline Jet add(const Jet& a, const Jet& b) { return a + b; }
inline Jet mul(const Jet& a, const Jet& b) { return a * b; }
inline Jet scale(const Jet& a, const Rational& c) { return c * a; }

/// Partial derivative in the 0-based variable i.
inline Jet differentiate(const Jet& a, int i)
{
    require(i >= 0 && i < a.dim(), Errc::BadIndex, "variable index");
    Jet r(a.dim(), a.trunc());
    for (const auto& [m, c] : a.terms()) {
        int e = mono::exponent(m, i);
        if (e > 0) r.c_.emplace(mono::lower(m, i), c * e);
    }
    r.reliable_ = std::max(a.reliable() - 1, -1);
    return r;
}

/// Antiderivative in x_i vanishing on x_i = 0.
inline Jet integrate(const Jet& a, int i)
{
    require(i >= 0 && i < a.dim(), Errc::BadIndex, "variable index");
    Jet r(a.dim(), a.trunc());
    for (const auto& [m, c] : a.terms()) {
        Mono up = m + mono::var(i);
        if (mono::degree(up) <= a.trunc()) r.c_.emplace(up, c / (mono::exponent(m, i) + 1));
    }
    r.reliable_ = std::min(a.reliable() + 1, a.trunc());
    return r;
}

inline Jet pow(const Jet& a, int k)
{
    Jet r = Jet::constant(a.dim(), a.trunc(), 1);
    Jet base = a;
    while (k > 0) {
        if (k & 1) r *= base;
        k >>= 1;
        if (k) base *= base;
    }
    return r;
}

/// Composition f(args[0], ..., args[dim-1]); args may live in another
/// dimension but must share f's truncation order.
inline Jet substitute(const Jet& f, const std::vector<Jet>& args)
{
    require(static_cast<int>(args.size()) == f.dim(), Errc::DimensionMismatch, "need one argument per variable");
    const int out_dim = args.front().dim();
    int rel = f.reliable();
    for (const auto& g : args) {
        require(g.dim() == out_dim, Errc::DimensionMismatch, "arguments differ in dimension");
        require(g.trunc() == f.trunc(), Errc::TruncMismatch, "argument truncation differs");
        require(sgn(g.constant_term()) == 0, Errc::NonzeroConstantTerm, "argument has a constant term");
        rel = std::min(rel, g.reliable());
    }
    const int n = f.trunc();
    std::vector<std::vector<Jet>> powers(f.dim());
    auto power = [&](int i, int k) -> const Jet& {
        auto& p = powers[i];
        if (p.empty()) p.push_back(Jet::constant(out_dim, n, 1));
        while (static_cast<int>(p.size()) <= k) p.push_back(p.back() * args[i]);
        return p[k];
    };
    // Peel one variable at a time: f = sum_k x_i^k f_k(x_{i+1}, ...).
    auto rec = [&](auto&& self, const std::vector<std::pair<Mono, Rational>>& terms, int i) -> Jet {
        if (i == f.dim()) {
            Rational s = 0;
            for (const auto& t : terms) s += t.second;
            return Jet::constant(out_dim, n, s);
        }
        std::map<int, std::vector<std::pair<Mono, Rational>>> buckets;
        for (const auto& [m, c] : terms) {
            int e = mono::exponent(m, i);
            buckets[e].emplace_back(m - mono::var(i, e), c);
        }
        Jet acc(out_dim, n);
        for (const auto& [e, sub] : buckets) {
            Jet inner = self(self, sub, i + 1);
            if (inner.is_zero()) continue;
            acc += e == 0 ? inner : power(i, e) * inner;
        }
        return acc;
    };
    std::vector<std::pair<Mono, Rational>> all(f.terms().begin(), f.terms().end());
    Jet r = rec(rec, all, 0);
    return r.with_reliable(std::min(rel, n));
}

/// Multiplicative inverse of a jet with nonzero constant term.
inline Jet invert_unit(const Jet& a)
{
    Rational a0 = a.constant_term();
    require(sgn(a0) != 0, Errc::NotAUnit, "constant term is zero");
    Rational inv0 = 1 / a0;
    // 1/a = (1/a0) * sum_k (-u)^k with u = a/a0 - 1 of order >= 1.
    Jet u = inv0 * a - Jet::constant(a.dim(), a.trunc(), 1);
    Jet neg_u = -u;
    Jet term = Jet::constant(a.dim(), a.trunc(), 1);
    Jet sum = term;
    for (int k = 1; k <= a.trunc(); ++k) {
        term *= neg_u;
        if (term.is_zero()) break;
        sum += term;
    }
    Jet r = inv0 * sum;
    return r.with_reliable(a.reliable());
}

namespace detail {
inline Jet series_of(const Jet& a, const std::vector<Rational>& coeffs)
{
    require(sgn(a.constant_term()) == 0, Errc::NonzeroConstantTerm, "series argument must vanish at 0");
    Jet sum(a.dim(), a.trunc());
    Jet term = Jet::constant(a.dim(), a.trunc(), 1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (k) term *= a;
        if (term.is_zero()) break;
        if (sgn(coeffs[k]) != 0) sum += coeffs[k] * term;
    }
    return sum.with_reliable(std::min(sum.reliable(), a.reliable()));
}
inline Rational factorial(int k)
{
    Integer f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return Rational(f);
}
} // namespace detail

inline Jet exp_jet(const Jet& a)
{
    std::vector<Rational> c;
    for (int k = 0; k <= a.trunc(); ++k) c.push_back(1 / detail::factorial(k));
    return detail::series_of(a, c);
}
inline Jet sin_jet(const Jet& a)
{
    std::vector<Rational> c;
    for (int k = 0; k <= a.trunc(); ++k) c.push_back(k % 2 ? Rational((k % 4 == 1 ? 1 : -1) / detail::factorial(k)) : Rational(0));
    return detail::series_of(a, c);
}
inline Jet cos_jet(const Jet& a)
{
    std::vector<Rational> c;
    for (int k = 0; k <= a.trunc(); ++k) c.push_back(k % 2 ? Rational(0) : Rational((k % 4 == 0 ? 1 : -1) / detail::factorial(k)));
    return detail::series_of(a, c);
}

} // namespace formal
