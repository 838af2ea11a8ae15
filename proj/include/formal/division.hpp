#pragma once

#include <map>
#include <utility>

#include "formal/jet.hpp"
#include "formal/upoly.hpp"

namespace formal {

struct SeriesDivision {
    Jet quotient;
    Jet remainder;
    int divisor_order = 0;
};

namespace detail {

/// Division of a homogeneous polynomial by a homogeneous divisor, leading
/// terms taken in lex order. Returns (quotient terms, remainder terms).
inline std::pair<Jet::Terms, Jet::Terms> divide_homogeneous(Jet::Terms p, const Jet::Terms& b, int dim)
{
    const Mono lt = b.rbegin()->first;
    const Rational& lc = b.rbegin()->second;
    Jet::Terms q, r;
    while (!p.empty()) {
        auto top = std::prev(p.end());
        Mono m = top->first;
        Rational c = top->second;
        if (!mono::divides(lt, m, dim)) {
            r.emplace(m, c);
            p.erase(top);
            continue;
        }
        Rational f = c / lc;
        Mono shift = m - lt;
        q[shift] += f;
        for (const auto& [mb, cb] : b) {
            auto [it, fresh] = p.try_emplace(mb + shift, 0);
            it->second -= f * cb;
            if (sgn(it->second) == 0) p.erase(it);
        }
    }
    return {std::move(q), std::move(r)};
}

} // namespace detail

/// Degree-by-degree division a = b q + r: at each degree the current
/// homogeneous part is divided by the lowest homogeneous part of b. The
/// remainder is the unique representative with no monomial divisible by
/// the leading monomial of that lowest part.
inline SeriesDivision series_divide(const Jet& a, const Jet& b)
{
    Jet::check_shape(a, b);
    auto kb = b.lowest_degree();
    require(kb.has_value() && *kb <= b.reliable(), Errc::ZeroDivisor, "divisor vanishes within its reliable order");
    const int k = *kb, n = a.trunc(), dim = a.dim();
    Jet::Terms bk, btail;
    for (const auto& [m, c] : b.terms()) (mono::degree(m) == k ? bk : btail).emplace(m, c);

    std::map<int, Jet::Terms> work;
    for (const auto& [m, c] : a.terms()) work[mono::degree(m)].emplace(m, c);
    Jet q(dim, n), r(dim, n);
    for (int d = 0; d <= n; ++d) {
        Jet::Terms part = std::move(work[d]);
        if (part.empty()) continue;
        if (d < k) {
            for (const auto& [m, c] : part) r.accumulate(m, c);
            continue;
        }
        auto [qd, rd] = detail::divide_homogeneous(std::move(part), bk, dim);
        for (const auto& [m, c] : rd) r.accumulate(m, c);
        for (const auto& [mq, cq] : qd) {
            q.accumulate(mq, cq);
            for (const auto& [mb, cb] : btail) {
                Mono m = mq + mb;
                int dm = mono::degree(m);
                if (dm > n) break;
                auto& slot = work[dm];
                auto [it, fresh] = slot.try_emplace(m, 0);
                it->second -= cq * cb;
                if (sgn(it->second) == 0) slot.erase(it);
            }
        }
    }
    const int rel = std::min(a.reliable(), b.reliable());
    return {q.with_reliable(rel - k), r.with_reliable(rel), k};
}

/// Remainder of a modulo b in the sense of series_divide.
inline Jet reduce_mod(const Jet& a, const Jet& b) { return series_divide(a, b).remainder; }

/// Exact quotient a / b; the remainder must vanish within the reliable range.
inline Jet divide_exact(const Jet& a, const Jet& b)
{
    SeriesDivision d = series_divide(a, b);
    auto low = d.remainder.lowest_degree();
    require(!low || *low > d.remainder.reliable(), Errc::NotDivisible, "nonzero remainder within the reliable range");
    return d.quotient;
}

namespace detail {

/// Bivariate polynomial as x1-degree -> coefficient polynomial in x2.
using BPoly = std::map<int, upoly::Poly>;

inline BPoly to_bpoly(const Jet& a)
{
    BPoly p;
    for (const auto& [m, c] : a.terms()) {
        int i = mono::exponent(m, 0), j = a.dim() > 1 ? mono::exponent(m, 1) : 0;
        auto& coef = p[i];
        if (static_cast<int>(coef.size()) <= j) coef.resize(j + 1);
        coef[j] = c;
    }
    return p;
}

inline Jet from_bpoly(const BPoly& p, int dim, int trunc)
{
    Jet out(dim, trunc);
    for (const auto& [i, coef] : p)
        for (std::size_t j = 0; j < coef.size(); ++j) {
            if (sgn(coef[j]) == 0) continue;
            std::vector<int> e(dim, 0);
            e[0] = i;
            if (dim > 1) e[1] = static_cast<int>(j);
            out.accumulate(mono::from_exponents(e), coef[j]);
        }
    return out;
}

inline upoly::Poly content(const BPoly& p)
{
    upoly::Poly g;
    for (const auto& [i, c] : p) g = upoly::gcd(g, c);
    return g;
}

inline BPoly divide_by(const BPoly& p, const upoly::Poly& c)
{
    BPoly out;
    for (const auto& [i, coef] : p) out[i] = upoly::divmod(coef, c).first;
    return out;
}

inline BPoly times(const BPoly& p, const upoly::Poly& c)
{
    BPoly out;
    for (const auto& [i, coef] : p) {
        auto v = upoly::mul(coef, c);
        if (!v.empty()) out[i] = std::move(v);
    }
    return out;
}

/// Pseudo-remainder in x1.
inline BPoly pseudo_rem(BPoly a, const BPoly& b)
{
    const int db = b.rbegin()->first;
    const upoly::Poly& lb = b.rbegin()->second;
    while (!a.empty() && a.rbegin()->first >= db) {
        const int da = a.rbegin()->first;
        upoly::Poly la = a.rbegin()->second;
        BPoly next = times(a, lb);
        for (const auto& [i, coef] : b) {
            auto& slot = next[i + da - db];
            slot = upoly::sub(slot, upoly::mul(coef, la));
        }
        std::erase_if(next, [](const auto& kv) { return kv.second.empty(); });
        a = std::move(next);
    }
    return a;
}

inline BPoly primitive(const BPoly& p) { return p.empty() ? p : divide_by(p, content(p)); }

} // namespace detail

/// Polynomial gcd over Q of the stored terms, in at most two variables,
/// normalized to leading coefficient 1 on the graded-lex leading monomial.
inline Jet gcd_poly(const Jet& a, const Jet& b)
{
    Jet::check_shape(a, b);
    require(a.dim() <= 2, Errc::UnsupportedDimension, "polynomial gcd supports at most two variables");
    using namespace detail;
    const int rel = std::min(a.reliable(), b.reliable());
    if (a.is_zero() && b.is_zero()) return Jet(a.dim(), a.trunc()).with_reliable(rel);
    BPoly pa = to_bpoly(a), pb = to_bpoly(b);
    upoly::Poly c = upoly::gcd(content(pa), content(pb));
    pa = primitive(pa);
    pb = primitive(pb);
    if (pa.empty()) std::swap(pa, pb);
    if (!pb.empty() && pa.rbegin()->first < pb.rbegin()->first) std::swap(pa, pb);
    while (!pb.empty()) {
        BPoly r = pseudo_rem(pa, pb);
        pa = std::move(pb);
        pb = primitive(r);
    }
    Jet g = from_bpoly(times(primitive(pa), c), a.dim(), a.trunc());
    Rational lc = g.terms().rbegin()->second;
    return (1 / lc * g).with_reliable(rel);
}

} // namespace formal
