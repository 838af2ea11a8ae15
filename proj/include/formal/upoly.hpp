#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "formal/error.hpp"
#include "formal/rational.hpp"

namespace formal::upoly {

/// Dense univariate polynomial over Q, coefficients from degree 0 upward,
/// no trailing zeros (the zero polynomial is empty).
using Poly = std::vector<Rational>;

inline void trim(Poly& p)
{
    while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Poly add(Poly a, const Poly& b)
{
    if (a.size() < b.size()) a.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    trim(a);
    return a;
}

inline Poly scale(Poly a, const Rational& s)
{
    for (auto& c : a) c *= s;
    trim(a);
    return a;
}

inline Poly sub(const Poly& a, const Poly& b) { return add(a, scale(b, -1)); }

inline Poly mul(const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

/// Euclidean division: a = q*b + r with deg r < deg b.
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b)
{
    require(!b.empty(), Errc::ZeroDivisor, "division by zero polynomial");
    trim(a);
    Poly q;
    if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, 0);
    while (!a.empty() && a.size() >= b.size()) {
        std::size_t shift = a.size() - b.size();
        Rational c = a.back() / b.back();
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= c * b[i];
        trim(a);
    }
    trim(q);
    return {q, a};
}

inline Poly monic(Poly p)
{
    trim(p);
    if (p.empty()) return p;
    Rational lc = p.back();
    for (auto& c : p) c /= lc;
    return p;
}

inline Poly gcd(Poly a, Poly b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

inline Rational eval(const Poly& p, const Rational& x)
{
    Rational r = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
    return r;
}

inline Poly derivative(const Poly& p)
{
    Poly r;
    for (std::size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<long>(i));
    trim(r);
    return r;
}

namespace detail {
inline std::vector<Integer> divisors(Integer n)
{
    if (n < 0) n = -n;
    std::vector<Integer> out;
    for (Integer d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d * d != n) out.push_back(n / d);
        }
    }
    return out;
}
} // namespace detail

/// Distinct rational roots with multiplicities, in increasing order.
inline std::vector<std::pair<Rational, int>> rational_roots(Poly p)
{
    trim(p);
    std::vector<std::pair<Rational, int>> roots;
    if (p.size() <= 1) return roots;
    auto take = [&](const Rational& r) {
        int mult = 0;
        Poly lin{-r, 1};
        for (;;) {
            auto [q, rem] = divmod(p, lin);
            if (!rem.empty()) break;
            p = q;
            ++mult;
        }
        if (mult) roots.emplace_back(r, mult);
    };
    take(0);
    if (p.size() > 1) {
        Integer den = 1;
        for (const auto& c : p) den = lcm(den, c.get_den());
        Integer a0 = Rational(p.front() * den).get_num();
        Integer an = Rational(p.back() * den).get_num();
        std::vector<Rational> cands;
        for (const auto& u : detail::divisors(a0))
            for (const auto& v : detail::divisors(an)) {
                Rational r(u, v);
                r.canonicalize();
                cands.push_back(r);
                cands.push_back(-r);
            }
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        for (const auto& r : cands)
            if (p.size() > 1 && sgn(eval(p, r)) == 0) take(r);
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return roots;
}

/// Exact rational square root when one exists.
inline std::optional<Rational> rational_sqrt(const Rational& q)
{
    if (sgn(q) < 0) return std::nullopt;
    Integer n = q.get_num(), d = q.get_den();
    Integer sn = sqrt(n), sd = sqrt(d);
    if (sn * sn != n || sd * sd != d) return std::nullopt;
    Rational r(sn, sd);
    r.canonicalize();
    return r;
}

} // namespace formal::upoly
