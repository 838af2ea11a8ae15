#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "formal/error.hpp"
#include "formal/rational.hpp"

namespace formal {

using Pair = std::array<long, 2>;

enum class Finiteness { FiniteComplete, InfiniteStructured, BoundedEnumeration };

inline constexpr std::string_view finiteness_name(Finiteness f)
{
    switch (f) {
    case Finiteness::FiniteComplete: return "finite-complete";
    case Finiteness::InfiniteStructured: return "infinite-structured";
    case Finiteness::BoundedEnumeration: return "bounded-enumeration";
    }
    return "?";
}

struct LatticeRay {
    Pair base;
    Pair step;
    friend bool operator==(const LatticeRay&, const LatticeRay&) = default;
};

struct ResonanceQuery {
    std::vector<Rational> lambda;
    Rational mu;
    std::optional<long> degree_bound; // bound on each coordinate
};

struct ResonanceSet {
    std::vector<Pair> solutions; // ascending lex order
    Finiteness finiteness = Finiteness::FiniteComplete;
    std::optional<LatticeRay> generator;
};

namespace detail {

/// Solutions of a*i1 + b*i2 = c over N^2 minus the origin: either a finite
/// list or a single ray base + s*step, s >= 0.
struct DiophantineSolution {
    std::vector<Pair> finite;
    std::optional<LatticeRay> ray;
};

inline long to_long(const Integer& z)
{
    require(z.fits_slong_p(), Errc::DegreeOverflow, "integer too large");
    return z.get_si();
}

inline Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}
inline Integer ceil_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline DiophantineSolution solve_nonneg(Integer a, Integer b, Integer c)
{
    require(a != 0 || b != 0, Errc::ZeroPair, "both coefficients vanish");
    DiophantineSolution out;
    if (a == 0 || b == 0) {
        bool first = b == 0; // the fixed coordinate is i1 when b == 0
        Integer coef = first ? a : b;
        if (c % coef != 0) return out;
        Integer fixed = c / coef;
        if (fixed < 0) return out;
        long f = to_long(fixed);
        Pair base = first ? Pair{f, 0} : Pair{0, f};
        Pair step = first ? Pair{0, 1} : Pair{1, 0};
        if (f == 0) base = step;
        out.ray = LatticeRay{base, step};
        return out;
    }
    if (a < 0) {
        a = -a;
        b = -b;
        c = -c;
    }
    Integer g = gcd(a, b);
    if (c % g != 0) return out;
    if (b > 0) {
        // Same sign: finitely many points with a*i1 <= c.
        if (c < 0) return out;
        for (Integer i1 = 0; a * i1 <= c; ++i1) {
            Integer rest = c - a * i1;
            if (rest % b == 0) {
                Pair p{to_long(i1), to_long(rest / b)};
                if (p[0] != 0 || p[1] != 0) out.finite.push_back(p);
            }
        }
        return out;
    }
    // Opposite signs: i2 = (a*i1 - c)/|b| grows with i1.
    Integer nb = -b;
    Integer s1 = nb / g, s2 = a / g;
    // a*i1 == c (mod nb): solve (a/g) i1 == c/g (mod nb/g).
    Integer r = 0;
    if (s1 != 1) {
        Integer inv;
        Integer ag = a / g;
        mpz_invert(inv.get_mpz_t(), ag.get_mpz_t(), s1.get_mpz_t());
        Integer cg = c / g;
        mpz_fdiv_r(r.get_mpz_t(), Integer(cg * inv).get_mpz_t(), s1.get_mpz_t());
    }
    Integer lo = 0;
    if (c > 0) lo = ceil_div(c, a);
    Integer i1 = r + s1 * ceil_div(lo - r, s1);
    Integer i2 = (a * i1 - c) / nb;
    if (i1 == 0 && i2 == 0) {
        i1 += s1;
        i2 += s2;
    }
    out.ray = LatticeRay{Pair{to_long(i1), to_long(i2)}, Pair{to_long(s1), to_long(s2)}};
    return out;
}

/// Clears denominators of l1*i1 + l2*i2 = mu.
inline DiophantineSolution solve_rational(const Rational& l1, const Rational& l2, const Rational& mu)
{
    Integer den = lcm(lcm(l1.get_den(), l2.get_den()), mu.get_den());
    return solve_nonneg(Rational(l1 * den).get_num(), Rational(l2 * den).get_num(), Rational(mu * den).get_num());
}

inline void check_pair(const std::vector<Rational>& lambda)
{
    require(lambda.size() == 2, Errc::UnsupportedDimension, "resonance analysis needs exactly two eigenvalues");
    require(sgn(lambda[0]) != 0 || sgn(lambda[1]) != 0, Errc::ZeroPair, "lambda = (0,0)");
}

} // namespace detail

/// Points of the ray with both coordinates <= bound.
inline std::vector<Pair> enumerate_ray(const LatticeRay& ray, long bound)
{
    std::vector<Pair> out;
    for (Pair p = ray.base; p[0] <= bound && p[1] <= bound; p[0] += ray.step[0], p[1] += ray.step[1])
        out.push_back(p);
    return out;
}

inline ResonanceSet resonant_set(const ResonanceQuery& query)
{
    detail::check_pair(query.lambda);
    auto sol = detail::solve_rational(query.lambda[0], query.lambda[1], query.mu);
    ResonanceSet out;
    if (!sol.ray) {
        out.solutions = sol.finite;
        out.finiteness = Finiteness::FiniteComplete;
        return out;
    }
    out.generator = sol.ray;
    if (query.degree_bound) {
        out.solutions = enumerate_ray(*sol.ray, *query.degree_bound);
        out.finiteness = Finiteness::BoundedEnumeration;
    } else {
        out.finiteness = Finiteness::InfiniteStructured;
    }
    return out;
}

/// No relation i . lambda = lambda_j with i in N^2, |i| >= 2.
inline bool is_nonresonant(const std::vector<Rational>& lambda)
{
    detail::check_pair(lambda);
    for (const auto& target : lambda) {
        auto sol = detail::solve_rational(lambda[0], lambda[1], target);
        if (sol.ray) return false;
        for (const auto& p : sol.finite)
            if (p[0] + p[1] >= 2) return false;
    }
    return true;
}

/// The fiber {(k,l) in N^2 minus 0 : k q - l p = mu} as base + s (p,q).
inline LatticeRay fiber_decomposition(long p, long q, const Rational& mu)
{
    require(p >= 0 && q >= 0, Errc::NotCoprime, "p and q must be natural numbers");
    require(gcd(Integer(p), Integer(q)) == 1, Errc::NotCoprime, "p and q must be coprime");
    if (mu.get_den() != 1) fail(Errc::EmptyFiber, "mu is not an integer");
    auto sol = detail::solve_nonneg(Integer(q), Integer(-p), mu.get_num());
    if (!sol.ray) fail(Errc::EmptyFiber, "no (k,l) with k q - l p = mu");
    return *sol.ray;
}

} // namespace formal
