#pragma once

// Shared fixtures: coordinate jets and seeded random generators.

#include <random>
#include <vector>

#include "formal/formal.hpp"

namespace formal::testing {

struct Coords {
    int dim;
    int trunc;
    Jet x(int i) const { return Jet::variable(dim, trunc, i - 1); }
    Jet c(const Rational& v) const { return Jet::constant(dim, trunc, v); }
    Jet zero() const { return Jet(dim, trunc); }
    VectorField field(std::vector<Jet> comps) const { return VectorField(std::move(comps)); }
};

class Rng {
public:
    explicit Rng(unsigned seed) : g_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
    bool coin() { return uniform(0, 1) == 1; }

    Rational small_rational(int bound = 9, bool allow_zero = true)
    {
        for (;;) {
            Rational q(uniform(-bound, bound), uniform(1, bound));
            q.canonicalize();
            if (allow_zero || sgn(q) != 0) return q;
        }
    }

    /// Sparse random jet with degrees in [lo, hi].
    Jet jet(int dim, int trunc, int lo, int hi, int terms = 4)
    {
        Jet j(dim, trunc);
        for (int t = 0; t < terms; ++t) {
            int d = uniform(lo, hi);
            auto monos = mono::of_degree(dim, d);
            j.accumulate(monos[uniform(0, static_cast<int>(monos.size()) - 1)], small_rational(5));
        }
        return j;
    }

    VectorField field(int dim, int trunc, int lo, int hi, int terms = 3)
    {
        std::vector<Jet> c;
        for (int i = 0; i < dim; ++i) c.push_back(jet(dim, trunc, lo, hi, terms));
        return VectorField(std::move(c));
    }

    VectorField homogeneous_field(int dim, int trunc, int d, int terms = 3)
    {
        return field(dim, trunc, d, d, terms);
    }

    /// Tangent-to-identity diffeo with a random nonlinear part.
    Diffeo near_identity(int dim, int trunc, int hi = 3, int terms = 2)
    {
        std::vector<Jet> c;
        for (int i = 0; i < dim; ++i) c.push_back(Jet::variable(dim, trunc, i) + jet(dim, trunc, 2, hi, terms));
        return Diffeo(std::move(c));
    }

    /// Random invertible matrix with small integer entries.
    Matrix invertible(int n, int bound = 3)
    {
        for (;;) {
            Matrix m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = uniform(-bound, bound);
            if (sgn(det(m)) != 0) return m;
        }
    }

    std::mt19937& engine() { return g_; }

private:
    std::mt19937 g_;
};

/// Model pairs of the abelian plane families, before any conjugation.
/// The series a(t) has no constant term (and no linear term for type 7).
struct PlaneFamilies {
    int trunc;

    Jet x1() const { return Jet::variable(2, trunc, 0); }
    Jet x2() const { return Jet::variable(2, trunc, 1); }
    VectorField lin(const Matrix& m) const { return VectorField::linear(m, trunc); }
    Jet at(const Jet& a, const Jet& u) const { return substitute(a, {u}); }

    std::vector<VectorField> type1() const { return {lin({{1, 0}, {0, 0}}), lin({{0, 0}, {0, 1}})}; }
    std::vector<VectorField> type2(int n) const
    {
        return {lin({{1, 0}, {0, n}}), VectorField({Jet(2, trunc), pow(x1(), n)})};
    }
    std::vector<VectorField> type3(int p, int q, const Jet& a, const Rational& l1, const Rational& l2) const
    {
        Jet au = at(a, pow(x1(), p) * pow(x2(), q));
        return {lin({{q, 0}, {0, -p}}), au * lin({{l1, 0}, {0, l2}})};
    }
    std::vector<VectorField> type4() const { return {VectorField::euler(2, trunc), lin({{0, 0}, {1, 0}})}; }
    std::vector<VectorField> type5() const { return {VectorField::euler(2, trunc), lin({{0, 1}, {-1, 0}})}; }
    std::vector<VectorField> type6(const Jet& a, const Rational& alpha, const Rational& beta) const
    {
        Jet au = at(a, x1() * x1() + x2() * x2());
        return {lin({{0, 1}, {-1, 0}}), au * (alpha * VectorField::euler(2, trunc) + beta * lin({{0, 1}, {-1, 0}}))};
    }
    std::vector<VectorField> type7(const Jet& a) const
    {
        return {lin({{1, 0}, {0, 0}}), VectorField({Jet(2, trunc), at(a, x2())})};
    }
};

/// Random one-variable series with zero constant term and order >= lo.
inline Jet random_series(Rng& rng, int trunc, int lo, int hi)
{
    Jet a(1, trunc);
    a.accumulate(mono::var(0, lo), rng.small_rational(5, false));
    for (int k = lo + 1; k <= hi; ++k) a.accumulate(mono::var(0, k), rng.small_rational(5));
    return a;
}

/// Pushes a family forward by phi and mixes the generators by an
/// invertible constant matrix, keeping the span.
inline std::vector<VectorField> disguise(const std::vector<VectorField>& gens, const Diffeo& phi, const Matrix& mix)
{
    Diffeo inv = inverse(phi);
    std::vector<VectorField> pushed, out;
    for (const auto& g : gens) pushed.push_back(pushforward(phi, inv, g));
    for (int i = 0; i < mix.rows(); ++i) {
        VectorField acc = VectorField::zero(gens.front().dim(), gens.front().trunc());
        for (int j = 0; j < mix.cols(); ++j)
            if (sgn(mix(i, j)) != 0) acc = acc + mix(i, j) * pushed[j];
        out.push_back(acc);
    }
    return out;
}

} // namespace formal::testing
