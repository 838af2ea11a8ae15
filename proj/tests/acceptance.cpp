// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "support.hpp"

using namespace formal;
using formal::testing::Coords;
using formal::testing::PlaneFamilies;
using formal::testing::Rng;

namespace {

struct Check {
    bool ok = true;
    std::string why;
    void expect(bool cond, const std::string& what)
    {
        if (!cond && ok) why = what;
        ok = ok && cond;
    }
};

bool vanishes(const Jet& j, int upto)
{
    auto lo = j.lowest_degree();
    return !lo || *lo > upto;
}

bool vanishes(const VectorField& x)
{
    auto lo = x.lowest_degree();
    return !lo || *lo > x.reliable();
}

// 1. Ring and Lie axioms.
Check ring_and_lie_axioms()
{
    Check c;
    Rng rng(1001);
    for (int k = 0; k < 200; ++k) {
        const int n = rng.uniform(2, 3), t = 6;
        Jet a = rng.jet(n, t, 0, 4), b = rng.jet(n, t, 0, 4), d = rng.jet(n, t, 0, 4);
        Jet l = (a * b) * d, r = a * (b * d);
        c.expect(l.agrees(r, std::min(l.reliable(), r.reliable())), "associativity");
        VectorField x = rng.field(n, t, 0, 4), y = rng.field(n, t, 0, 4), z = rng.field(n, t, 0, 4);
        Jet lhs = apply(x, a * b), rhs = apply(x, a) * b + a * apply(x, b);
        c.expect(lhs.agrees(rhs, std::min(lhs.reliable(), rhs.reliable())), "Leibniz rule");
        c.expect((bracket(x, y) + bracket(y, x)).is_zero(), "antisymmetry");
        VectorField jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
        c.expect(vanishes(jac), "Jacobi identity");
    }
    return c;
}

// 2. Euler identity [R, X] = d X for homogeneous X of degree d+1.
Check euler_identity()
{
    Check c;
    Rng rng(1002);
    for (int k = 0; k < 50; ++k) {
        int d = 1 + k % 4, n = rng.uniform(2, 3);
        VectorField x = rng.homogeneous_field(n, 6, d + 1);
        c.expect(bracket(VectorField::euler(n, 6), x).same_terms(Rational(d) * x), "Euler identity");
    }
    return c;
}

// 3. Poincare-Dulac normal form support and conjugator soundness.
Check poincare_dulac()
{
    Check c;
    Rng rng(1003);
    const int t = 8;
    Coords w{2, t};
    for (int n : {2, 3})
        for (int k = 0; k < 10; ++k) {
            VectorField x = w.field({w.x(1), n * w.x(2)}) + rng.field(2, t, 2, 5, 4);
            NormalFormResult r = poincare_dulac_normalize(x, t);
            const Jet& c1 = r.normal[0];
            const Jet& c2 = r.normal[1];
            c.expect(c1.same_terms(w.x(1)), "first component must stay x1");
            Jet expected = n * w.x(2) + c2.coeff(mono::var(0, n)) * pow(w.x(1), n);
            c.expect(c2.same_terms(expected), "second component outside {x2, x1^n}");
            VectorField pushed = pushforward(r.conjugator, x);
            c.expect(pushed.agrees(r.normal, t), "conjugator does not carry X to its normal form");
        }
    return c;
}

// 4. Resonance sets against brute force, and the fiber base+step law.
Check resonance_oracle()
{
    Check c;
    Rng rng(1004);
    auto brute = [](const Rational& l1, const Rational& l2, const Rational& mu, long bound) {
        std::set<Pair> out;
        for (long i = 0; i <= bound; ++i)
            for (long j = 0; j <= bound; ++j)
                if ((i || j) && l1 * i + l2 * j == mu) out.insert({i, j});
        return out;
    };
    int done = 0;
    while (done < 100) {
        Rational l1 = rng.small_rational(), l2 = rng.small_rational(), mu = rng.small_rational();
        if (sgn(l1) == 0 && sgn(l2) == 0) continue;
        ++done;
        ResonanceSet rs = resonant_set({{l1, l2}, mu, 12});
        std::set<Pair> got;
        if (rs.generator) {
            for (auto p : enumerate_ray(*rs.generator, 12)) got.insert(p);
        } else {
            got.insert(rs.solutions.begin(), rs.solutions.end());
        }
        for (const auto& p : got) c.expect(l1 * p[0] + l2 * p[1] == mu && (p[0] || p[1]), "returned point is not a solution");
        std::set<Pair> want = brute(l1, l2, mu, 12);
        std::erase_if(got, [](const Pair& p) { return p[0] > 12 || p[1] > 12; });
        if (got != want)
            std::fprintf(stderr, "  resonance mismatch at lambda=(%s, %s) mu=%s\n", l1.get_str().c_str(),
                         l2.get_str().c_str(), mu.get_str().c_str());
        c.expect(got == want, "structured resonance set differs from enumeration");
    }
    done = 0;
    while (done < 50) {
        long p = rng.uniform(0, 9), q = rng.uniform(0, 9);
        if (gcd(Integer(p), Integer(q)) != 1) continue;
        Rational mu = rng.uniform(-15, 15);
        auto truth = brute(q, -p, mu, 40);
        LatticeRay ray;
        try {
            ray = fiber_decomposition(p, q, mu);
        } catch (const Error& e) {
            c.expect(e.code() == Errc::EmptyFiber && truth.empty(), "fiber refused a nonempty set");
            ++done;
            continue;
        }
        ++done;
        c.expect(ray.step == Pair{p, q}, "fiber step must be (p, q)");
        std::set<Pair> ray_pts;
        for (auto v : enumerate_ray(ray, 40)) ray_pts.insert(v);
        c.expect(ray_pts == truth, "base + k step misses fiber points");
    }
    return c;
}

// 5. Nilpotency of brackets of order >= 2 fields.
Check nilpotency()
{
    Check c;
    Rng rng(1005);
    const int t = 6;
    Coords f{4, t};
    VectorField x0 = f.field({f.zero(), f.zero(), f.x(1) * f.x(2), f.zero()});
    VectorField x1 = f.field({f.zero(), f.zero(), f.zero(), f.x(2) * f.x(3)});
    VectorField x2 = f.field({f.zero(), f.zero(), f.zero(), f.x(1) * f.x(2) * f.x(2)});
    c.expect(bracket(x0, x1).same_terms(x2), "[X0, X1] = X2 fixture");
    AlgebraPresentation fix = closure_check({x0, x1, x2});
    c.expect(is_nilpotent(fix), "fixture algebra nilpotent");

    int built = 0;
    while (built < 30) {
        int n = rng.uniform(2, 4);
        std::vector<VectorField> gens{rng.field(n, t, 2, 3, 2), rng.field(n, t, 2, 3, 2)};
        if (gens[0].is_zero() || gens[1].is_zero() || detail::span_coefficients({gens[0]}, gens[1], t)) continue;
        bool too_big = false;
        for (std::size_t i = 0; i < gens.size() && !too_big; ++i)
            for (std::size_t j = 0; j < i && !too_big; ++j) {
                VectorField b = bracket(gens[i], gens[j]);
                if (vanishes(b) || detail::span_coefficients(gens, b, b.reliable())) continue;
                gens.push_back(b);
                too_big = gens.size() > 10;
            }
        if (too_big) continue;
        AlgebraPresentation a = closure_check(gens);
        ++built;
        for (int i = 0; i < a.size(); ++i) c.expect(is_nilpotent_matrix(ad_matrix(a, i)), "ad matrix not nilpotent");
        c.expect(is_nilpotent(a), "algebra not nilpotent");
    }
    return c;
}

// 6. Formal first integrals.
Check first_integrals()
{
    Check c;
    Coords w{2, 10};
    for (auto [p, q] : {std::pair{1, 1}, {1, 2}, {2, 3}}) {
        auto f = first_integral_jet(w.field({q * w.x(1), -p * w.x(2)}), 10);
        c.expect(f && f->same_terms(pow(w.x(1), p) * pow(w.x(2), q)), "monomial first integral");
    }
    auto rot = first_integral_jet(w.field({-w.x(2), w.x(1)}), 10);
    c.expect(rot && rot->same_terms(w.x(1) * w.x(1) + w.x(2) * w.x(2)), "rotation first integral");
    c.expect(!first_integral_jet(VectorField::euler(2, 10), 10), "radial field has no first integral");
    return c;
}

// 7. A field commuting with an abelian rank-2 pair is a constant combination.
Check centralizer_of_pairs()
{
    Check c;
    Rng rng(1007);
    PlaneFamilies fam{6};
    int count = 0;
    for (int k = 0; count < 20; ++k) {
        Diffeo phi = rng.near_identity(2, 6);
        for (const auto& gens : {fam.type1(), fam.type2(2 + k % 2), fam.type5()}) {
            if (count == 20) break;
            ++count;
            auto pair = formal::testing::disguise(gens, phi, rng.invertible(2, 2));
            auto cent = centralizer(pair, 4);
            c.expect(cent.size() == 2, "centralizer larger than the pair");
            for (const auto& z : cent)
                c.expect(detail::span_coefficients(pair, z, z.reliable()).has_value(), "commuting field outside the span");
        }
    }
    return c;
}

// 8. Classification round trip over the plane families.
Check classification_round_trip()
{
    Check c;
    Rng rng(1008);
    const int t = 6;
    PlaneFamilies fam{t};
    for (int k = 0; k < 2; ++k) {
        Diffeo phi = rng.near_identity(2, t);
        Matrix mix = rng.invertible(2, 2);
        Jet a1 = formal::testing::random_series(rng, t, 1, 4);
        Jet a2 = formal::testing::random_series(rng, t, 2, 4);
        std::vector<std::pair<Family, std::vector<VectorField>>> cases{
            {Family::Type1, fam.type1()},
            {Family::Type2, fam.type2(2 + k)},
            {Family::Type4, fam.type4()},
            {Family::Type5, fam.type5()},
            {Family::Type3, fam.type3(1 + k, 2, a1, rng.small_rational(4, false), rng.small_rational(4, false))},
            {Family::Type6, fam.type6(a1, 1, rng.small_rational(4))},
            {Family::Type7, fam.type7(a2)},
        };
        for (const auto& [family, gens] : cases) {
            try {
                AlgebraPresentation pres = closure_check(formal::testing::disguise(gens, phi, mix));
                ClassificationTag tag = classify_abelian_rank2(pres);
                c.expect(tag.family == family, "family mismatch for " + family_name(family));
                c.expect(certificate_sound(pres, tag), "unsound certificate for " + family_name(family));
            } catch (const Error& e) {
                c.expect(false, family_name(family) + ": " + e.what());
            }
        }
    }
    return c;
}

// 9. Logarithmic forms: closedness and residues.
Check logarithmic_round_trip()
{
    Check c;
    Rng rng(1009);
    Coords w{2, 10};
    for (int k = 0; k < 24; ++k) {
        std::vector<RealFactor> fs;
        std::vector<std::pair<Rational, Rational>> dirs;
        const int count = rng.uniform(1, 3);
        while (static_cast<int>(fs.size()) < count) {
            Rational a = rng.small_rational(4), b = rng.small_rational(4);
            if (sgn(a) == 0 && sgn(b) == 0) continue;
            bool parallel = false;
            for (auto& [da, db] : dirs) parallel = parallel || a * db == b * da;
            if (parallel) continue;
            dirs.emplace_back(a, b);
            Jet f = a * w.x(1) + b * w.x(2);
            // Monomial factors some of the time, affine ones otherwise.
            if (rng.coin()) f = sgn(b) == 0 ? w.x(1) : sgn(a) == 0 ? w.x(2) : f;
            fs.push_back({f, rng.small_rational(7, false)});
        }
        MeromorphicForm m = log_synthesize({fs, {}, {}});
        c.expect(closedness_defect(m).vanishes(), "closedness identity fails");
        std::vector<Jet> factors;
        std::vector<Rational> truth;
        for (const auto& f : fs) {
            factors.push_back(f.f);
            truth.push_back(f.lambda);
        }
        c.expect(residue_extract(m, factors) == truth, "residues not recovered");
    }
    return c;
}

// 10. Pullbacks of plane forms are integrable; contact forms are not.
Check integrability()
{
    Check c;
    Rng rng(1010);
    const int t = 6;
    Coords s{3, t}, p{2, t};
    for (int k = 0; k < 20; ++k) {
        FormJet w = exterior_d(FormJet::function(rng.jet(2, t, 2, 4)));
        if (k % 2) {
            MeromorphicForm m = log_synthesize({{{p.x(1), rng.small_rational(5, false)}, {p.x(2), rng.small_rational(5, false)}}, {}, {}});
            w = m.numerator;
        }
        std::vector<Jet> f{rng.jet(3, t, 1, 2, 3), rng.jet(3, t, 1, 2, 3)};
        c.expect(is_integrable(pullback(f, w)), "pullback not integrable");
    }
    for (int k = 0; k < 5; ++k) {
        FormJet contact = FormJet::one_form({s.zero(), s.x(1), s.c(1)});
        FormJet noise(3, 1, t);
        for (const auto& [idx, g] : noise.coeffs()) noise.set(idx, rng.jet(3, t, 2, 3, 2));
        c.expect(!is_integrable(contact + noise), "contact form passed the integrability test");
    }
    return c;
}

// 11. Formal separatrices of nonresonant hyperbolic plane fields.
Check separatrices()
{
    Check c;
    Rng rng(1011);
    const int t = 10;
    Coords w{2, t};
    FormJet vol = FormJet::basis(2, t, {0, 1});
    int done = 0;
    while (done < 20) {
        Rational l1 = rng.small_rational(9, false), l2 = rng.small_rational(9, false);
        if (!is_nonresonant({l1, l2})) continue;
        ++done;
        VectorField x = w.field({l1 * w.x(1), l2 * w.x(2)}) + rng.field(2, t, 2, 4, 3);
        FormJet form = contract(x, vol);
        for (const std::vector<Rational>& dir : {std::vector<Rational>{1, 0}, std::vector<Rational>{0, 1}}) {
            auto g = find_separatrix(form, dir, t);
            c.expect(g.has_value(), "separatrix not found");
            if (g) c.expect(vanishes(curve_pullback(*g, form), t), "pullback along the curve is nonzero");
        }
    }
    VectorField rotation = w.field({w.x(2), -w.x(1)});
    FormJet elliptic = contract(rotation, vol);
    for (const std::vector<Rational>& dir : {std::vector<Rational>{1, 0}, std::vector<Rational>{2, -3}}) {
        SeparatrixSearch s = separatrix_search(elliptic, dir, t);
        c.expect(!s.curve && s.obstruction_order == 2, "elliptic case not refused at order 2");
    }
    return c;
}

// 12. Free words do not collapse; Bochner linearizes an involution.
Check group_layer()
{
    Check c;
    Rng rng(1012);
    const int t = 6;
    // Linear parts generate a free group, so nontrivial reduced words stay visible.
    Diffeo a = compose(Diffeo::linear(Matrix{{1, 2}, {0, 1}}, t), rng.near_identity(2, t));
    Diffeo b = compose(Diffeo::linear(Matrix{{1, 0}, {2, 1}}, t), rng.near_identity(2, t));
    c.expect(!compose(a, b).same_terms(compose(b, a)), "generators commute");
    int done = 0;
    while (done < 30) {
        GroupWord wd;
        int len = rng.uniform(1, 6);
        for (int i = 0; i < len; ++i) wd.letters.push_back({rng.uniform(0, 1), rng.coin() ? 1 : -1});
        wd = wd.reduced();
        if (wd.letters.empty()) continue;
        ++done;
        c.expect(!evaluate_word(wd, {a, b}).is_identity(t), "nontrivial word evaluates to the identity");
    }
    Coords w{1, 8};
    Diffeo f({-w.x(1) * invert_unit(w.c(1) + w.x(1))});
    Diffeo h = bochner_linearize(f, 2);
    c.expect(compose(compose(h, f), inverse(h)).same_terms(Diffeo({-w.x(1)})), "Bochner conjugation");
    return c;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"ring and Lie axioms", ring_and_lie_axioms},
        {"Euler identity", euler_identity},
        {"Poincare-Dulac support and soundness", poincare_dulac},
        {"resonance oracle equivalence", resonance_oracle},
        {"nilpotency of order >= 2 algebras", nilpotency},
        {"first integrals", first_integrals},
        {"centralizer of abelian pairs", centralizer_of_pairs},
        {"classification round trip", classification_round_trip},
        {"logarithmic round trip", logarithmic_round_trip},
        {"integrability of pullbacks", integrability},
        {"formal separatrices", separatrices},
        {"group layer", group_layer},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r.ok = false;
            r.why = std::string("unexpected error: ") + e.what();
        }
        std::printf("%s %2zu %s%s%s\n", r.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), r.ok ? "" : " :: ",
                    r.why.c_str());
        failed += r.ok ? 0 : 1;
    }
    std::fflush(stdout);
    return failed ? 1 : 0;
}
