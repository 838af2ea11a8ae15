#include <gtest/gtest.h>

#include "support.hpp"

using namespace formal;
using formal::testing::Coords;
using formal::testing::PlaneFamilies;
using formal::testing::Rng;

namespace {

Rational q(long n, long d = 1)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

VectorField line(const Coords& c, std::initializer_list<std::pair<int, Rational>> terms)
{
    Jet a = c.zero();
    for (const auto& [k, v] : terms) a += v * pow(c.x(1), k);
    return c.field({a});
}

/// Fixture with [X0, X1] = X2 in four variables.
std::vector<VectorField> nilpotent_triple(int trunc)
{
    Coords f{4, trunc};
    return {f.field({f.zero(), f.zero(), f.x(1) * f.x(2), f.zero()}),
            f.field({f.zero(), f.zero(), f.zero(), f.x(2) * f.x(3)}),
            f.field({f.zero(), f.zero(), f.zero(), f.x(1) * f.x(2) * f.x(2)})};
}

} // namespace

TEST(Closure, Examples)
{
    Coords c{1, 6};
    AlgebraPresentation a = closure_check({line(c, {{1, 1}}), line(c, {{2, 1}})});
    ASSERT_TRUE(a.structure);
    EXPECT_EQ((*a.structure)[0][1], (Vec{0, 1}));
    EXPECT_EQ((*a.structure)[1][0], (Vec{0, -1}));

    auto triple = nilpotent_triple(5);
    try {
        closure_check({triple[0], triple[1]});
        FAIL();
    } catch (const NotClosedError& e) {
        EXPECT_EQ(e.code(), Errc::NotClosed);
        EXPECT_EQ(e.i(), 0);
        EXPECT_EQ(e.j(), 1);
        EXPECT_TRUE(e.residual().same_terms(triple[2]));
    }
    AlgebraPresentation closed = closure_check(triple);
    EXPECT_EQ((*closed.structure)[0][1], (Vec{0, 0, 1}));
    EXPECT_TRUE(is_nilpotent(closed));

    try {
        closure_check({line(c, {{1, 1}}), line(c, {{1, 2}})});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DependentGenerators);
    }
}

TEST(Rank, Examples)
{
    Coords c{2, 6};
    AlgebraPresentation f{{c.field({c.x(2), c.zero()}), c.field({c.x(2) * c.x(2), c.zero()})}, {}};
    EXPECT_EQ(generic_rank(f), 1);
    AlgebraPresentation d{{c.field({c.x(1), c.zero()}), c.field({c.zero(), c.x(2)})}, {}};
    EXPECT_EQ(generic_rank(d), 2);
    VectorField r2 = VectorField::euler(2, 6);
    AlgebraPresentation e{{r2, c.field({c.x(1) * c.x(1), c.x(1) * c.x(2)})}, {}};
    RankReport rep = generic_rank_report(e);
    EXPECT_EQ(rep.rank, 1);
    EXPECT_GE(rep.order, 5);
}

TEST(Rank, InvariantUnderConjugation)
{
    Rng rng(501);
    PlaneFamilies fam{6};
    for (int k = 0; k < 5; ++k) {
        Diffeo phi = rng.near_identity(2, 6);
        auto gens = formal::testing::disguise(fam.type2(2), phi, Matrix::identity(2));
        EXPECT_EQ(generic_rank(AlgebraPresentation{gens, {}}), 2);
        Coords c{2, 6};
        VectorField r2 = VectorField::euler(2, 6);
        auto one = formal::testing::disguise({r2, (c.x(1) + c.x(2)) * r2}, phi, Matrix::identity(2));
        EXPECT_EQ(generic_rank(AlgebraPresentation{one, {}}), 1);
    }
}

TEST(Saturation, Examples)
{
    Coords c{1, 6};
    AlgebraPresentation sl2 = closure_check({line(c, {{0, 1}}), line(c, {{1, 1}}), line(c, {{2, 1}})});
    Rank1Saturation s = saturate_rank1(sl2);
    EXPECT_TRUE(s.director.same_terms(line(c, {{0, 1}})));
    ASSERT_EQ(s.coefficient_space.size(), 3u);
    EXPECT_TRUE(s.coefficient_space[2].same_terms(c.x(1) * c.x(1)));
    EXPECT_TRUE(s.saturable);

    AlgebraPresentation aff = closure_check({line(c, {{1, 1}}), line(c, {{2, 1}})});
    Rank1Saturation t = saturate_rank1(aff);
    EXPECT_TRUE(t.director.same_terms(line(c, {{0, 1}})));
    EXPECT_FALSE(t.saturable);

    Coords p{2, 6};
    Rank1Saturation r = saturate_rank1(AlgebraPresentation{{VectorField::euler(2, 6)}, {}});
    EXPECT_TRUE(r.director.same_terms(VectorField::euler(2, 6)));
    EXPECT_TRUE(r.coefficient_space[0].same_terms(p.c(1)));
    EXPECT_TRUE(r.saturable);

    try {
        saturate_rank1(AlgebraPresentation{{p.field({p.x(1), p.zero()}), p.field({p.zero(), p.x(2)})}, {}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotRank1);
    }
    try {
        saturate_rank1(AlgebraPresentation{{VectorField::euler(3, 4)}, {}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::GcdUnsupported);
    }
}

TEST(Saturation, StarConditionWitness)
{
    Coords c{1, 8};
    // E = <1, x^3> is not closed under f X(g) - g X(f) for X = d/dx.
    AlgebraPresentation a{{line(c, {{0, 1}}), line(c, {{3, 1}})}, {}};
    try {
        saturate_rank1(a);
        FAIL();
    } catch (const StarConditionError& e) {
        EXPECT_EQ(e.i(), 0);
        EXPECT_EQ(e.j(), 1);
    }
}

TEST(DerivationMatrix, Examples)
{
    Coords c{1, 6};
    Matrix d = derivation_matrix(line(c, {{0, 1}}), {c.c(1), c.x(1), c.x(1) * c.x(1)});
    EXPECT_EQ(d, (Matrix{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}}));
    EXPECT_TRUE(is_nilpotent_matrix(d));
    EXPECT_EQ(derivation_matrix(line(c, {{1, 1}}), {c.c(1), c.x(1)}), (Matrix{{0, 0}, {0, 1}}));

    Coords p{2, 8};
    for (auto [pp, qq] : {std::pair{1, 1}, {1, 2}, {2, 3}}) {
        VectorField x = p.field({qq * p.x(1), -pp * p.x(2)});
        Matrix z = derivation_matrix(x, {p.c(1), pow(p.x(1), pp) * pow(p.x(2), qq)});
        EXPECT_TRUE(z.is_zero());
    }
    try {
        derivation_matrix(line(c, {{0, 1}}), {c.c(1), c.x(1) * c.x(1)});
        FAIL();
    } catch (const NotInvariantError& e) {
        EXPECT_EQ(e.index(), 1);
        EXPECT_TRUE(e.residual().same_terms(2 * c.x(1)));
    }
}

TEST(DerivationMatrix, CharpolyIsBasisIndependent)
{
    Rng rng(502);
    Coords c{1, 8};
    VectorField x = line(c, {{0, 1}, {1, 2}});
    std::vector<Jet> base{c.c(1), c.x(1), c.x(1) * c.x(1)};
    Matrix d0 = derivation_matrix(x, base);
    for (int k = 0; k < 5; ++k) {
        Matrix m = rng.invertible(3);
        std::vector<Jet> other;
        for (int i = 0; i < 3; ++i) {
            Jet f = c.zero();
            for (int j = 0; j < 3; ++j) f += m(i, j) * base[j];
            other.push_back(f);
        }
        EXPECT_EQ(charpoly(derivation_matrix(x, other)), charpoly(d0));
    }
}

TEST(LinearOde, Examples)
{
    auto z = solve_linear_ode_jet(Matrix(2, 2), 4);
    EXPECT_TRUE(z[0][0].same_terms(Jet::constant(1, 4, 1)));
    EXPECT_TRUE(z[0][1].is_zero());

    auto e = solve_linear_ode_jet(Matrix{{1}}, 5);
    EXPECT_EQ(e[0][0].coeff({3}), q(1, 6));
    EXPECT_EQ(e[0][0].coeff({5}), q(1, 120));

    auto n = solve_linear_ode_jet(Matrix{{0, 1}, {0, 0}}, 4);
    Coords c{1, 4};
    EXPECT_TRUE(n[0][0].same_terms(c.c(1)));
    EXPECT_TRUE(n[0][1].is_zero());
    EXPECT_TRUE(n[1][0].same_terms(c.x(1)));
    EXPECT_TRUE(n[1][1].same_terms(c.c(1)));
}

TEST(LinearOde, ColumnsSolveTheSystem)
{
    Rng rng(503);
    for (int k = 0; k < 5; ++k) {
        Matrix l(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) l(i, j) = rng.small_rational(4);
        auto cols = solve_linear_ode_jet(l, 7);
        for (const auto& col : cols)
            for (int r = 0; r < 3; ++r) {
                Jet rhs = Jet(1, 7);
                for (int j = 0; j < 3; ++j) rhs += l(r, j) * col[j];
                EXPECT_TRUE(differentiate(col[r], 0).agrees(rhs, 6));
            }
    }
}

TEST(Nilpotency, Examples)
{
    Coords c{1, 6};
    EXPECT_FALSE(is_nilpotent(closure_check({line(c, {{1, 1}}), line(c, {{2, 1}})})));
    Coords p{2, 6};
    EXPECT_TRUE(is_nilpotent(closure_check({p.field({p.x(1), p.zero()}), p.field({p.zero(), p.x(2)})})));
    AlgebraPresentation tri = closure_check(nilpotent_triple(6));
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(is_nilpotent_matrix(ad_matrix(tri, i)));
}

TEST(FirstIntegral, Examples)
{
    Coords c{2, 10};
    for (auto [p, qq] : {std::pair{1, 1}, {1, 2}, {2, 3}}) {
        auto f = first_integral_jet(c.field({qq * c.x(1), -p * c.x(2)}), 10);
        ASSERT_TRUE(f);
        EXPECT_TRUE(f->same_terms(pow(c.x(1), p) * pow(c.x(2), qq)));
    }
    auto rot = first_integral_jet(c.field({-c.x(2), c.x(1)}), 10);
    ASSERT_TRUE(rot);
    EXPECT_TRUE(rot->same_terms(c.x(1) * c.x(1) + c.x(2) * c.x(2)));
    EXPECT_FALSE(first_integral_jet(VectorField::euler(2, 10), 10));
}

TEST(FirstIntegral, TransportsUnderConjugation)
{
    Rng rng(504);
    Coords c{2, 8};
    VectorField x = c.field({c.x(1), -c.x(2)});
    for (int k = 0; k < 4; ++k) {
        Diffeo phi = rng.near_identity(2, 8);
        Diffeo inv = inverse(phi);
        VectorField y = pushforward(phi, inv, x);
        auto f = first_integral_jet(y, 6);
        ASSERT_TRUE(f);
        Jet img = apply(y, *f);
        EXPECT_FALSE(img.part(0, f->reliable()).lowest_degree());
        // f o phi is a first integral of x, hence a multiple of x1 x2 at low order.
        Jet back = substitute(*f, phi.comps());
        EXPECT_TRUE(back.agrees(c.x(1) * c.x(2), 2));
    }
}

TEST(ClassifyLine, Examples)
{
    Coords c{1, 8};
    ClassificationTag a = classify_dim1(closure_check({line(c, {{2, 1}})}));
    EXPECT_EQ(a.family, Family::PowerLambda);
    EXPECT_EQ(*a.parameter("p"), 1);
    EXPECT_EQ(*a.parameter("lambda"), 0);

    ClassificationTag b = classify_dim1(closure_check({line(c, {{1, 1}}), line(c, {{3, 1}})}));
    EXPECT_EQ(b.family, Family::AffinePower);
    EXPECT_EQ(*b.parameter("p"), 3);

    ClassificationTag d = classify_dim1(closure_check({line(c, {{0, 1}}), line(c, {{1, 1}}), line(c, {{2, 1}})}));
    EXPECT_EQ(d.family, Family::Projective);

    ClassificationTag t = classify_dim1(closure_check({line(c, {{0, 2}, {3, 1}})}));
    EXPECT_EQ(t.family, Family::Translation);
    EXPECT_EQ(t.certificate.linear_part(), Matrix::identity(1));

    ClassificationTag l = classify_dim1(closure_check({line(c, {{0, 1}}), line(c, {{0, 1}, {1, 1}})}));
    EXPECT_EQ(l.family, Family::Affine);
}

TEST(ClassifyLine, ConjugatedModelsComeBack)
{
    Rng rng(505);
    Coords c{1, 8};
    for (int k = 0; k < 6; ++k) {
        Diffeo phi = rng.near_identity(1, 8, 4, 3);
        Diffeo inv = inverse(phi);
        auto push = [&](const VectorField& v) { return pushforward(phi, inv, v); };

        // x^2/(1 - 3x) d/dx, so lambda = 3.
        VectorField model = c.field({c.x(1) * c.x(1) * invert_unit(c.c(1) - 3 * c.x(1))});
        AlgebraPresentation one = closure_check({Rational(2) * push(model)});
        ClassificationTag a = classify_dim1(one);
        EXPECT_EQ(a.family, Family::PowerLambda);
        EXPECT_EQ(*a.parameter("lambda"), 3);
        EXPECT_TRUE(certificate_sound(one, a));

        AlgebraPresentation two = closure_check({push(line(c, {{1, 1}})), push(line(c, {{1, 1}, {2, 1}}))});
        ClassificationTag b = classify_dim1(two);
        EXPECT_EQ(b.family, Family::AffinePower);
        EXPECT_EQ(*b.parameter("p"), 2);

        AlgebraPresentation three =
            closure_check({push(line(c, {{0, 1}, {1, 1}})), push(line(c, {{1, 1}})), push(line(c, {{2, 1}}))});
        EXPECT_EQ(classify_dim1(three).family, Family::Projective);
    }
}

TEST(ClassifyPlane, Examples)
{
    PlaneFamilies fam{6};
    ClassificationTag a = classify_abelian_rank2(closure_check(fam.type1()));
    EXPECT_EQ(a.family, Family::Type1);
    ClassificationTag b = classify_abelian_rank2(closure_check(fam.type2(2)));
    EXPECT_EQ(b.family, Family::Type2);
    EXPECT_EQ(*b.parameter("n"), 2);
    ClassificationTag c = classify_abelian_rank2(closure_check(fam.type5()));
    EXPECT_EQ(c.family, Family::Type5);
}

TEST(ClassifyPlane, Refusals)
{
    Coords c{2, 6};
    try {
        classify_abelian_rank2(closure_check({VectorField::euler(2, 6), c.field({c.x(1) * c.x(1), c.zero()})}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotAbelian);
    }
    try {
        VectorField r2 = VectorField::euler(2, 6);
        classify_abelian_rank2(closure_check({r2, (c.x(1) * c.x(1)) * r2 + 0 * r2}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == Errc::NotRank2 || e.code() == Errc::NotAbelian);
    }
    try {
        classify_abelian_rank2(
            closure_check({c.field({pow(c.x(1), 2), c.zero()}), c.field({c.zero(), pow(c.x(2), 2)})}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NilpotentPencil);
    }
    try {
        classify_abelian_rank2(closure_check({c.field({c.c(1), c.zero()}), c.field({c.zero(), c.c(1)})}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonSingularityViolated);
    }
}

TEST(ClassifyPlane, RoundTripAllFamilies)
{
    Rng rng(506);
    const int t = 6;
    PlaneFamilies fam{t};
    for (int k = 0; k < 3; ++k) {
        Diffeo phi = rng.near_identity(2, t);
        Matrix mix = rng.invertible(2, 2);
        Jet a1 = formal::testing::random_series(rng, t, 1, 3);
        Jet a2 = formal::testing::random_series(rng, t, 2, 4);
        std::vector<std::pair<Family, std::vector<VectorField>>> cases{
            {Family::Type1, fam.type1()},
            {Family::Type2, fam.type2(2 + k)},
            {Family::Type3, fam.type3(1, 1 + k, a1, rng.small_rational(4, false), rng.small_rational(4, false))},
            {Family::Type4, fam.type4()},
            {Family::Type5, fam.type5()},
            {Family::Type6, fam.type6(a1, 1, rng.small_rational(4))},
            {Family::Type7, fam.type7(a2)},
        };
        for (const auto& [family, gens] : cases) {
            AlgebraPresentation pres = closure_check(formal::testing::disguise(gens, phi, mix));
            ClassificationTag tag;
            try {
                tag = classify_abelian_rank2(pres);
            } catch (const Error& e) {
                ADD_FAILURE() << family_name(family) << ": " << e.what();
                continue;
            }
            EXPECT_EQ(tag.family, family) << family_name(family);
            EXPECT_TRUE(certificate_sound(pres, tag)) << family_name(family);
            ClassificationTag lazy = tag;
            lazy.certificate = Diffeo::identity(2, t);
            EXPECT_FALSE(certificate_sound(pres, lazy)) << family_name(family);
            if (tag.series) {
                EXPECT_FALSE(tag.series->is_zero());
            }
        }
    }
}

TEST(Centralizer, AbelianPairCommutantIsTheSpan)
{
    Rng rng(507);
    PlaneFamilies fam{6};
    for (int k = 0; k < 4; ++k) {
        Diffeo phi = rng.near_identity(2, 6);
        for (const auto& gens : {fam.type1(), fam.type2(2), fam.type5()}) {
            auto pair = formal::testing::disguise(gens, phi, Matrix::identity(2));
            auto cent = centralizer(pair, 4);
            EXPECT_EQ(cent.size(), 2u);
            for (const auto& z : cent) EXPECT_TRUE(detail::span_coefficients(pair, z, z.reliable()).has_value());
        }
    }
}
