#include <gtest/gtest.h>

#include <random>

#include "ellsplit/curve.hpp"

using namespace ellsplit;

namespace {

Curve curve_37a1() { return Curve(CurveSpec(0, 0, 1, -1, 0)); }
Curve curve_36a1() { return Curve(CurveSpec(0, 0, 0, 0, 1)); }

CurvePoint pt(const char* x, const char* y) { return CurvePoint(mpq_class(x), mpq_class(y)); }

} // namespace

TEST(Curve, SingularCurveIsRejected)
{
    try {
        CurveSpec(0, 0, 0, 0, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularCurve);
    }
    EXPECT_EQ(CurveSpec(0, 0, 1, -1, 0).discriminant(), mpq_class(37));
}

TEST(Curve, AddIdentity)
{
    auto c = curve_37a1();
    CurvePoint p = pt("0", "0");
    EXPECT_EQ(c.add(p, CurvePoint()), p);
    EXPECT_EQ(c.add(CurvePoint(), p), p);
}

TEST(Curve, Doubling37a1)
{
    auto c = curve_37a1();
    EXPECT_EQ(c.add(pt("0", "0"), pt("0", "0")), pt("1", "0"));
}

TEST(Curve, ChordOn36a1)
{
    auto c = curve_36a1();
    EXPECT_EQ(c.add(pt("2", "3"), pt("0", "1")), pt("-1", "0"));
}

TEST(Curve, MultiplesOfGenerator)
{
    // frozen from an independent rational group-law computation
    auto c = curve_37a1();
    CurvePoint p = pt("0", "0");
    EXPECT_EQ(c.multiply(3, p), pt("-1", "-1"));
    EXPECT_EQ(c.multiply(5, p), pt("1/4", "-5/8"));
    EXPECT_EQ(c.multiply(8, p), pt("21/25", "-69/125"));
    EXPECT_EQ(c.multiply(22, p), pt("51678803961/12925188721", "10663732503571536/1469451780501769"));
    EXPECT_EQ(c.multiply(-1, p), pt("0", "-1"));
    EXPECT_EQ(c.multiply(0, p), CurvePoint());
}

TEST(Curve, OffCurvePointIsRejected)
{
    auto c = curve_37a1();
    try {
        (void)c.point(mpq_class(1), mpq_class(1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PointNotOnCurve);
    }
}

TEST(Curve, GroupLawProperties)
{
    auto c = curve_37a1();
    CurvePoint p = pt("0", "0");
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> k(-6, 6);
    for (int t = 0; t < 25; ++t) {
        int a = k(rng), b = k(rng), d = k(rng);
        CurvePoint x = c.multiply(a, p), y = c.multiply(b, p), z = c.multiply(d, p);
        EXPECT_EQ(c.add(c.add(x, y), z), c.add(x, c.add(y, z)));
        EXPECT_EQ(c.add(x, y), c.add(y, x));
        EXPECT_EQ(c.multiply(a, c.multiply(b, p)), c.multiply(a * b, p));
        EXPECT_EQ(c.add(x, c.negate(x)), CurvePoint());
    }
}

TEST(Curve, ScalarMulOfTorsion)
{
    auto c = curve_36a1();
    EXPECT_EQ(scalar_mul(c, Endomorphism(6), pt("2", "3")), CurvePoint());
    EXPECT_EQ(scalar_mul(c, Endomorphism(0), pt("2", "3")), CurvePoint());
}

TEST(Torsion, Detection)
{
    auto e36 = curve_36a1();
    auto ev = is_torsion(e36, pt("2", "3"));
    EXPECT_TRUE(ev.torsion);
    EXPECT_EQ(ev.order, 6);
    EXPECT_EQ(is_torsion(e36, pt("0", "1")).order, 3);
    EXPECT_EQ(is_torsion(e36, pt("-1", "0")).order, 2);
    EXPECT_EQ(is_torsion(e36, CurvePoint()).order, 1);

    auto e37 = curve_37a1();
    auto nt = is_torsion(e37, pt("0", "0"));
    EXPECT_FALSE(nt.torsion);
    EXPECT_FALSE(nt.reason.empty());
}

TEST(Torsion, NonIntegralCurveSkipsScreen)
{
    // y^2 = x^3 + 1/4 x: (0,0) has order 2
    Curve c(CurveSpec(0, 0, 0, mpq_class(1, 4), 0));
    EXPECT_EQ(is_torsion(c, pt("0", "0")).order, 2);
}

TEST(CMAction, GaussianGeneratorSquaresToMinusOne)
{
    CurveSpec spec(0, 0, 0, -2, 0); // y^2 = x^3 - 2x, (-1, 1) of infinite order
    Order o = Order::Gaussian;
    CMPoint p = to_cm_point(CurvePoint(mpq_class(-1), mpq_class(1)), o);
    EllipticGroup<QuadRational> g(spec, o);
    Endomorphism i = Endomorphism::gen(o);
    CMPoint ip = scalar_mul(spec, i, p);
    EXPECT_TRUE(g.contains(ip));
    EXPECT_EQ(scalar_mul(spec, i, ip), g.negate(p));
    // (1 + i) P = P + [i] P, and [i] is additive
    EXPECT_EQ(scalar_mul(spec, Endomorphism(1, 1, o), p), g.add(p, ip));
    CMPoint q = g.multiply(3, p);
    EXPECT_EQ(scalar_mul(spec, i, g.add(p, q)), g.add(ip, scalar_mul(spec, i, q)));
    // (1+i)(1-i) = 2
    EXPECT_EQ(scalar_mul(spec, Endomorphism(1, 1, o), scalar_mul(spec, Endomorphism(1, -1, o), p)), g.multiply(2, p));
}

TEST(CMAction, EisensteinGeneratorHasOrderThree)
{
    CurveSpec spec(0, 0, 0, 0, 1);
    Order o = Order::Eisenstein;
    CMPoint p = to_cm_point(CurvePoint(mpq_class(2), mpq_class(3)), o);
    EllipticGroup<QuadRational> g(spec, o);
    Endomorphism w = Endomorphism::gen(o);
    CMPoint wp = scalar_mul(spec, w, p), w2p = scalar_mul(spec, w, wp);
    EXPECT_EQ(scalar_mul(spec, w, w2p), p);
    EXPECT_EQ(g.add(g.add(p, wp), w2p), CMPoint());
}

TEST(CMAction, MismatchedFormIsRejected)
{
    CurveSpec spec(0, 0, 1, -1, 0);
    CMPoint p = to_cm_point(CurvePoint(mpq_class(0), mpq_class(0)), Order::Gaussian);
    try {
        (void)scalar_mul(spec, Endomorphism(0, 1, Order::Gaussian), p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedCMAction);
    }
}

TEST(Morphism, ApplyExamples)
{
    auto c = curve_37a1();
    CurvePoint p = pt("0", "0");
    PowerPoint x({p, c.multiply(2, p), c.multiply(22, p)});
    EXPECT_EQ(apply_morphism(c, MorphismMatrix::identity(3), x), x);
    PowerPoint pair({p, c.multiply(2, p)});
    EXPECT_TRUE(apply_morphism(c, MorphismMatrix::from_ints({{2, -1}}), pair).is_zero());
    auto img = apply_morphism(c, MorphismMatrix::from_ints({{2, -1, 0}, {0, -11, 1}}), x);
    EXPECT_EQ(img.dim(), 2u);
    EXPECT_TRUE(img.is_zero());
}

TEST(Morphism, DimensionMismatch)
{
    auto c = curve_37a1();
    PowerPoint pair({pt("0", "0"), pt("1", "0")});
    EXPECT_THROW(apply_morphism(c, MorphismMatrix::identity(3), pair), Error);
}

TEST(Morphism, CompositionMatchesProduct)
{
    auto c = curve_37a1();
    CurvePoint p = pt("0", "0");
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> k(-3, 3);
    for (int t = 0; t < 10; ++t) {
        PowerPoint x({c.multiply(k(rng), p), c.multiply(k(rng), p)});
        MorphismMatrix m(2, 2), d(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                m(i, j) = Endomorphism(k(rng));
                d(i, j) = Endomorphism(k(rng));
            }
        EXPECT_EQ(apply_morphism(c, d * m, x), apply_morphism(c, d, apply_morphism(c, m, x)));
    }
}

TEST(Morphism, CMMatrixOnGaussianCurve)
{
    CurveSpec spec(0, 0, 0, -2, 0);
    Order o = Order::Gaussian;
    CMPoint p = to_cm_point(CurvePoint(mpq_class(-1), mpq_class(1)), o);
    CMPowerPoint x({p, scalar_mul(spec, Endomorphism(0, 1, o), p)});
    // (i, -1) kills (P, iP)
    MorphismMatrix m(1, 2, o);
    m(0, 0) = Endomorphism(0, 1, o);
    m(0, 1) = Endomorphism(-1, 0, o);
    EXPECT_TRUE(apply_morphism(spec, m, x).is_zero());
}
