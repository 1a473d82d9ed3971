#include <gtest/gtest.h>

#include <chrono>
#include <set>

#include "ellsplit/unbounded.hpp"

using namespace ellsplit;

namespace {

CurveSpec e37() { return CurveSpec(0, 0, 1, -1, 0); }
CurveSpec e36() { return CurveSpec(0, 0, 0, 0, 1); }

VarietySpec power(std::string name, std::size_t g, std::vector<std::string> gens, int dim, CurveSpec c = e37())
{
    VarietySpec s;
    s.name = std::move(name);
    s.ambient = Ambient::EllipticPower;
    s.g = g;
    s.curve = c;
    s.generators = std::move(gens);
    s.claimed_dimension = dim;
    return s;
}

FibrationData cxe()
{
    FibrationData f;
    f.variety = power("CxE", 3, {"x2 - x1 - 1"}, 2);
    f.base_variety = power("C", 2, {"x2 - x1 - 1"}, 1);
    f.base = {0, 1};
    f.fiber = {2};
    f.generators = {CurvePoint(0, 0)};
    return f;
}

std::vector<CurvePoint> torsion36() { return {CurvePoint(2, 3), CurvePoint(2, -3), CurvePoint(0, 1), CurvePoint(0, -1), CurvePoint(-1, 0)}; }

FibrationData c36xe()
{
    FibrationData f;
    f.variety = power("C36xE", 3, {"x2 - x1 - 2"}, 2, e36());
    f.base_variety = power("C36", 2, {"x2 - x1 - 2"}, 1, e36());
    f.base = {0, 1};
    f.fiber = {2};
    f.torsion = torsion36();
    return f;
}

} // namespace

TEST(Fibration, ChecksTheFreeFibre)
{
    auto c = check_fibration(cxe());
    EXPECT_EQ(c.d, 2);
    EXPECT_EQ(c.d1, 1);
    EXPECT_EQ(c.d2, 1);

    auto bad = cxe();
    bad.fiber = {1};
    bad.base = {0, 2};
    EXPECT_THROW(check_fibration(bad), Error);

    // V1 = E (d1 = d) is rejected
    auto whole = cxe();
    whole.variety = power("E2", 2, {}, 2);
    whole.base_variety = power("E", 1, {}, 1);
    whole.base = {0};
    whole.fiber = {1};
    EXPECT_NO_THROW(check_fibration(whole));
    whole.variety = power("E", 1, {}, 1);
    whole.fiber = {};
    EXPECT_THROW(check_fibration(whole), Error);
}

TEST(Fibration, PointSupplyOrder)
{
    Curve c(e37());
    auto s = point_supply(c, {CurvePoint(0, 0)}, {}, 3);
    ASSERT_EQ(s.size(), 6u);
    EXPECT_EQ(s[0].point, CurvePoint(0, 0));
    EXPECT_EQ(s[1].point, c.multiply(-1, CurvePoint(0, 0)));
    EXPECT_EQ(s[2].point, CurvePoint(1, 0));
    auto pts = rational_points(Variety(cxe().base_variety), s);
    ASSERT_FALSE(pts.empty());
    EXPECT_EQ(pts[0], PowerPoint({CurvePoint(0, 0), CurvePoint(1, 0)}));
}

TEST(BasePoint, CurveOver37a1)
{
    auto f = check_fibration(cxe());
    auto bp = find_base_point(f, 2.0);
    EXPECT_EQ(bp.x1, PowerPoint({CurvePoint(0, 0), CurvePoint(1, 0)}));
    EXPECT_TRUE(bp.phi1 == MorphismMatrix::from_ints({{2, -1}}) || bp.phi1 == MorphismMatrix::from_ints({{-2, 1}}));
    EXPECT_EQ(bp.k, 1u);
    auto p = seminorm(f.curve, PowerPoint({CurvePoint(0, 0)}), 1e-10);
    EXPECT_NEAR(bp.zk_norm.value(), 2 * p.value(), 1e-7);
}

TEST(BasePoint, TorsionSupplyHasNone)
{
    auto f = check_fibration(c36xe());
    try {
        find_base_point(f, 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoBasePointFound);
    }
}

TEST(Unbounded, SingleCertificate)
{
    auto f = check_fibration(cxe());
    auto bp = find_base_point(f, 2.0);
    auto certs = generate_unbounded(f, bp, {10}, 1);
    ASSERT_EQ(certs.size(), 1u);
    auto& c = certs[0];
    CurvePoint p(0, 0);
    EXPECT_EQ(c.column, std::vector<std::int64_t>{11});
    EXPECT_EQ(c.point, PowerPoint({p, f.curve.multiply(2, p), f.curve.multiply(22, p)}));
    auto sign = bp.phi1(0, 0).a > 0 ? 1 : -1;
    EXPECT_EQ(c.phi, MorphismMatrix::from_ints({{2 * sign, -sign, 0}, {0, -11, 1}}));
    EXPECT_TRUE(c.verified());
    EXPECT_EQ(c.rank, 2u);
    auto np = seminorm(f.curve, PowerPoint({p}), 1e-10);
    EXPECT_NEAR(c.norm.value(), 22 * np.value(), 1e-6);
    EXPECT_GT(c.norm.lower(), c.bound());

    auto weak = generate_unbounded(f, bp, {0}, 1);
    EXPECT_EQ(weak[0].point, PowerPoint({p, f.curve.multiply(2, p), f.curve.multiply(2, p)}));
}

TEST(Unbounded, TamperedCertificateFails)
{
    auto f = check_fibration(cxe());
    auto bp = find_base_point(f, 2.0);
    auto c = generate_unbounded(f, bp, {4}, 1)[0];
    auto moved = c;
    moved.point[2] = f.curve.add(moved.point[2], CurvePoint(0, 0));
    EXPECT_FALSE(verify_certificate(f.v, moved));
    EXPECT_FALSE(moved.zero_image);
    auto bigger = c;
    bigger.N = 100;
    EXPECT_FALSE(verify_certificate(f.v, bigger));
    EXPECT_FALSE(bigger.bound_ok);
    EXPECT_TRUE(verify_certificate(f.v, c));
}

TEST(Unbounded, GrowthAlongTheSequence)
{
    auto t0 = std::chrono::steady_clock::now();
    auto f = check_fibration(cxe());
    auto bp = find_base_point(f, 2.0);
    std::vector<double> Ns{2, 4, 8, 16, 32, 64, 128};
    auto certs = generate_unbounded(f, bp, Ns, 3);
    ASSERT_EQ(certs.size(), 21u);
    double previous = 0;
    for (double N : Ns) {
        double lowest = INFINITY;
        std::set<std::string> fibres;
        for (auto& c : certs) {
            if (c.N != N) continue;
            EXPECT_TRUE(c.verified());
            lowest = std::min(lowest, c.norm.lower());
            std::ostringstream os;
            os << c.point[2];
            fibres.insert(os.str());
        }
        EXPECT_EQ(fibres.size(), 3u);
        EXPECT_GT(lowest, previous);
        previous = lowest;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(secs, 60.0);
}

TEST(TorsionPreimage, Cases)
{
    Variety v(cxe().variety);
    Curve c37(e37());
    auto supply = point_supply(c37, {CurvePoint(0, 0)}, {}, 2);
    EXPECT_TRUE(dense_torsion_preimage(v, {0, 2}, {}, supply, 10).empty());
    EXPECT_THROW(dense_torsion_preimage(v, {0, 1}, {}, supply, 10), Error);

    Curve c36(e36());
    auto tsupply = point_supply(c36, {}, torsion36(), 0);
    Variety ep(power("ExP", 2, {"x2 - 2", "y2 - 3"}, 1, e36()));
    auto stream = dense_torsion_preimage(ep, {0}, torsion36(), tsupply, 100);
    EXPECT_EQ(stream.size(), 5u);
    for (auto& r : stream) {
        EXPECT_TRUE(ep.contains(r.point));
        EXPECT_TRUE(verify_record(c36, r));
    }

    Variety graph(c36xe().variety);
    auto g = dense_torsion_preimage(graph, {0, 2}, torsion36(), tsupply, 100);
    EXPECT_EQ(g.size(), 20u);
    for (auto& r : g) {
        EXPECT_TRUE(graph.contains(r.point));
        EXPECT_TRUE(verify_record(c36, r));
    }
}
