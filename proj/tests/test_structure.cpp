#include <gtest/gtest.h>

#include "ellsplit/structure.hpp"

using namespace ellsplit;

namespace {

VarietySpec torus(std::string name, std::size_t g, std::vector<std::string> gens, int dim)
{
    VarietySpec s;
    s.name = std::move(name);
    s.g = g;
    s.generators = std::move(gens);
    s.claimed_dimension = dim;
    return s;
}

VarietySpec envelope() { return torus("envelope", 4, {"z3 - 5*z1^4*(z4 - z2) - z1", "z2 - z1^5 - 1"}, 2); }
VarietySpec hyper3() { return torus("hyper3", 3, {"z1*z2*z3 - z1 - 1"}, 2); }
VarietySpec plane3() { return torus("plane3", 3, {"z1 + z2 + z3 - 1"}, 2); }
VarietySpec split_product() { return torus("split", 4, {"z2 - z1^5 - 1", "z4 - z3^2 - z3 - 1"}, 2); }
VarietySpec point_times_plane() { return torus("point-plane", 4, {"z1 - 2", "z2 - 3"}, 2); }

VarietySpec c_times_e()
{
    VarietySpec s;
    s.name = "CxE";
    s.ambient = Ambient::EllipticPower;
    s.g = 3;
    s.curve = CurveSpec(0, 0, 1, -1, 0);
    s.generators = {"x2 - x1 - 1"};
    s.claimed_dimension = 2;
    return s;
}

} // namespace

TEST(PropertyS, EnvelopeFailsThroughTheCurve)
{
    Variety v(envelope());
    auto rep = check_property_S(v, 0, 1.0);
    ASSERT_TRUE(rep.fails);
    EXPECT_EQ(*rep.witness, MorphismMatrix::from_ints({{1, 0, 0, 0}, {0, 1, 0, 0}}));
    EXPECT_EQ(rep.witness_image.image_dimension, 1);
    EXPECT_EQ(rep.witness_image.generator_strings(), std::vector<std::string>{"z1^5 - z2 + 1"});
    EXPECT_TRUE(*rep.deprived_set_empty);
    EXPECT_EQ(rep.verdict(), "FAILS");
}

TEST(PropertyS, SplitProductFailsOnACoordinateBlock)
{
    Variety v(split_product());
    auto rep = check_property_S(v, 0, 1.0);
    ASSERT_TRUE(rep.fails);
    auto cols = detail::unit_coordinate_rows(*rep.witness);
    ASSERT_TRUE(cols.has_value());
    EXPECT_EQ(rep.witness_image.image_dimension, 1);
}

TEST(PropertyS, HypersurfaceThroughAProductFails)
{
    // z1 * (z2 z3 - 1) = 1 is pulled back from a curve by (z1, z2 z3)
    Variety v(hyper3());
    auto rep = check_property_S(v, 0, 2.0);
    ASSERT_TRUE(rep.fails);
    EXPECT_EQ(*rep.witness, MorphismMatrix::from_ints({{1, 0, 0}, {0, 1, 1}}));
    EXPECT_EQ(rep.witness_image.image_dimension, 1);
    EXPECT_EQ(rep.witness_image.generator_strings(), std::vector<std::string>{"w1*w2 - w1 - 1"});
}

TEST(PropertyS, TransversePlanePassesAtBoundTwo)
{
    Variety v(plane3());
    auto rep = check_property_S(v, 0, 2.0);
    EXPECT_FALSE(rep.fails);
    EXPECT_EQ(rep.candidates_checked, hermite_enumerate(2, 3, 2.0).size());
    EXPECT_EQ(rep.verdict(), "PASSES-UP-TO-BOUND");
    EXPECT_FALSE(*rep.deprived_set_empty);
}

TEST(PropertyS, EllipticPowerUsesCoordinateProjections)
{
    Variety v(c_times_e());
    auto rep = check_property_S(v, 0, 1.0);
    ASSERT_TRUE(rep.fails);
    EXPECT_EQ(*rep.witness, MorphismMatrix::from_ints({{1, 0, 0}, {0, 1, 0}}));
    EXPECT_EQ(rep.witness_image.image_dimension, 1);

    VarietySpec c = c_times_e();
    c.name = "C";
    c.g = 2;
    c.claimed_dimension = 1;
    auto pass = check_property_S(Variety(c), 0, 2.0);
    EXPECT_FALSE(pass.fails);
    EXPECT_EQ(pass.candidates_checked, 2u);
    EXPECT_GT(pass.candidates_skipped, 0u);
}

TEST(DominantProjection, GreedyMatchesBruteForce)
{
    for (auto spec : {envelope(), hyper3(), plane3(), split_product(), point_times_plane(), c_times_e()}) {
        Variety v(spec);
        auto s = find_dominant_projection(v);
        auto all = dominant_projections_brute_force(v);
        ASSERT_FALSE(all.empty()) << spec.name;
        EXPECT_EQ(s, all.front()) << spec.name;
    }
    EXPECT_EQ(find_dominant_projection(Variety(envelope())), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(find_dominant_projection(Variety(point_times_plane())), (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(find_dominant_projection(Variety(torus("full", 3, {}, 3))), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(RefineFailure, Cases)
{
    Variety env(envelope());
    auto w = MorphismMatrix::from_ints({{1, 0, 0, 0}, {0, 1, 0, 0}});
    EXPECT_EQ(refine_failure(env, w), w);

    Variety pp(point_times_plane());
    auto r = refine_failure(pp, w);
    EXPECT_EQ(r, MorphismMatrix::from_ints({{0, 0, 1, 0}, {0, 1, 0, 0}}));
    EXPECT_EQ(image(pp, r).image_dimension, 1);
}

TEST(SplitWitness, AgreesWithPropertySOnEveryCandidate)
{
    for (auto spec : {envelope(), hyper3(), plane3(), c_times_e()}) {
        Variety v(spec);
        std::size_t d = static_cast<std::size_t>(v.dimension());
        for (auto& m : hermite_enumerate(d, v.g(), 1.0)) {
            auto img = try_image(v, m);
            if (!img) continue;
            auto s = build_split_witness(v, m, 0);
            EXPECT_EQ(s.has_value(), img->image_dimension < v.dimension()) << spec.name << ' ' << m;
            if (!s) continue;
            EXPECT_FALSE(determinant(s->isogeny).is_zero());
            EXPECT_EQ(s->isogeny.row_block(0, d), m);
            EXPECT_LE(s->dim_w1 + s->dim_w2, static_cast<int>(v.g()));
            EXPECT_GE(s->dim_w1 + s->dim_w2, v.dimension());
        }
    }
}

TEST(SumDimension, Examples)
{
    Variety v(envelope());
    auto trivial = check_ps_criterion(v, MorphismMatrix(4, 0));
    EXPECT_TRUE(trivial.holds);
    EXPECT_EQ(trivial.dim_sum, 2);

    // B = {(1, 1, t, s)}: V + B is the curve times G_m^2
    auto b2 = check_ps_criterion(v, MorphismMatrix::from_ints({{0, 0}, {0, 0}, {1, 0}, {0, 1}}));
    EXPECT_EQ(b2.dim_sum, 3);
    EXPECT_EQ(b2.expected, 4);
    EXPECT_FALSE(b2.holds);

    auto b1 = check_ps_criterion(v, MorphismMatrix::from_ints({{0}, {0}, {0}, {1}}));
    EXPECT_EQ(b1.dim_sum, 3);
    EXPECT_TRUE(b1.holds);
}

TEST(SumDimension, ViolationImpliesPropertySFails)
{
    for (auto spec : {envelope(), hyper3(), plane3()}) {
        Variety v(spec);
        bool violated = false;
        for (std::size_t k = 1; k <= 2; ++k)
            for (auto& rows : hermite_enumerate(k, v.g(), 1.0))
                if (!check_ps_criterion(v, transpose(rows)).holds) violated = true;
        EXPECT_EQ(violated, spec.name != "plane3") << spec.name;
        if (violated) {
            EXPECT_TRUE(check_property_S(v, 0, 1.0).fails) << spec.name;
        }
    }
}
