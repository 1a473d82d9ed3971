#pragma once

// Built-in varieties used by the tests, the samples and the CLI.

#include <optional>
#include <string>
#include <vector>

#include "curve.hpp"
#include "error.hpp"
#include "unbounded.hpp"
#include "variety.hpp"

namespace ellsplit {

struct CorpusEntry {
    std::string name;
    VarietySpec spec;
    std::optional<FibrationData> fibration;
    std::vector<CurvePoint> generators; // Mordell-Weil generators of the curve
    std::vector<CurvePoint> torsion;    // affine rational torsion of the curve
    std::string note;
};

namespace corpus {

inline CurveSpec curve_37a1() { return CurveSpec(0, 0, 1, -1, 0); }
inline CurveSpec curve_36a1() { return CurveSpec(0, 0, 0, 0, 1); }

inline std::vector<CurvePoint> torsion_36a1()
{
    return {CurvePoint(2, 3), CurvePoint(2, -3), CurvePoint(0, 1), CurvePoint(0, -1), CurvePoint(-1, 0)};
}

inline VarietySpec torus(std::string name, std::size_t g, std::vector<std::string> gens, int dim)
{
    VarietySpec s;
    s.name = std::move(name);
    s.ambient = Ambient::Torus;
    s.g = g;
    s.generators = std::move(gens);
    s.claimed_dimension = dim;
    return s;
}

inline VarietySpec power(std::string name, const CurveSpec& c, std::size_t g, std::vector<std::string> gens, int dim)
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

} // namespace corpus

inline const std::vector<CorpusEntry>& corpus_entries()
{
    using namespace corpus;
    static const std::vector<CorpusEntry> entries = [] {
        std::vector<CorpusEntry> v;
        CurvePoint p37(0, 0);

        v.push_back({"37a1", power("37a1", curve_37a1(), 1, {}, 1), std::nullopt, {p37}, {},
                     "y^2 + y = x^3 - x, rank 1 with generator (0,0), trivial torsion"});
        v.push_back({"C", power("C", curve_37a1(), 2, {"x2 - x1 - 1"}, 1), std::nullopt, {p37}, {},
                     "curve x(Q) = x(P) + 1 in E^2; contains (P, 2P)"});

        FibrationData cxe;
        cxe.variety = power("CxE", curve_37a1(), 3, {"x2 - x1 - 1"}, 2);
        cxe.base_variety = power("C", curve_37a1(), 2, {"x2 - x1 - 1"}, 1);
        cxe.base = {0, 1};
        cxe.fiber = {2};
        cxe.generators = {p37};
        v.push_back({"CxE", cxe.variety, cxe, {p37}, {},
                     "C x E in E^3: fails Property (S), carries points of S_2 of unbounded height"});

        v.push_back({"CxC", power("CxC", curve_37a1(), 4, {"x2 - x1 - 1", "x4 - x3 - 1"}, 2), std::nullopt, {p37}, {},
                     "split product of two copies of C"});

        v.push_back({"envelope", torus("envelope", 4, {"z3 - 5*z1^4*(z4 - z2) - z1", "z2 - z1^5 - 1"}, 2),
                     std::nullopt, {}, {}, "envelope surface over the curve z2 = z1^5 + 1; fails Property (S)"});
        v.push_back({"split-product", torus("split-product", 4, {"z2 - z1^5 - 1", "z4 - z3^2 - z3 - 1"}, 2),
                     std::nullopt, {}, {}, "product of two curves in G_m^2"});
        v.push_back({"point-times-plane", torus("point-times-plane", 4, {"z1 - 2", "z2 - 3"}, 2), std::nullopt, {}, {},
                     "{(2, 3)} x G_m^2; coordinate witnesses have zero-dimensional image"});
        v.push_back({"hyper3", torus("hyper3", 3, {"z1*z2*z3 - z1 - 1"}, 2), std::nullopt, {}, {},
                     "pulled back from the curve z1 (w - 1) = 1 by (z1, z2 z3)"});
        v.push_back({"plane3", torus("plane3", 3, {"z1 + z2 + z3 - 1"}, 2), std::nullopt, {}, {},
                     "transverse plane; no witness at bound 2"});

        v.push_back({"ExT", power("ExT", curve_36a1(), 2, {"x2 - 2", "y2 - 3"}, 1), std::nullopt, {}, torsion_36a1(),
                     "E x {(2, 3)} over y^2 = x^3 + 1 (rank 0, torsion of order 6)"});

        FibrationData c36;
        c36.variety = power("C36xE", curve_36a1(), 3, {"x2 - x1 - 2"}, 2);
        c36.base_variety = power("C36", curve_36a1(), 2, {"x2 - x1 - 2"}, 1);
        c36.base = {0, 1};
        c36.fiber = {2};
        c36.torsion = torsion_36a1();
        v.push_back({"C36xE", c36.variety, c36, {}, torsion_36a1(),
                     "graph family x(Q) = x(P) + 2 times E over a rank 0 curve; torsion supply only"});
        return v;
    }();
    return entries;
}

inline const CorpusEntry& corpus_entry(const std::string& name)
{
    for (auto& e : corpus_entries())
        if (e.name == name) return e;
    raise(ErrorCode::ConfigError, "unknown corpus entry '" + name + "'");
}

/// Load-time validation: dimension, fibration structure, listed points.
inline void validate_entry(const CorpusEntry& e)
{
    Variety v(e.spec);
    if (e.fibration) check_fibration(*e.fibration);
    if (!e.generators.empty() || !e.torsion.empty()) {
        Curve c(v.curve());
        for (auto& p : e.generators)
            if (is_torsion(c, p).torsion) raise(ErrorCode::InvalidVariety, e.name + ": generator is torsion");
        for (auto& p : e.torsion)
            if (!is_torsion(c, p).torsion) raise(ErrorCode::InvalidVariety, e.name + ": listed torsion is not torsion");
    }
}

} // namespace ellsplit
