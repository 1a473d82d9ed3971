#pragma once

// JSON forms of the value types. Rationals are "p/q" strings.

#include <string>
#include <vector>

#include <json.hpp>

#include "curve.hpp"
#include "endo.hpp"
#include "error.hpp"
#include "heights.hpp"
#include "structure.hpp"
#include "subgroups.hpp"
#include "unbounded.hpp"
#include "variety.hpp"

namespace ellsplit {

using Json = nlohmann::ordered_json;

inline Json rational_json(const mpq_class& q) { return q.get_str(); }

inline mpq_class rational_from_json(const Json& j)
{
    try {
        if (j.is_number_integer()) return mpq_class(j.get<long>());
        if (!j.is_string()) raise(ErrorCode::ParseError, "rational must be a string or integer");
        mpq_class q(j.get<std::string>());
        if (q.get_den() == 0) raise(ErrorCode::ParseError, "zero denominator");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        raise(ErrorCode::ParseError, "bad rational " + j.dump());
    }
}

inline Json to_json(const CurveSpec& c)
{
    return Json{{"a1", rational_json(c.a1)}, {"a2", rational_json(c.a2)}, {"a3", rational_json(c.a3)},
                {"a4", rational_json(c.a4)}, {"a6", rational_json(c.a6)}};
}

inline CurveSpec curve_from_json(const Json& j)
{
    auto get = [&](const char* k) { return j.contains(k) ? rational_from_json(j.at(k)) : mpq_class(0); };
    return CurveSpec(get("a1"), get("a2"), get("a3"), get("a4"), get("a6"));
}

inline Json to_json(const CurvePoint& p)
{
    if (p.infinity) return "infinity";
    return Json{{"x", rational_json(p.x)}, {"y", rational_json(p.y)}};
}

inline CurvePoint point_from_json(const Json& j)
{
    if (j.is_string() && j.get<std::string>() == "infinity") return CurvePoint();
    if (!j.is_object()) raise(ErrorCode::ParseError, "point must be an object or \"infinity\"");
    return CurvePoint(rational_from_json(j.at("x")), rational_from_json(j.at("y")));
}

inline Json to_json(const PowerPoint& x)
{
    Json a = Json::array();
    for (auto& c : x.components) a.push_back(to_json(c));
    return a;
}

inline PowerPoint power_point_from_json(const Json& j)
{
    if (!j.is_array()) raise(ErrorCode::ParseError, "point tuple must be an array");
    PowerPoint x;
    for (auto& c : j) x.components.push_back(point_from_json(c));
    return x;
}

inline Json to_json(const MorphismMatrix& m)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(Json{{"a", m(i, j).a}, {"b", m(i, j).b}});
        rows.push_back(row);
    }
    Json out{{"kind", m.order() == Order::Z ? "Z" : "CM"}};
    if (m.order() != Order::Z) out["discriminant"] = discriminant(m.order());
    out["cols"] = m.cols();
    out["entries"] = rows;
    return out;
}

inline MorphismMatrix matrix_from_json(const Json& j)
{
    // a bare array of integer rows is accepted as well
    if (j.is_array()) {
        std::vector<std::vector<std::int64_t>> rows;
        for (auto& r : j) rows.push_back(r.get<std::vector<std::int64_t>>());
        return MorphismMatrix::from_ints(rows);
    }
    Order o = Order::Z;
    if (j.value("kind", std::string("Z")) == "CM") o = order_from_discriminant(j.at("discriminant").get<long>());
    const Json& rows = j.at("entries");
    std::size_t r = rows.size(), c = r ? rows[0].size() : j.value("cols", std::size_t{0});
    MorphismMatrix m(r, c, o);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) raise(ErrorCode::DimensionMismatch, "ragged matrix rows");
        for (std::size_t k = 0; k < c; ++k) {
            const Json& e = rows[i][k];
            std::int64_t a = e.is_number() ? e.get<std::int64_t>() : e.at("a").get<std::int64_t>();
            std::int64_t b = e.is_number() ? 0 : e.value("b", std::int64_t{0});
            if (o == Order::Z && b != 0) raise(ErrorCode::ParseError, "b must be zero over Z");
            m(i, k) = Endomorphism(a, b, o);
        }
    }
    return m;
}

inline Json to_json(const VarietySpec& s)
{
    Json j{{"name", s.name}, {"ambient", std::string(to_string(s.ambient))}, {"g", s.g}};
    if (s.curve) j["curve"] = to_json(*s.curve);
    j["generators"] = s.generators;
    j["claimed_dimension"] = s.claimed_dimension;
    j["claimed_irreducible"] = s.claimed_irreducible;
    return j;
}

inline VarietySpec variety_from_json(const Json& j)
{
    VarietySpec s;
    s.name = j.value("name", std::string("variety"));
    s.ambient = ambient_from_string(j.value("ambient", std::string("torus")));
    s.g = j.at("g").get<std::size_t>();
    if (j.contains("curve")) s.curve = curve_from_json(j.at("curve"));
    s.generators = j.value("generators", std::vector<std::string>{});
    s.claimed_dimension = j.value("claimed_dimension", -1);
    s.claimed_irreducible = j.value("claimed_irreducible", true);
    return s;
}

inline Json to_json(const HeightValue& h)
{
    return Json{{"value", h.value()}, {"radius", h.radius()}, {"lower", h.exact_zero ? 0.0 : h.lower()},
                {"upper", h.exact_zero ? 0.0 : h.upper()}, {"exact_zero", h.exact_zero}};
}

inline HeightValue height_from_json(const Json& j)
{
    if (j.value("exact_zero", false)) return HeightValue::zero();
    HeightValue h;
    h.enclosure = Interval::hull(j.at("lower").get<double>(), j.at("upper").get<double>());
    return h;
}

inline Json to_json(const EliminationReport& r)
{
    std::vector<std::size_t> kept1;
    for (auto k : r.kept) kept1.push_back(k + 1);
    Json j{{"kept", kept1}, {"image_dimension", r.image_dimension}, {"method", r.method},
           {"generators_known", r.generators_known}};
    j["generators"] = r.generator_strings();
    return j;
}

inline Json to_json(const PropertySReport& r)
{
    Json j{{"variety", r.variety}, {"n", r.n}, {"bound", r.bound}, {"dimension", r.dimension},
           {"verdict", r.verdict()}};
    if (r.witness) {
        j["witness"] = to_json(*r.witness);
        j["witness_index"] = r.witness_index;
        j["witness_image"] = to_json(r.witness_image);
    }
    j["candidates_checked"] = r.candidates_checked;
    j["candidates_skipped"] = r.candidates_skipped;
    if (r.deprived_set_empty) j["deprived_set_empty"] = *r.deprived_set_empty;
    return j;
}

inline Json to_json(const MembershipRecord& r)
{
    return Json{{"point_index", r.point_index},
                {"candidate_index", r.candidate_index},
                {"point", to_json(r.point)},
                {"certificate", to_json(r.certificate)},
                {"translate", to_json(r.translate)},
                {"exact_zero", r.exact_zero},
                {"torsion_orders", r.orders},
                {"r", r.r}};
}

inline MembershipRecord record_from_json(const Json& j)
{
    MembershipRecord r;
    r.point_index = j.value("point_index", std::size_t{0});
    r.candidate_index = j.value("candidate_index", std::size_t{0});
    r.point = power_point_from_json(j.at("point"));
    r.certificate = matrix_from_json(j.at("certificate"));
    r.translate = power_point_from_json(j.at("translate"));
    r.exact_zero = j.value("exact_zero", false);
    r.orders = j.value("torsion_orders", std::vector<int>{});
    r.r = j.at("r").get<std::size_t>();
    return r;
}

inline Json to_json(const UnboundedCertificate& c)
{
    return Json{{"variety", c.variety},
                {"N", c.N},
                {"point", to_json(c.point)},
                {"base", c.base},
                {"fiber", c.fiber},
                {"column", c.column},
                {"phi1", to_json(c.phi1)},
                {"phi2", to_json(c.phi2)},
                {"pi", to_json(c.pi)},
                {"phi", to_json(c.phi)},
                {"rank", c.rank},
                {"k", c.k},
                {"zk_norm", to_json(c.zk_norm)},
                {"seminorm", to_json(c.norm)},
                {"bound", c.bound()},
                {"precision", c.precision},
                {"zero_image", c.zero_image},
                {"on_variety", c.on_variety},
                {"rank_ok", c.rank_ok},
                {"bound_ok", c.bound_ok},
                {"verified", c.verified()}};
}

/// Reads the claims of a certificate; the verification flags are left false.
inline UnboundedCertificate certificate_from_json(const Json& j)
{
    UnboundedCertificate c;
    c.variety = j.value("variety", std::string());
    c.N = j.at("N").get<double>();
    c.point = power_point_from_json(j.at("point"));
    c.base = j.at("base").get<std::vector<std::size_t>>();
    c.fiber = j.at("fiber").get<std::vector<std::size_t>>();
    c.column = j.value("column", std::vector<std::int64_t>{});
    c.phi1 = matrix_from_json(j.at("phi1"));
    c.phi2 = matrix_from_json(j.at("phi2"));
    c.pi = matrix_from_json(j.at("pi"));
    c.phi = matrix_from_json(j.at("phi"));
    c.rank = j.value("rank", std::size_t{0});
    c.k = j.at("k").get<std::size_t>();
    if (j.contains("zk_norm")) c.zk_norm = height_from_json(j.at("zk_norm"));
    if (j.contains("seminorm")) c.norm = height_from_json(j.at("seminorm"));
    c.precision = j.value("precision", 1e-8);
    return c;
}

} // namespace ellsplit
