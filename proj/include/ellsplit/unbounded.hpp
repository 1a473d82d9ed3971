#pragma once

// Points of S_d(V) of unbounded height on varieties fibred over a smaller
// V1 with free fibres E^{d2}, each with an exactly verifiable certificate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "curve.hpp"
#include "endo.hpp"
#include "error.hpp"
#include "heights.hpp"
#include "structure.hpp"
#include "subgroups.hpp"
#include "variety.hpp"

namespace ellsplit {

/// V inside V1 x E^{d2}: `base` carries V1, `fiber` the free coordinates.
struct FibrationData {
    VarietySpec variety;
    VarietySpec base_variety;
    std::vector<std::size_t> base;
    std::vector<std::size_t> fiber;
    std::vector<CurvePoint> generators; // Mordell-Weil generators used for the point supply
    std::vector<CurvePoint> torsion;    // affine rational torsion points
    int supply_multiple = 4;
};

struct CheckedFibration {
    FibrationData data;
    Variety v;
    Variety v1;
    Curve curve;
    int d = 0, d1 = 0, d2 = 0;
};

namespace detail {

inline std::vector<Polynomial> embed_all(const std::vector<Polynomial>& ps, const std::vector<std::size_t>& map,
                                         const OrderPtr& order)
{
    std::vector<Polynomial> out;
    for (auto& p : ps) out.push_back(p.embed(map, order));
    return out;
}

} // namespace detail

/// Loads V and V1 and checks that the ideal of V is that of V1 in the base
/// coordinates joined with the curve equations of the fibre coordinates.
inline CheckedFibration check_fibration(const FibrationData& f)
{
    if (f.variety.ambient != Ambient::EllipticPower || f.base_variety.ambient != Ambient::EllipticPower)
        raise(ErrorCode::FiberSolveUnsupported, "fibrations need the elliptic model");
    if (!f.variety.curve || !f.base_variety.curve || !(*f.variety.curve == *f.base_variety.curve))
        raise(ErrorCode::InvalidVariety, "V and V1 must live over the same curve");
    CheckedFibration c{f, Variety(f.variety), Variety(f.base_variety), Curve(*f.variety.curve)};
    std::size_t g = c.v.g();
    std::vector<std::size_t> all = f.base;
    all.insert(all.end(), f.fiber.begin(), f.fiber.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(g);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    if (all != expect || f.base.size() != c.v1.g()) raise(ErrorCode::InvalidVariety, "base and fibre must partition the factors");

    c.d = c.v.dimension();
    c.d1 = c.v1.dimension();
    c.d2 = static_cast<int>(f.fiber.size());
    if (c.d1 >= c.d) raise(ErrorCode::InvalidVariety, "base must have smaller dimension than V");
    if (c.d1 + c.d2 != c.d) raise(ErrorCode::InvalidVariety, "d1 + d2 must equal d");

    std::vector<std::size_t> map;
    for (auto b : f.base) {
        map.push_back(2 * b);
        map.push_back(2 * b + 1);
    }
    auto gens = detail::embed_all(c.v1.basis(), map, c.v.order());
    for (auto i : f.fiber) gens.push_back(weierstrass_polynomial(c.v.curve(), c.v.order(), 2 * i, 2 * i + 1));
    if (groebner(gens, c.v.config()) != c.v.basis())
        raise(ErrorCode::FiberSolveUnsupported, "fibres of " + c.v.name() + " are not the free factors");
    for (auto& p : f.generators) c.curve.require_on_curve(p);
    for (auto& p : f.torsion)
        if (!is_torsion(c.curve, p).torsion) raise(ErrorCode::InvalidVariety, "listed torsion point is not torsion");
    return c;
}

// ---------------------------------------------------------------------------

struct SupplyPoint {
    CurvePoint point;
    int size = 0; // max |coefficient| on the generators
};

namespace detail {

// 0, 1, -1, 2, -2, ...
inline std::int64_t signed_key(std::int64_t x) { return x > 0 ? 2 * x - 1 : -2 * x; }

} // namespace detail

/// Affine points sum c_i P_i + t with |c_i| <= m and t torsion or zero,
/// ordered by (max |c_i|, coefficients in the order 0, 1, -1, 2, ..).
inline std::vector<SupplyPoint> point_supply(const Curve& curve, const std::vector<CurvePoint>& generators,
                                             const std::vector<CurvePoint>& torsion, int m)
{
    std::vector<std::vector<std::int64_t>> coeffs;
    std::vector<std::int64_t> c(generators.size(), -m);
    while (true) {
        coeffs.push_back(c);
        std::size_t i = c.size();
        while (i > 0 && c[i - 1] == m) c[--i] = -m;
        if (i == 0) break;
        ++c[i - 1];
    }
    auto size = [](const std::vector<std::int64_t>& v) {
        std::int64_t s = 0;
        for (auto x : v) s = std::max(s, x < 0 ? -x : x);
        return s;
    };
    std::stable_sort(coeffs.begin(), coeffs.end(), [&](const auto& x, const auto& y) {
        if (size(x) != size(y)) return size(x) < size(y);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != y[i]) return detail::signed_key(x[i]) < detail::signed_key(y[i]);
        return false;
    });
    std::vector<CurvePoint> shifts{CurvePoint()};
    shifts.insert(shifts.end(), torsion.begin(), torsion.end());
    std::vector<SupplyPoint> out;
    for (auto& v : coeffs) {
        CurvePoint p;
        for (std::size_t i = 0; i < v.size(); ++i)
            p = curve.add(p, curve.multiply(mpz_class(static_cast<long>(v[i])), generators[i]));
        for (auto& t : shifts) {
            CurvePoint q = curve.add(p, t);
            if (q.infinity) continue;
            if (std::none_of(out.begin(), out.end(), [&](const SupplyPoint& s) { return s.point == q; }))
                out.push_back({q, static_cast<int>(size(v))});
        }
    }
    return out;
}

/// Tuples of supply points lying on w, ordered by the largest component size.
inline std::vector<PowerPoint> rational_points(const Variety& w, const std::vector<SupplyPoint>& supply,
                                               std::size_t limit = SIZE_MAX)
{
    std::size_t g = w.g();
    std::vector<std::pair<int, PowerPoint>> found;
    if (supply.empty()) return {};
    std::vector<std::size_t> idx(g, 0);
    while (true) {
        PowerPoint x;
        int size = 0;
        for (auto i : idx) {
            x.components.push_back(supply[i].point);
            size = std::max(size, supply[i].size);
        }
        if (w.contains(x)) found.emplace_back(size, std::move(x));
        std::size_t i = g;
        while (i > 0 && idx[i - 1] + 1 == supply.size()) idx[--i] = 0;
        if (i == 0) break;
        ++idx[i - 1];
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<PowerPoint> out;
    for (auto& [s, x] : found) {
        if (out.size() == limit) break;
        out.push_back(std::move(x));
    }
    return out;
}

// ---------------------------------------------------------------------------

struct BasePoint {
    PowerPoint x1;
    MorphismMatrix phi1; // phi1(x1) = 0 exactly
    std::size_t k = 0;   // index in x1 of a component of maximal norm
    HeightValue zk_norm;
    MembershipRecord record;
};

inline BasePoint find_base_point(const CheckedFibration& f, double bound, double precision = 1e-8)
{
    auto supply = point_supply(f.curve, f.data.generators, f.data.torsion, f.data.supply_multiple);
    HeightEngine engine(f.curve.spec());
    std::size_t d1 = static_cast<std::size_t>(f.d1);
    for (auto& x1 : rational_points(f.v1, supply)) {
        bool all_torsion = std::all_of(x1.components.begin(), x1.components.end(),
                                       [&](const CurvePoint& p) { return is_torsion(f.curve, p).torsion; });
        if (all_torsion) continue;
        BasePoint bp;
        bp.x1 = x1;
        if (d1 == 0) {
            bp.phi1 = MorphismMatrix(0, x1.dim());
        } else {
            auto recs = search_sr(f.v1, {x1}, d1, bound);
            auto it = std::find_if(recs.begin(), recs.end(), [](const MembershipRecord& r) { return r.exact_zero; });
            if (it == recs.end() && !recs.empty()) it = recs.begin();
            if (it == recs.end()) continue;
            bp.record = *it;
            // kill the torsion image: scale by the lcm of its orders
            std::int64_t l = 1;
            for (int o : it->orders) l = std::lcm(l, static_cast<std::int64_t>(o));
            bp.phi1 = MorphismMatrix(it->certificate.rows(), it->certificate.cols(), it->certificate.order());
            for (std::size_t i = 0; i < bp.phi1.rows(); ++i)
                for (std::size_t j = 0; j < bp.phi1.cols(); ++j) bp.phi1(i, j) = it->certificate(i, j) * Endomorphism(l);
            if (!apply_morphism(f.curve, bp.phi1, x1).is_zero())
                raise(ErrorCode::VerificationFailed, "phi1 does not vanish on the base point");
        }
        double best = -1;
        for (std::size_t i = 0; i < x1.dim(); ++i) {
            auto h = seminorm(engine, PowerPoint({x1[i]}), precision);
            if (h.value() > best) {
                best = h.value();
                bp.k = i;
                bp.zk_norm = h;
            }
        }
        if (!bp.zk_norm.positive_certified()) continue;
        return bp;
    }
    raise(ErrorCode::NoBasePointFound, "no non-torsion base point in the supply at this bound");
}

// ---------------------------------------------------------------------------

struct UnboundedCertificate {
    std::string variety;
    double N = 0;
    PowerPoint point;
    std::vector<std::size_t> base, fiber;
    std::vector<std::int64_t> column; // nonzero column of phi2
    MorphismMatrix phi1, phi2, pi, phi;
    std::size_t rank = 0;
    std::size_t k = 0;
    HeightValue zk_norm;
    HeightValue norm;
    double precision = 1e-8;

    bool zero_image = false;
    bool on_variety = false;
    bool rank_ok = false;
    bool bound_ok = false;
    bool verified() const { return zero_image && on_variety && rank_ok && bound_ok; }
    double bound() const { return N * zk_norm.value(); }
};

namespace detail {

/// Rows (phi1 | 0) over (-phi2 | pi), placed in the base and fibre columns.
inline MorphismMatrix assemble(const MorphismMatrix& phi1, const MorphismMatrix& phi2, const MorphismMatrix& pi,
                               const std::vector<std::size_t>& base, const std::vector<std::size_t>& fiber)
{
    std::size_t g = base.size() + fiber.size();
    MorphismMatrix m(phi1.rows() + phi2.rows(), g, common_order(phi1.order(), phi2.order()));
    for (std::size_t i = 0; i < phi1.rows(); ++i)
        for (std::size_t j = 0; j < base.size(); ++j) m(i, base[j]) = phi1(i, j);
    for (std::size_t i = 0; i < phi2.rows(); ++i) {
        for (std::size_t j = 0; j < base.size(); ++j) m(phi1.rows() + i, base[j]) = -phi2(i, j);
        for (std::size_t j = 0; j < fiber.size(); ++j) m(phi1.rows() + i, fiber[j]) = pi(i, j);
    }
    return m;
}

/// lower(a) > N * upper(b), rounding the product upward.
inline bool exceeds(const HeightValue& a, double N, const HeightValue& b)
{
    double rhs = N * b.upper();
    rhs = std::nextafter(rhs, INFINITY);
    return !a.exact_zero && a.lower() > rhs;
}

} // namespace detail

/// Exact re-check of everything a certificate claims.
inline bool verify_certificate(const Variety& v, UnboundedCertificate& c)
{
    if (v.ambient() != Ambient::EllipticPower) raise(ErrorCode::UnsupportedMap, "certificates live on E^g");
    Curve curve(v.curve());
    c.on_variety = v.contains(c.point);
    c.rank = rank(c.phi);
    c.rank_ok = c.rank == static_cast<std::size_t>(v.dimension()) &&
                c.phi == detail::assemble(c.phi1, c.phi2, c.pi, c.base, c.fiber);
    c.zero_image = apply_morphism(curve, c.phi, c.point).is_zero();
    HeightEngine engine(curve.spec());
    c.norm = seminorm(engine, c.point, c.precision);
    c.zk_norm = seminorm(engine, PowerPoint({c.point[c.base.at(c.k)]}), c.precision);
    c.bound_ok = c.zk_norm.positive_certified() && detail::exceeds(c.norm, c.N, c.zk_norm);
    return c.verified();
}

/// For each N, `count` points y over x1 with phi2 of the smallest admissible
/// columns above N; every certificate is verified before it is returned.
inline std::vector<UnboundedCertificate> generate_unbounded(const CheckedFibration& f, const BasePoint& bp,
                                                            const std::vector<double>& Ns, std::size_t count,
                                                            double precision = 1e-8)
{
    std::size_t d2 = static_cast<std::size_t>(f.d2), g1 = f.data.base.size();
    MorphismMatrix pi = MorphismMatrix::identity(d2);
    std::vector<UnboundedCertificate> out;
    for (double N : Ns) {
        for (auto& a : module_coefficients(d2, N, count)) {
            UnboundedCertificate c;
            c.variety = f.v.name();
            c.N = N;
            c.base = f.data.base;
            c.fiber = f.data.fiber;
            c.column = a;
            c.k = bp.k;
            c.precision = precision;
            c.phi1 = bp.phi1;
            c.phi2 = MorphismMatrix(d2, g1);
            for (std::size_t i = 0; i < d2; ++i) c.phi2(i, bp.k) = Endomorphism(a[i]);
            c.pi = pi;
            c.phi = detail::assemble(c.phi1, c.phi2, c.pi, c.base, c.fiber);
            // pi(y) = phi2(x1) with pi the identity on the free fibre
            PowerPoint target = apply_morphism(f.curve, c.phi2, bp.x1);
            c.point.components.resize(f.v.g());
            for (std::size_t j = 0; j < g1; ++j) c.point[c.base[j]] = bp.x1[j];
            for (std::size_t j = 0; j < d2; ++j) c.point[c.fiber[j]] = target[j];
            if (!verify_certificate(f.v, c))
                raise(ErrorCode::VerificationFailed, "certificate at N = " + std::to_string(N) + " does not verify");
            out.push_back(std::move(c));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

/// Points of V over torsion values of a dominant coordinate projection. The
/// other coordinates are searched in the point supply; each emitted point
/// carries the projection as its S_d certificate.
inline std::vector<MembershipRecord> dense_torsion_preimage(const Variety& v, const std::vector<std::size_t>& projection,
                                                            const std::vector<CurvePoint>& torsion,
                                                            const std::vector<SupplyPoint>& supply, std::size_t count)
{
    if (v.ambient() != Ambient::EllipticPower) raise(ErrorCode::FiberSolveUnsupported, "torsion preimages need E^g");
    if (projection.size() != static_cast<std::size_t>(v.dimension()) || !is_dominant_projection(v, projection))
        raise(ErrorCode::ConfigError, "projection is not dominant on " + v.name());
    Curve curve(v.curve());
    std::size_t g = v.g(), d = projection.size();
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < g; ++i)
        if (std::find(projection.begin(), projection.end(), i) == projection.end()) rest.push_back(i);
    if (!rest.empty() && supply.empty()) raise(ErrorCode::FiberSolveUnsupported, "no supply to solve the fibres");

    MorphismMatrix cert(d, g);
    for (std::size_t i = 0; i < d; ++i) cert(i, projection[i]) = Endomorphism(1);

    std::vector<MembershipRecord> out;
    if (torsion.empty()) return out;
    std::vector<std::size_t> ti(d, 0), si(rest.size(), 0);
    auto advance = [](std::vector<std::size_t>& idx, std::size_t n) {
        std::size_t i = idx.size();
        while (i > 0 && idx[i - 1] + 1 == n) idx[--i] = 0;
        if (i == 0) return false;
        ++idx[i - 1];
        return true;
    };
    do {
        std::fill(si.begin(), si.end(), 0);
        do {
            PowerPoint x;
            x.components.resize(g);
            for (std::size_t i = 0; i < d; ++i) x[projection[i]] = torsion[ti[i]];
            for (std::size_t i = 0; i < rest.size(); ++i) x[rest[i]] = supply[si[i]].point;
            if (!v.contains(x)) continue;
            MembershipRecord rec;
            rec.point_index = out.size();
            rec.point = x;
            rec.certificate = cert;
            rec.translate = zero_tuple(g);
            rec.r = d;
            if (!verify_record(curve, rec)) raise(ErrorCode::VerificationFailed, "torsion preimage does not verify");
            PowerPoint y = apply_morphism(curve, cert, x);
            detail::torsion_tuple(curve, y, rec.orders);
            out.push_back(std::move(rec));
            if (out.size() == count) return out;
        } while (!rest.empty() && advance(si, supply.size()));
    } while (advance(ti, torsion.size()));
    return out;
}

} // namespace ellsplit
