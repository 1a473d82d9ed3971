#pragma once

// Algebraic subgroups B_phi of E^g, translates, and membership search for
// S_r(V, F) over finite samples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "curve.hpp"
#include "endo.hpp"
#include "error.hpp"
#include "heights.hpp"
#include "variety.hpp"

namespace ellsplit {

struct SubgroupSpec {
    MorphismMatrix phi;

    SubgroupSpec() = default;
    explicit SubgroupSpec(MorphismMatrix m) : phi(std::move(m))
    {
        if (rank(phi) != phi.rows()) raise(ErrorCode::NotSurjective, "subgroup matrix must have full row rank");
    }
    std::size_t codim() const { return phi.rows(); }
};

enum class TranslateKind { Torsion, Finite, Ball };

struct TranslateSet {
    TranslateKind kind = TranslateKind::Torsion;
    std::vector<PowerPoint> points; // Finite
    double epsilon = 0;             // Ball

    static TranslateSet torsion() { return {}; }
    static TranslateSet finite(std::vector<PowerPoint> pts) { return {TranslateKind::Finite, std::move(pts), 0}; }
    static TranslateSet ball(double eps) { return {TranslateKind::Ball, {}, eps}; }
};

inline std::string_view to_string(TranslateKind k)
{
    switch (k) {
    case TranslateKind::Torsion: return "torsion";
    case TranslateKind::Finite: return "finite";
    case TranslateKind::Ball: return "ball";
    }
    return "?";
}

enum class Membership { In, Out, Undecidable };

struct MembershipResult {
    Membership answer = Membership::Out;
    bool exact_zero = false;     // phi(x - f) is the zero tuple
    std::vector<int> orders;     // torsion orders of phi(x - f)
    std::ptrdiff_t translate = -1; // index into a finite F
    std::string evidence;

    bool in() const { return answer == Membership::In; }
};

namespace detail {

inline bool torsion_tuple(const Curve& curve, const PowerPoint& y, std::vector<int>& orders)
{
    orders.clear();
    for (auto& c : y.components) {
        auto t = is_torsion(curve, c);
        if (!t.torsion) return false;
        orders.push_back(t.order);
    }
    return true;
}

} // namespace detail

/// x in B_phi + F up to torsion: phi(x - f) is a torsion tuple.
inline MembershipResult membership(const Curve& curve, const PowerPoint& x, const SubgroupSpec& b, const TranslateSet& f,
                                   double precision = 1e-8)
{
    if (b.phi.cols() != x.dim()) raise(ErrorCode::DimensionMismatch, "subgroup and point dimensions differ");
    MembershipResult r;
    auto test = [&](const PowerPoint& shifted) {
        PowerPoint y = apply_morphism(curve, b.phi, shifted);
        if (!detail::torsion_tuple(curve, y, r.orders)) return false;
        r.exact_zero = y.is_zero();
        r.evidence = r.exact_zero ? "exact zero" : "torsion image";
        return true;
    };
    switch (f.kind) {
    case TranslateKind::Torsion:
        if (test(x)) r.answer = Membership::In;
        return r;
    case TranslateKind::Finite:
        for (std::size_t i = 0; i < f.points.size(); ++i) {
            if (f.points[i].dim() != x.dim()) raise(ErrorCode::DimensionMismatch, "translate has wrong dimension");
            if (test(power_sub(curve, x, f.points[i]))) {
                r.answer = Membership::In;
                r.translate = static_cast<std::ptrdiff_t>(i);
                return r;
            }
        }
        return r;
    case TranslateKind::Ball: {
        // sufficient conditions only: x in B + torsion, or x itself in O_eps
        if (test(x)) {
            r.answer = Membership::In;
            return r;
        }
        auto m = in_epsilon_ball(curve, x, EpsilonBall{f.epsilon}, precision);
        if (m == BallMembership::Inside) {
            r.answer = Membership::In;
            r.evidence = "||x|| <= epsilon";
        } else {
            r.answer = Membership::Undecidable;
            r.evidence = "undecidable-at-precision";
        }
        return r;
    }
    }
    return r;
}

// ---------------------------------------------------------------------------

struct MembershipRecord {
    std::size_t point_index = 0;
    std::size_t candidate_index = 0;
    PowerPoint point;
    MorphismMatrix certificate;
    PowerPoint translate; // all-infinity for torsion translates
    bool exact_zero = false;
    std::vector<int> orders;
    std::size_t r = 0;
};

inline PowerPoint zero_tuple(std::size_t g) { return PowerPoint(std::vector<CurvePoint>(g)); }

/// Re-checks a record with exact arithmetic: rank, and phi(point - translate) torsion.
inline bool verify_record(const Curve& curve, const MembershipRecord& rec)
{
    if (rank(rec.certificate) != rec.certificate.rows() || rec.certificate.rows() < rec.r) return false;
    PowerPoint y = apply_morphism(curve, rec.certificate, power_sub(curve, rec.point, rec.translate));
    std::vector<int> orders;
    if (!detail::torsion_tuple(curve, y, orders)) return false;
    return !rec.exact_zero || y.is_zero();
}

/// All memberships of sample points of V in B_phi + F, codim B = r, |phi| <= bound.
inline std::vector<MembershipRecord> search_sr(const Variety& v, const std::vector<PowerPoint>& sample, std::size_t r,
                                               double bound, const TranslateSet& f = TranslateSet::torsion())
{
    if (v.ambient() != Ambient::EllipticPower) raise(ErrorCode::UnsupportedMap, "S_r search needs the elliptic model");
    Curve curve(v.curve());
    for (auto& x : sample)
        if (!v.contains(x)) raise(ErrorCode::InvalidVariety, "sample point is not on " + v.name());
    std::vector<MembershipRecord> out;
    if (r == 0 || r > v.g()) return out;
    auto candidates = hermite_enumerate(r, v.g(), bound);
    for (std::size_t p = 0; p < sample.size(); ++p) {
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            auto m = membership(curve, sample[p], SubgroupSpec(candidates[c]), f);
            if (!m.in()) continue;
            MembershipRecord rec;
            rec.point_index = p;
            rec.candidate_index = c;
            rec.point = sample[p];
            rec.certificate = candidates[c];
            rec.translate = m.translate >= 0 ? f.points[static_cast<std::size_t>(m.translate)] : zero_tuple(v.g());
            rec.exact_zero = m.exact_zero;
            rec.orders = m.orders;
            rec.r = r;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

/// A record at r + 1 gives one at r by dropping a row.
inline MembershipRecord drop_row(const Curve& curve, const MembershipRecord& rec, std::size_t row)
{
    if (rec.r == 0 || row >= rec.certificate.rows()) raise(ErrorCode::DimensionMismatch, "no row to drop");
    std::vector<std::size_t> rows, cols(rec.certificate.cols());
    for (std::size_t i = 0; i < rec.certificate.rows(); ++i)
        if (i != row) rows.push_back(i);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    MembershipRecord out = rec;
    out.certificate = rec.certificate.submatrix(rows, cols);
    out.r = rec.r - 1;
    if (!verify_record(curve, out)) raise(ErrorCode::VerificationFailed, "nested record does not verify");
    return out;
}

/// Block-diagonal certificate for (x1, x2) from records of x1 and x2.
inline MembershipRecord product_record(const Curve& curve, const MembershipRecord& a, const MembershipRecord& b)
{
    std::size_t g1 = a.certificate.cols(), g2 = b.certificate.cols();
    MorphismMatrix m(a.certificate.rows() + b.certificate.rows(), g1 + g2,
                     common_order(a.certificate.order(), b.certificate.order()));
    for (std::size_t i = 0; i < a.certificate.rows(); ++i)
        for (std::size_t j = 0; j < g1; ++j) m(i, j) = a.certificate(i, j);
    for (std::size_t i = 0; i < b.certificate.rows(); ++i)
        for (std::size_t j = 0; j < g2; ++j) m(a.certificate.rows() + i, g1 + j) = b.certificate(i, j);
    auto join = [](const PowerPoint& x, const PowerPoint& y) {
        PowerPoint z = x;
        z.components.insert(z.components.end(), y.components.begin(), y.components.end());
        return z;
    };
    MembershipRecord out;
    out.point = join(a.point, b.point);
    out.translate = join(a.translate, b.translate);
    out.certificate = std::move(m);
    out.exact_zero = a.exact_zero && b.exact_zero;
    out.orders = a.orders;
    out.orders.insert(out.orders.end(), b.orders.begin(), b.orders.end());
    out.r = a.r + b.r;
    if (!verify_record(curve, out)) raise(ErrorCode::VerificationFailed, "product record does not verify");
    return out;
}

// ---------------------------------------------------------------------------

struct ModulePoint {
    std::vector<std::int64_t> coefficients;
    PowerPoint point;
};

/// Coefficient vectors a in Z^n with max |a_i| > N, first nonzero entry
/// positive, ordered by (max |a_i|, sum |a_i|, lexicographic).
inline std::vector<std::vector<std::int64_t>> module_coefficients(std::size_t n, double N, std::size_t count)
{
    if (n == 0) raise(ErrorCode::ConfigError, "n must be positive");
    std::vector<std::vector<std::int64_t>> out;
    auto m = static_cast<std::int64_t>(std::floor(std::max(N, 0.0))) + 1;
    for (; out.size() < count; ++m) {
        std::vector<std::vector<std::int64_t>> level;
        std::vector<std::int64_t> a(n, -m);
        while (true) {
            std::int64_t mx = 0;
            for (auto x : a) mx = std::max(mx, x < 0 ? -x : x);
            auto first = std::find_if(a.begin(), a.end(), [](std::int64_t x) { return x != 0; });
            if (mx == m && *first > 0) level.push_back(a);
            std::size_t i = n;
            while (i > 0 && a[i - 1] == m) a[--i] = -m;
            if (i == 0) break;
            ++a[i - 1];
        }
        auto l1 = [](const std::vector<std::int64_t>& v) {
            std::int64_t s = 0;
            for (auto x : v) s += x < 0 ? -x : x;
            return s;
        };
        // 0, 1, -1, 2, -2, ...
        auto key = [](std::int64_t x) { return x > 0 ? 2 * x - 1 : -2 * x; };
        std::stable_sort(level.begin(), level.end(), [&](const auto& x, const auto& y) {
            if (l1(x) != l1(y)) return l1(x) < l1(y);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] != y[i]) return key(x[i]) < key(y[i]);
            return false;
        });
        for (auto& v : level) {
            if (out.size() == count) break;
            out.push_back(v);
        }
    }
    return out;
}

/// Tuples (a_1 z0, .., a_n z0) with pairwise distinct a and max |a_i| > N.
inline std::vector<ModulePoint> generate_module_points(const Curve& curve, const CurvePoint& z0, std::size_t n, double N,
                                                       std::size_t count)
{
    if (is_torsion(curve, z0).torsion) raise(ErrorCode::TorsionBase, "module points need a non-torsion base point");
    std::vector<ModulePoint> out;
    for (auto& a : module_coefficients(n, N, count)) {
        ModulePoint p;
        p.coefficients = a;
        for (auto c : a) p.point.components.push_back(curve.multiply(mpz_class(static_cast<long>(c)), z0));
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace ellsplit
