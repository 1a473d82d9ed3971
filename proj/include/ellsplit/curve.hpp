#pragma once

// Weierstrass curves over Q: exact group law, End(E) action and points of E^g.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "endo.hpp"
#include "error.hpp"
#include "quad.hpp"

namespace ellsplit {

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational coefficients.
struct CurveSpec {
    mpq_class a1, a2, a3, a4, a6;

    CurveSpec() = default;
    CurveSpec(mpq_class a1_, mpq_class a2_, mpq_class a3_, mpq_class a4_, mpq_class a6_)
        : a1(std::move(a1_)), a2(std::move(a2_)), a3(std::move(a3_)), a4(std::move(a4_)), a6(std::move(a6_))
    {
        if (discriminant() == 0) raise(ErrorCode::SingularCurve, "discriminant vanishes");
    }

    mpq_class b2() const { return a1 * a1 + 4 * a2; }
    mpq_class b4() const { return 2 * a4 + a1 * a3; }
    mpq_class b6() const { return a3 * a3 + 4 * a6; }
    mpq_class b8() const { return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4; }

    mpq_class discriminant() const
    {
        mpq_class B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
        return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
    }

    bool is_integral() const
    {
        for (auto* c : {&a1, &a2, &a3, &a4, &a6})
            if (c->get_den() != 1) return false;
        return true;
    }

    /// Order acting through the special forms y^2 = x^3 + a4 x and y^2 = x^3 + a6.
    Order cm_order() const
    {
        bool short_form = a1 == 0 && a2 == 0 && a3 == 0;
        if (short_form && a6 == 0 && a4 != 0) return Order::Gaussian;
        if (short_form && a4 == 0 && a6 != 0) return Order::Eisenstein;
        return Order::Z;
    }

    friend bool operator==(const CurveSpec& x, const CurveSpec& y)
    {
        return x.a1 == y.a1 && x.a2 == y.a2 && x.a3 == y.a3 && x.a4 == y.a4 && x.a6 == y.a6;
    }
};

/// Affine point or the point at infinity, coordinates in Q or in Q(i) / Q(zeta_3).
template <class F>
struct Point {
    bool infinity = true;
    F x{};
    F y{};

    Point() = default;
    Point(F x_, F y_) : infinity(false), x(std::move(x_)), y(std::move(y_)) {}
    static Point at_infinity() { return Point(); }

    friend bool operator==(const Point& p, const Point& q)
    {
        if (p.infinity || q.infinity) return p.infinity == q.infinity;
        return p.x == q.x && p.y == q.y;
    }
    friend bool operator!=(const Point& p, const Point& q) { return !(p == q); }
    friend std::ostream& operator<<(std::ostream& os, const Point& p)
    {
        if (p.infinity) return os << "infinity";
        return os << '(' << p.x << ", " << p.y << ')';
    }
};

using CurvePoint = Point<mpq_class>;
using CMPoint = Point<QuadRational>;

namespace detail {

template <class F> struct FieldOps;

template <> struct FieldOps<mpq_class> {
    Order order = Order::Z;
    mpq_class lift(const mpq_class& v) const { return v; }
    static bool zero(const mpq_class& v) { return sgn(v) == 0; }
    static mpq_class div(const mpq_class& a, const mpq_class& b) { return a / b; }
};

template <> struct FieldOps<QuadRational> {
    Order order = Order::Z;
    QuadRational lift(const mpq_class& v) const { return QuadRational(v, mpq_class(0), order); }
    static bool zero(const QuadRational& v) { return v.is_zero(); }
    static QuadRational div(const QuadRational& a, const QuadRational& b) { return a / b; }
};

} // namespace detail

/// Group law of a curve with coordinates in F.
template <class F>
class EllipticGroup {
public:
    using P = Point<F>;

    explicit EllipticGroup(CurveSpec spec, Order field_order = Order::Z) : spec_(std::move(spec))
    {
        ops_.order = field_order;
        a1_ = ops_.lift(spec_.a1);
        a2_ = ops_.lift(spec_.a2);
        a3_ = ops_.lift(spec_.a3);
        a4_ = ops_.lift(spec_.a4);
        a6_ = ops_.lift(spec_.a6);
    }

    const CurveSpec& spec() const { return spec_; }

    bool contains(const P& p) const
    {
        if (p.infinity) return true;
        F lhs = p.y * p.y + a1_ * p.x * p.y + a3_ * p.y;
        F rhs = p.x * p.x * p.x + a2_ * p.x * p.x + a4_ * p.x + a6_;
        return lhs == rhs;
    }

    void require_on_curve(const P& p) const
    {
        if (!contains(p)) raise(ErrorCode::PointNotOnCurve, "point is not on the curve");
    }

    P negate(const P& p) const
    {
        if (p.infinity) return p;
        return P(p.x, F(F(F() - p.y) - a1_ * p.x - a3_));
    }

    P add(const P& p, const P& q) const
    {
        if (p.infinity) return q;
        if (q.infinity) return p;
        F lambda, nu;
        if (p.x == q.x) {
            F s = p.y + q.y + a1_ * q.x + a3_;
            if (detail::FieldOps<F>::zero(s)) return P();
            F den = ops_.lift(2) * p.y + a1_ * p.x + a3_;
            lambda = detail::FieldOps<F>::div(
                ops_.lift(3) * p.x * p.x + ops_.lift(2) * a2_ * p.x + a4_ - a1_ * p.y, den);
            nu = detail::FieldOps<F>::div(
                F(F() - p.x * p.x * p.x) + a4_ * p.x + ops_.lift(2) * a6_ - a3_ * p.y, den);
        } else {
            F dx = q.x - p.x;
            lambda = detail::FieldOps<F>::div(q.y - p.y, dx);
            nu = detail::FieldOps<F>::div(p.y * q.x - q.y * p.x, dx);
        }
        F x3 = lambda * lambda + a1_ * lambda - a2_ - p.x - q.x;
        F y3 = F(F() - (lambda + a1_) * x3) - nu - a3_;
        return P(x3, y3);
    }

    P sub(const P& p, const P& q) const { return add(p, negate(q)); }

    P multiply(const mpz_class& n, const P& p) const
    {
        if (n < 0) return multiply(mpz_class(-n), negate(p));
        P acc, base = p;
        for (std::size_t bit = 0, bits = mpz_sizeinbase(n.get_mpz_t(), 2); bit < bits; ++bit) {
            if (mpz_tstbit(n.get_mpz_t(), bit)) acc = add(acc, base);
            if (bit + 1 < bits) base = add(base, base);
        }
        return acc;
    }
    P multiply(std::int64_t n, const P& p) const { return multiply(mpz_class(static_cast<long>(n)), p); }

private:
    CurveSpec spec_;
    detail::FieldOps<F> ops_;
    F a1_, a2_, a3_, a4_, a6_;
};

/// Rational points on a curve over Q.
class Curve : public EllipticGroup<mpq_class> {
public:
    explicit Curve(CurveSpec spec) : EllipticGroup<mpq_class>(std::move(spec)) {}

    CurvePoint point(const mpq_class& x, const mpq_class& y) const
    {
        CurvePoint p(x, y);
        require_on_curve(p);
        return p;
    }
};

/// Image of a generator of the CM order on the special forms.
inline CMPoint cm_generator_action(const CurveSpec& spec, Order order, const CMPoint& p)
{
    if (spec.cm_order() != order || order == Order::Z)
        raise(ErrorCode::UnsupportedCMAction, "curve is not in the special form for this order");
    if (p.infinity) return p;
    QuadRational w = QuadRational::gen(order);
    if (order == Order::Gaussian) return CMPoint(-p.x, w * p.y); // [i](x, y) = (-x, i y)
    return CMPoint(w * p.x, p.y);                                // [w](x, y) = (zeta_3 x, y)
}

inline CMPoint to_cm_point(const CurvePoint& p, Order order)
{
    if (p.infinity) return CMPoint();
    return CMPoint(QuadRational(p.x, mpq_class(0), order), QuadRational(p.y, mpq_class(0), order));
}

/// (a + b w) P on a curve whose CM order matches.
inline CMPoint scalar_mul(const CurveSpec& spec, const Endomorphism& e, const CMPoint& p)
{
    Order order = e.order == Order::Z ? spec.cm_order() : e.order;
    if (e.order != Order::Z && spec.cm_order() != e.order)
        raise(ErrorCode::UnsupportedCMAction, "curve is not in the special form for this order");
    EllipticGroup<QuadRational> group(spec, order);
    group.require_on_curve(p);
    CMPoint ap = group.multiply(e.a, p);
    if (e.b == 0) return ap;
    return group.add(ap, group.multiply(e.b, cm_generator_action(spec, order, p)));
}

/// n P for rational n; a CM scalar with nonzero imaginary part needs the extension model.
inline CurvePoint scalar_mul(const Curve& curve, const Endomorphism& e, const CurvePoint& p)
{
    if (e.b != 0) raise(ErrorCode::UnsupportedCMAction, "CM scalar on a rational point; use the CM point model");
    curve.require_on_curve(p);
    return curve.multiply(e.a, p);
}

struct TorsionEvidence {
    bool torsion = false;
    int order = 0;      // when torsion
    std::string reason; // when not torsion
};

inline constexpr int kRationalTorsionBound = 16;

namespace detail {

/// Torsion points on an integral model have 4x and 8y integral.
inline bool passes_integrality_screen(const CurvePoint& p)
{
    if (p.infinity) return true;
    mpq_class x4 = 4 * p.x, y8 = 8 * p.y;
    return x4.get_den() == 1 && y8.get_den() == 1;
}

} // namespace detail

inline TorsionEvidence is_torsion(const Curve& curve, const CurvePoint& p)
{
    curve.require_on_curve(p);
    if (p.infinity) return {true, 1, {}};
    bool screen = curve.spec().is_integral();
    CurvePoint q = p;
    for (int n = 1; n <= kRationalTorsionBound; ++n) {
        if (q.infinity) return {true, n, {}};
        if (screen && !detail::passes_integrality_screen(q))
            return {false, 0, "multiple " + std::to_string(n) + "P fails the integrality screen"};
        q = curve.add(q, p);
    }
    return {false, 0, "no multiple up to 16 vanishes"};
}

/// Element of E^g.
template <class F>
struct PowerPointT {
    std::vector<Point<F>> components;

    PowerPointT() = default;
    explicit PowerPointT(std::vector<Point<F>> c) : components(std::move(c)) {}
    std::size_t dim() const { return components.size(); }
    const Point<F>& operator[](std::size_t i) const { return components[i]; }
    Point<F>& operator[](std::size_t i) { return components[i]; }
    bool is_zero() const
    {
        for (auto& c : components)
            if (!c.infinity) return false;
        return true;
    }
    friend bool operator==(const PowerPointT& x, const PowerPointT& y) { return x.components == y.components; }
    friend std::ostream& operator<<(std::ostream& os, const PowerPointT& x)
    {
        os << '(';
        for (std::size_t i = 0; i < x.dim(); ++i) os << (i ? ", " : "") << x[i];
        return os << ')';
    }
};

using PowerPoint = PowerPointT<mpq_class>;
using CMPowerPoint = PowerPointT<QuadRational>;

inline PowerPoint power_add(const Curve& curve, const PowerPoint& x, const PowerPoint& y)
{
    if (x.dim() != y.dim()) raise(ErrorCode::DimensionMismatch, "point tuples of different length");
    PowerPoint out;
    for (std::size_t i = 0; i < x.dim(); ++i) out.components.push_back(curve.add(x[i], y[i]));
    return out;
}

inline PowerPoint power_sub(const Curve& curve, const PowerPoint& x, const PowerPoint& y)
{
    if (x.dim() != y.dim()) raise(ErrorCode::DimensionMismatch, "point tuples of different length");
    PowerPoint out;
    for (std::size_t i = 0; i < x.dim(); ++i) out.components.push_back(curve.sub(x[i], y[i]));
    return out;
}

/// Componentwise sum_j m_ij x_j.
inline PowerPoint apply_morphism(const Curve& curve, const MorphismMatrix& m, const PowerPoint& x)
{
    if (m.cols() != x.dim()) raise(ErrorCode::DimensionMismatch, "matrix columns != tuple length");
    for (auto& c : x.components) curve.require_on_curve(c);
    PowerPoint out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        CurvePoint acc;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j).is_zero()) continue;
            acc = curve.add(acc, scalar_mul(curve, m(i, j), x[j]));
        }
        out.components.push_back(acc);
    }
    return out;
}

inline CMPowerPoint apply_morphism(const CurveSpec& spec, const MorphismMatrix& m, const CMPowerPoint& x)
{
    if (m.cols() != x.dim()) raise(ErrorCode::DimensionMismatch, "matrix columns != tuple length");
    Order order = m.order() == Order::Z ? spec.cm_order() : m.order();
    EllipticGroup<QuadRational> group(spec, order);
    CMPowerPoint out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        CMPoint acc;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j).is_zero()) continue;
            acc = group.add(acc, scalar_mul(spec, m(i, j), x[j]));
        }
        out.components.push_back(acc);
    }
    return out;
}

} // namespace ellsplit
