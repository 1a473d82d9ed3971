#pragma once

// Weil and canonical heights on E(Q), the semi-norm on E^g and epsilon balls.
//
// Normalization: h(p/q) = log max(|p|, |q|) and hhat(P) = lim 4^-n h(x(2^n P)).
// Both evaluation paths iterate the x-only duplication map (X : Z) -> (F : G)
// on an integral model and bound the unseen tail with constants derived from
// the resultant R = Res(F, G) and Bezout identities A F + B G = R Z^7,
// A' F + B' G = R X^7:
//
//   -log C <= h(x(2Q)) - 4 h(x(Q)) <= log max(|F|_1, |G|_1)
//
// where C bounds |A|_1 + |B|_1. The doubling path works with exact integers;
// the local path splits the height into an archimedean part (MPFR intervals
// with power-of-two rescaling) and a non-archimedean part (gcd defects
// computed modulo powers of R).

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "curve.hpp"
#include "error.hpp"
#include "interval.hpp"

namespace ellsplit {

enum class HeightMethod { Doubling, Local, Both };

inline HeightMethod height_method_from_string(const std::string& s)
{
    if (s == "doubling") return HeightMethod::Doubling;
    if (s == "local") return HeightMethod::Local;
    if (s == "both") return HeightMethod::Both;
    raise(ErrorCode::ConfigError, "unknown height method '" + s + "'");
}

/// Certified enclosure of a nonnegative real.
struct HeightValue {
    Interval enclosure{64};
    bool exact_zero = false;

    static HeightValue zero()
    {
        HeightValue v;
        v.enclosure = Interval::exact(0L, 64);
        v.exact_zero = true;
        return v;
    }
    double value() const { return exact_zero ? 0.0 : enclosure.mid(); }
    double radius() const { return exact_zero ? 0.0 : enclosure.radius(); }
    double lower() const { return enclosure.lower(); }
    double upper() const { return enclosure.upper(); }
    bool positive_certified() const { return !exact_zero && enclosure.positive(); }
};

struct HeightConfig {
    /// Largest coordinate size (bits) the exact doubling path may reach.
    std::size_t max_coordinate_bits = std::size_t{1} << 27;
    mpfr_prec_t working_precision = 128;
    int max_attempts = 6;
};

namespace detail {

/// Exact solve of a square rational system; the matrix must be invertible.
inline std::vector<mpq_class> solve_rational(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> b)
{
    std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) raise(ErrorCode::SingularCurve, "duplication forms share a root");
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            mpq_class f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    std::vector<mpq_class> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

inline mpq_class det_rational(std::vector<std::vector<mpq_class>> a)
{
    std::size_t n = a.size();
    mpq_class det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            mpq_class f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

} // namespace detail

/// Per-curve data shared by both height paths.
class HeightEngine {
public:
    explicit HeightEngine(const CurveSpec& spec, HeightConfig config = {}) : curve_(spec), config_(config)
    {
        // integral model x' = u^2 x, y' = u^3 y with u the lcm of all denominators
        mpz_class u = 1;
        for (auto* c : {&spec.a1, &spec.a2, &spec.a3, &spec.a4, &spec.a6})
            mpz_lcm(u.get_mpz_t(), u.get_mpz_t(), c->get_den_mpz_t());
        scale_ = u;
        mpz_class u2 = u * u;
        CurveSpec integral(spec.a1 * u, spec.a2 * u2, spec.a3 * u2 * u, spec.a4 * u2 * u2, spec.a6 * u2 * u2 * u2);
        auto as_int = [](const mpq_class& q) { return mpz_class(q); };
        mpz_class b2 = as_int(integral.b2()), b4 = as_int(integral.b4()), b6 = as_int(integral.b6()),
                  b8 = as_int(integral.b8());
        // coefficients of X^(4-j) Z^j
        f_ = {1, 0, -b4, -2 * b6, -b8};
        g_ = {0, 4, b2, 2 * b4, b6};

        // Bezout map (A, B) -> A F + B G on cubic forms, an 8 x 8 Sylvester matrix
        std::vector<std::vector<mpq_class>> s(8, std::vector<mpq_class>(8, 0));
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 5; ++j) {
                s[i + j][i] += mpq_class(f_[j]);
                s[i + j][4 + i] += mpq_class(g_[j]);
            }
        mpq_class r = detail::det_rational(s);
        if (r == 0) raise(ErrorCode::SingularCurve, "zero resultant");
        resultant_ = abs(mpz_class(r));
        mpz_class bezout_norm = 0;
        for (std::size_t target : {std::size_t{7}, std::size_t{0}}) {
            std::vector<mpq_class> rhs(8, 0);
            rhs[target] = mpq_class(resultant_);
            auto c = detail::solve_rational(s, rhs);
            mpz_class norm = 0;
            for (auto& v : c) {
                if (v.get_den() != 1) raise(ErrorCode::VerificationFailed, "non-integral Bezout coefficient");
                norm += abs(v.get_num());
            }
            if (norm > bezout_norm) bezout_norm = norm;
        }
        bezout_norm_ = bezout_norm;
        mpz_class nf = 0, ng = 0;
        for (auto& c : f_) nf += abs(c);
        for (auto& c : g_) ng += abs(c);
        form_norm_ = nf > ng ? nf : ng;
    }

    const Curve& curve() const { return curve_; }
    const mpz_class& resultant() const { return resultant_; }
    const mpz_class& bezout_norm() const { return bezout_norm_; }

    /// Per-step bounds on h(x(2Q)) - 4 h(x(Q)) for reduced coordinates.
    Interval step_bounds(mpfr_prec_t prec) const
    {
        Interval lo = Interval::exact(bezout_norm_, prec).log();
        Interval hi = Interval::exact(form_norm_, prec).log();
        Interval r(prec);
        mpfr_neg(r.lo().get(), lo.hi().get(), MPFR_RNDD);
        mpfr_set(r.hi().get(), hi.hi().get(), MPFR_RNDU);
        return r;
    }

    /// Per-step bounds on log max(|F|, |G|) - 4 log max(|X|, |Z|) for real (X, Z).
    Interval archimedean_step_bounds(mpfr_prec_t prec) const
    {
        Interval lo = Interval::exact(resultant_, prec).log() - Interval::exact(bezout_norm_, prec).log();
        Interval hi = Interval::exact(form_norm_, prec).log();
        Interval r(prec);
        mpfr_set(r.lo().get(), lo.lo().get(), MPFR_RNDD);
        mpfr_set(r.hi().get(), hi.hi().get(), MPFR_RNDU);
        return r;
    }

    HeightValue canonical(const CurvePoint& p, double precision, HeightMethod method = HeightMethod::Local) const
    {
        if (!(precision > 0)) raise(ErrorCode::ConfigError, "precision must be positive");
        curve_.require_on_curve(p);
        if (p.infinity || is_torsion(curve_, p).torsion) return HeightValue::zero();
        switch (method) {
        case HeightMethod::Doubling: return doubling(p, precision);
        case HeightMethod::Local: return local(p, precision);
        case HeightMethod::Both: {
            HeightValue a = doubling(p, precision), b = local(p, precision);
            HeightValue out;
            if (!Interval::intersect(a.enclosure, b.enclosure, &out.enclosure))
                raise(ErrorCode::VerificationFailed, "doubling and local heights disagree");
            return out;
        }
        }
        return HeightValue::zero();
    }

    /// Limit of 4^-K h(x(2^K P)) with exact integer doubling.
    HeightValue doubling(const CurvePoint& p, double precision) const
    {
        auto [x0, z0] = start_pair(p);
        for (int attempt = 0, steps = steps_for(precision); attempt < config_.max_attempts; ++attempt, ++steps) {
            mpfr_prec_t prec = config_.working_precision;
            mpz_class x = x0, z = z0;
            for (int k = 0; k < steps; ++k) {
                if (4 * std::max(mpz_sizeinbase(x.get_mpz_t(), 2), mpz_sizeinbase(z.get_mpz_t(), 2))
                    > config_.max_coordinate_bits)
                    raise(ErrorCode::PrecisionUnreachable,
                          "exact doubling exceeds " + std::to_string(config_.max_coordinate_bits) + " bits");
                auto [fx, gz] = duplicate(x, z);
                mpz_class g = defect(fx, gz);
                if (g != 1) {
                    mpz_divexact(fx.get_mpz_t(), fx.get_mpz_t(), g.get_mpz_t());
                    mpz_divexact(gz.get_mpz_t(), gz.get_mpz_t(), g.get_mpz_t());
                }
                x = std::move(fx);
                z = std::move(gz);
            }
            mpz_class big = abs(x) > abs(z) ? mpz_class(abs(x)) : mpz_class(abs(z));
            Interval h = Interval::exact(big, prec).log();
            HeightValue v;
            v.enclosure = clamp_nonnegative((h + step_bounds(prec).div(3)).ldexp(-2L * steps));
            if (v.radius() <= precision) return v;
        }
        raise(ErrorCode::PrecisionUnreachable, "doubling path could not reach the requested radius");
    }

    /// Archimedean contribution minus gcd defects, both truncated after K doublings.
    HeightValue local(const CurvePoint& p, double precision) const
    {
        auto [x0, z0] = start_pair(p);
        int steps = steps_for(precision);
        mpfr_prec_t prec = config_.working_precision + 4 * steps;
        for (int attempt = 0; attempt < config_.max_attempts; ++attempt, ++steps, prec *= 2) {
            // archimedean part with power-of-two rescaling
            Interval ux = Interval::exact(x0, prec), uz = Interval::exact(z0, prec);
            mpq_class exponent_sum = 0; // sum_j e_j 4^-j
            mpz_class weight = 1;       // 4^j
            bool ok = true;
            auto rescale = [&](Interval& a, Interval& b) {
                long e = std::max(a.magnitude_exponent(), b.magnitude_exponent());
                a = a.ldexp(-e);
                b = b.ldexp(-e);
                exponent_sum += mpq_class(e, 1) / mpq_class(weight);
            };
            rescale(ux, uz);
            for (int k = 0; k < steps; ++k) {
                auto [fx, gz] = duplicate_interval(ux, uz);
                ux = std::move(fx);
                uz = std::move(gz);
                weight *= 4;
                rescale(ux, uz);
            }
            Interval norm = Interval::max(ux.abs(), uz.abs());
            if (!norm.positive()) {
                ok = false;
            }
            if (ok) {
                Interval arch = Interval::exact(exponent_sum, prec) * Interval::log2_const(prec)
                                + norm.log().ldexp(-2L * steps);
                Interval non_arch = gcd_defects(x0, z0, steps, prec);
                HeightValue v;
                v.enclosure =
                    clamp_nonnegative(arch - non_arch + archimedean_step_bounds(prec).div(3).ldexp(-2L * steps));
                if (v.radius() <= precision) return v;
            }
        }
        raise(ErrorCode::PrecisionUnreachable, "local path could not reach the requested radius");
    }

private:
    std::pair<mpz_class, mpz_class> start_pair(const CurvePoint& p) const
    {
        mpq_class x = p.x * scale_ * scale_;
        return {x.get_num(), x.get_den()};
    }

    /// Number of doublings so that the tail enclosure alone has radius below 0.9 precision.
    int steps_for(double precision) const
    {
        Interval b = step_bounds(64);
        double width = b.upper() - b.lower();
        int k = 0;
        while (width / 3.0 * std::ldexp(1.0, -2 * k) / 2.0 > 0.9 * precision && k < 200) ++k;
        return k;
    }

    std::pair<mpz_class, mpz_class> duplicate(const mpz_class& x, const mpz_class& z) const
    {
        mpz_class x2 = x * x, z2 = z * z, xz = x * z;
        mpz_class x2z2 = x2 * z2, xz3 = xz * z2, z4 = z2 * z2;
        mpz_class f = x2 * x2 + f_[2] * x2z2 + f_[3] * xz3 + f_[4] * z4;
        mpz_class g = g_[1] * x2 * xz + g_[2] * x2z2 + g_[3] * xz3 + g_[4] * z4;
        return {f, g};
    }

    std::pair<Interval, Interval> duplicate_interval(const Interval& x, const Interval& z) const
    {
        mpfr_prec_t prec = x.prec();
        Interval x2 = x * x, z2 = z * z, xz = x * z;
        Interval x2z2 = x2 * z2, xz3 = xz * z2, z4 = z2 * z2, x3z = x2 * xz;
        auto c = [&](const mpz_class& v) { return Interval::exact(v, prec); };
        Interval f = x2 * x2 + c(f_[2]) * x2z2 + c(f_[3]) * xz3 + c(f_[4]) * z4;
        Interval g = c(g_[1]) * x3z + c(g_[2]) * x2z2 + c(g_[3]) * xz3 + c(g_[4]) * z4;
        return {f, g};
    }

    /// gcd(F, G) for coprime inputs; it divides the resultant.
    mpz_class defect(const mpz_class& f, const mpz_class& g) const
    {
        mpz_class fr, gr, d;
        mpz_mod(fr.get_mpz_t(), f.get_mpz_t(), resultant_.get_mpz_t());
        mpz_mod(gr.get_mpz_t(), g.get_mpz_t(), resultant_.get_mpz_t());
        mpz_gcd(d.get_mpz_t(), fr.get_mpz_t(), gr.get_mpz_t());
        mpz_gcd(d.get_mpz_t(), d.get_mpz_t(), resultant_.get_mpz_t());
        return d;
    }

    /// sum_{k<K} 4^-(k+1) log g_k plus the enclosure [0, log R / (3 4^K)] of the rest.
    Interval gcd_defects(const mpz_class& x0, const mpz_class& z0, int steps, mpfr_prec_t prec) const
    {
        mpz_class modulus;
        mpz_pow_ui(modulus.get_mpz_t(), resultant_.get_mpz_t(), static_cast<unsigned long>(steps + 1));
        mpz_class x, z;
        mpz_mod(x.get_mpz_t(), x0.get_mpz_t(), modulus.get_mpz_t());
        mpz_mod(z.get_mpz_t(), z0.get_mpz_t(), modulus.get_mpz_t());
        Interval sum = Interval::exact(0L, prec);
        for (int k = 0; k < steps; ++k) {
            auto [f, g] = duplicate(x, z);
            mpz_mod(f.get_mpz_t(), f.get_mpz_t(), modulus.get_mpz_t());
            mpz_mod(g.get_mpz_t(), g.get_mpz_t(), modulus.get_mpz_t());
            mpz_class d = defect(f, g);
            if (d != 1) {
                sum = sum + Interval::exact(d, prec).log().ldexp(-2L * (k + 1));
                mpz_divexact(modulus.get_mpz_t(), modulus.get_mpz_t(), d.get_mpz_t());
                mpz_divexact(f.get_mpz_t(), f.get_mpz_t(), d.get_mpz_t());
                mpz_divexact(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
                mpz_mod(f.get_mpz_t(), f.get_mpz_t(), modulus.get_mpz_t());
                mpz_mod(g.get_mpz_t(), g.get_mpz_t(), modulus.get_mpz_t());
            }
            x = std::move(f);
            z = std::move(g);
        }
        Interval tail(prec);
        mpfr_set_zero(tail.lo().get(), 1);
        Interval log_r = Interval::exact(resultant_, prec).log().div(3).ldexp(-2L * steps);
        mpfr_set(tail.hi().get(), log_r.hi().get(), MPFR_RNDU);
        return sum + tail;
    }

    static Interval clamp_nonnegative(Interval v)
    {
        if (mpfr_sgn(v.lo().get()) < 0) mpfr_set_zero(v.lo().get(), 1);
        if (mpfr_sgn(v.hi().get()) < 0) mpfr_set_zero(v.hi().get(), 1);
        return v;
    }

    Curve curve_;
    HeightConfig config_;
    mpz_class scale_ = 1;
    std::array<mpz_class, 5> f_;
    std::array<mpz_class, 5> g_;
    mpz_class resultant_;
    mpz_class bezout_norm_;
    mpz_class form_norm_;
};

inline HeightValue naive_height(const Curve& curve, const CurvePoint& p)
{
    curve.require_on_curve(p);
    if (p.infinity) return HeightValue::zero();
    mpz_class big = abs(p.x.get_num());
    if (p.x.get_den() > big) big = p.x.get_den();
    if (big == 1) return HeightValue::zero();
    HeightValue v;
    v.enclosure = Interval::exact(big, 128).log();
    return v;
}

inline HeightValue canonical_height(const Curve& curve, const CurvePoint& p, double precision,
                                    HeightMethod method = HeightMethod::Local)
{
    return HeightEngine(curve.spec()).canonical(p, precision, method);
}

/// max_i hhat(x_i)^(1/2).
inline HeightValue seminorm(const HeightEngine& engine, const PowerPoint& x, double precision,
                            HeightMethod method = HeightMethod::Local)
{
    HeightValue out = HeightValue::zero();
    for (auto& c : x.components) {
        HeightValue h = engine.canonical(c, precision, method);
        if (h.exact_zero) continue;
        HeightValue r;
        r.enclosure = h.enclosure.sqrt();
        if (out.exact_zero)
            out = r;
        else
            out.enclosure = Interval::max(out.enclosure, r.enclosure);
    }
    return out;
}

inline HeightValue seminorm(const Curve& curve, const PowerPoint& x, double precision,
                            HeightMethod method = HeightMethod::Local)
{
    return seminorm(HeightEngine(curve.spec()), x, precision, method);
}

enum class BallMembership { Inside, Outside, Undecidable };

inline std::string_view to_string(BallMembership m)
{
    switch (m) {
    case BallMembership::Inside: return "true";
    case BallMembership::Outside: return "false";
    case BallMembership::Undecidable: return "undecidable-at-precision";
    }
    return "?";
}

struct EpsilonBall {
    double epsilon = 0.0;
};

/// Decides ||x|| <= epsilon from the certified enclosure of ||x||.
inline BallMembership in_epsilon_ball(const HeightValue& norm, const EpsilonBall& ball)
{
    if (norm.exact_zero) return ball.epsilon >= 0 ? BallMembership::Inside : BallMembership::Outside;
    Interval eps = Interval::hull(ball.epsilon, ball.epsilon);
    if (mpfr_lessequal_p(norm.enclosure.hi().get(), eps.lo().get())) return BallMembership::Inside;
    if (mpfr_greater_p(norm.enclosure.lo().get(), eps.hi().get())) return BallMembership::Outside;
    return BallMembership::Undecidable;
}

inline BallMembership in_epsilon_ball(const Curve& curve, const PowerPoint& x, const EpsilonBall& ball,
                                      double precision = 1e-8)
{
    return in_epsilon_ball(seminorm(curve, x, precision), ball);
}

} // namespace ellsplit
