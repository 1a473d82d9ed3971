#pragma once

// Elements a + b*w of Z, Z[i] or Z[zeta_3] and of their fraction fields.

#include <cstdint>
#include <cstdlib>
#include <compare>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "error.hpp"

namespace ellsplit {

/// The endomorphism rings supported: Z (no CM), Z[i] (disc -4), Z[w] with w = exp(2 pi i/3) (disc -3).
enum class Order { Z, Gaussian, Eisenstein };

inline int discriminant(Order o)
{
    switch (o) {
    case Order::Z: return 1;
    case Order::Gaussian: return -4;
    case Order::Eisenstein: return -3;
    }
    return 1;
}

inline Order order_from_discriminant(long disc)
{
    if (disc == 1 || disc == 0) return Order::Z;
    if (disc == -4) return Order::Gaussian;
    if (disc == -3) return Order::Eisenstein;
    raise(ErrorCode::ConfigError, "unsupported CM discriminant " + std::to_string(disc));
}

/// w^2 = trace*w - norm for the generator w of the order.
inline int gen_trace(Order o) { return o == Order::Eisenstein ? -1 : 0; }
inline int gen_norm(Order o) { return o == Order::Z ? 0 : 1; }

inline Order common_order(Order x, Order y)
{
    if (x == Order::Z) return y;
    if (y == Order::Z || x == y) return x;
    raise(ErrorCode::DimensionMismatch, "mixing scalars from different CM orders");
}

namespace detail {

inline std::int64_t add(std::int64_t x, std::int64_t y)
{
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r)) raise(ErrorCode::Overflow, "int64 addition");
    return r;
}
inline std::int64_t sub(std::int64_t x, std::int64_t y)
{
    std::int64_t r;
    if (__builtin_sub_overflow(x, y, &r)) raise(ErrorCode::Overflow, "int64 subtraction");
    return r;
}
inline std::int64_t mul(std::int64_t x, std::int64_t y)
{
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r)) raise(ErrorCode::Overflow, "int64 multiplication");
    return r;
}
template <class T> T add(const T& x, const T& y) { return T(x + y); }
template <class T> T sub(const T& x, const T& y) { return T(x - y); }
template <class T> T mul(const T& x, const T& y) { return T(x * y); }

inline bool is_zero(std::int64_t x) { return x == 0; }
inline bool is_zero(const mpz_class& x) { return sgn(x) == 0; }
inline bool is_zero(const mpq_class& x) { return sgn(x) == 0; }

/// Nearest integer to num/den (den > 0), halves rounded up.
inline std::int64_t round_div(std::int64_t num, std::int64_t den)
{
    mpz_class n(static_cast<long>(num)), d(static_cast<long>(den)), q;
    n = 2 * n + d;
    d = 2 * d;
    mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    if (!q.fits_slong_p()) raise(ErrorCode::Overflow, "rounded quotient");
    return q.get_si();
}

} // namespace detail

template <class T>
struct QuadElem {
    T a{};
    T b{};
    Order order = Order::Z;

    QuadElem() = default;
    QuadElem(T a_, T b_ = T(0), Order o = Order::Z) : a(std::move(a_)), b(std::move(b_)), order(o)
    {
        if (order == Order::Z && !detail::is_zero(b))
            raise(ErrorCode::ConfigError, "a rational-integer scalar must have b = 0");
    }

    static QuadElem gen(Order o) { return QuadElem(T(0), T(1), o); }

    bool is_zero() const { return detail::is_zero(a) && detail::is_zero(b); }

    QuadElem operator-() const { return QuadElem(detail::sub(T(0), a), detail::sub(T(0), b), order); }

    QuadElem conj() const
    {
        // conj(w) = trace - w
        T t(gen_trace(order));
        return QuadElem(detail::add(a, detail::mul(b, t)), detail::sub(T(0), b), order);
    }

    /// Squared absolute value |x|^2 = a^2 + t*a*b + n*b^2.
    T norm2() const
    {
        T t(gen_trace(order)), n(gen_norm(order));
        return detail::add(detail::add(detail::mul(a, a), detail::mul(detail::mul(t, a), b)),
                           detail::mul(detail::mul(n, b), b));
    }

    friend QuadElem operator+(const QuadElem& x, const QuadElem& y)
    {
        return QuadElem(detail::add(x.a, y.a), detail::add(x.b, y.b), common_order(x.order, y.order));
    }
    friend QuadElem operator-(const QuadElem& x, const QuadElem& y)
    {
        return QuadElem(detail::sub(x.a, y.a), detail::sub(x.b, y.b), common_order(x.order, y.order));
    }
    friend QuadElem operator*(const QuadElem& x, const QuadElem& y)
    {
        Order o = common_order(x.order, y.order);
        T t(gen_trace(o)), n(gen_norm(o));
        T bd = detail::mul(x.b, y.b);
        T re = detail::sub(detail::mul(x.a, y.a), detail::mul(n, bd));
        T im = detail::add(detail::add(detail::mul(x.a, y.b), detail::mul(x.b, y.a)), detail::mul(t, bd));
        return QuadElem(re, im, o);
    }
    QuadElem& operator+=(const QuadElem& y) { return *this = *this + y; }
    QuadElem& operator-=(const QuadElem& y) { return *this = *this - y; }
    QuadElem& operator*=(const QuadElem& y) { return *this = *this * y; }

    friend bool operator==(const QuadElem& x, const QuadElem& y)
    {
        return x.a == y.a && x.b == y.b;
    }
    friend bool operator!=(const QuadElem& x, const QuadElem& y) { return !(x == y); }

    friend std::ostream& operator<<(std::ostream& os, const QuadElem& x)
    {
        if (x.order == Order::Z || detail::is_zero(x.b)) return os << x.a;
        os << x.a << (x.b < 0 ? "-" : "+");
        T ab = x.b < 0 ? T(detail::sub(T(0), x.b)) : x.b;
        return os << ab << (x.order == Order::Gaussian ? "i" : "w");
    }
};

/// Ring scalar of End(E).
using Endomorphism = QuadElem<std::int64_t>;
/// Element of the fraction field of End(E), also used for coordinates in Q(i) / Q(zeta_3).
using QuadRational = QuadElem<mpq_class>;

inline QuadRational to_field(const Endomorphism& e)
{
    return QuadRational(mpq_class(static_cast<long>(e.a)), mpq_class(static_cast<long>(e.b)), e.order);
}

inline QuadRational inverse(const QuadRational& x)
{
    if (x.is_zero()) raise(ErrorCode::RankDeficient, "division by zero in fraction field");
    mpq_class n = x.norm2();
    QuadRational c = x.conj();
    return QuadRational(mpq_class(c.a / n), mpq_class(c.b / n), x.order);
}

inline QuadRational operator/(const QuadRational& x, const QuadRational& y) { return x * inverse(y); }

/// Units of the order: +-1, +-i, or the six powers of -w.
inline std::vector<Endomorphism> units(Order o)
{
    switch (o) {
    case Order::Z: return {Endomorphism(1), Endomorphism(-1)};
    case Order::Gaussian:
        return {Endomorphism(1, 0, o), Endomorphism(-1, 0, o), Endomorphism(0, 1, o), Endomorphism(0, -1, o)};
    case Order::Eisenstein:
        // w^2 = -1 - w
        return {Endomorphism(1, 0, o), Endomorphism(-1, 0, o), Endomorphism(0, 1, o),
                Endomorphism(0, -1, o), Endomorphism(-1, -1, o), Endomorphism(1, 1, o)};
    }
    return {};
}

/// Euclidean quotient: nearest lattice point to x / y.
inline Endomorphism euclid_quotient(const Endomorphism& x, const Endomorphism& y)
{
    Order o = common_order(x.order, y.order);
    Endomorphism num = x * y.conj();
    std::int64_t n = y.norm2();
    return Endomorphism(detail::round_div(num.a, n), o == Order::Z ? 0 : detail::round_div(num.b, n), o);
}

} // namespace ellsplit
