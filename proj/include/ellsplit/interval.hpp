#pragma once

// Closed real intervals with MPFR endpoints and outward rounding.

#include <algorithm>
#include <ostream>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

namespace ellsplit {

class Real {
public:
    explicit Real(mpfr_prec_t prec = 128) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }

private:
    mpfr_t v_;
};

class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 128) : lo_(prec), hi_(prec) {}

    static Interval exact(const mpz_class& z, mpfr_prec_t prec)
    {
        Interval r(prec);
        mpfr_set_z(r.lo_.get(), z.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(r.hi_.get(), z.get_mpz_t(), MPFR_RNDU);
        return r;
    }
    static Interval exact(const mpq_class& q, mpfr_prec_t prec)
    {
        Interval r(prec);
        mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static Interval exact(long v, mpfr_prec_t prec) { return exact(mpz_class(v), prec); }
    static Interval hull(double lo, double hi, mpfr_prec_t prec = 64)
    {
        Interval r(prec);
        mpfr_set_d(r.lo_.get(), lo, MPFR_RNDD);
        mpfr_set_d(r.hi_.get(), hi, MPFR_RNDU);
        return r;
    }
    static Interval log2_const(mpfr_prec_t prec)
    {
        Interval r(prec);
        mpfr_const_log2(r.lo_.get(), MPFR_RNDD);
        mpfr_const_log2(r.hi_.get(), MPFR_RNDU);
        return r;
    }

    mpfr_prec_t prec() const { return lo_.prec(); }
    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }
    Real& lo() { return lo_; }
    Real& hi() { return hi_; }

    double lower() const { return lo_.to_double(MPFR_RNDD); }
    double upper() const { return hi_.to_double(MPFR_RNDU); }
    double mid() const
    {
        Real m(prec() + 1);
        mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
        return m.to_double();
    }
    /// Upper bound on half the width.
    double radius() const
    {
        Real w(prec());
        mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
        mpfr_div_2ui(w.get(), w.get(), 1, MPFR_RNDU);
        return w.to_double(MPFR_RNDU);
    }
    bool is_point() const { return mpfr_equal_p(lo_.get(), hi_.get()); }
    bool contains_zero() const { return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0; }
    bool positive() const { return mpfr_sgn(lo_.get()) > 0; }

    friend Interval operator+(const Interval& x, const Interval& y)
    {
        Interval r(std::max(x.prec(), y.prec()));
        mpfr_add(r.lo_.get(), x.lo_.get(), y.lo_.get(), MPFR_RNDD);
        mpfr_add(r.hi_.get(), x.hi_.get(), y.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator-(const Interval& x, const Interval& y)
    {
        Interval r(std::max(x.prec(), y.prec()));
        mpfr_sub(r.lo_.get(), x.lo_.get(), y.hi_.get(), MPFR_RNDD);
        mpfr_sub(r.hi_.get(), x.hi_.get(), y.lo_.get(), MPFR_RNDU);
        return r;
    }
    Interval operator-() const
    {
        Interval r(prec());
        mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
        mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator*(const Interval& x, const Interval& y)
    {
        mpfr_prec_t p = std::max(x.prec(), y.prec());
        Interval r(p);
        Real t(p);
        bool first = true;
        for (auto* a : {&x.lo_, &x.hi_})
            for (auto* b : {&y.lo_, &y.hi_}) {
                mpfr_mul(t.get(), a->get(), b->get(), MPFR_RNDD);
                if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
                mpfr_mul(t.get(), a->get(), b->get(), MPFR_RNDU);
                if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
                first = false;
            }
        return r;
    }
    /// Multiplication by 2^e, exact.
    Interval ldexp(long e) const
    {
        Interval r(*this);
        mpfr_mul_2si(r.lo_.get(), lo_.get(), e, MPFR_RNDD);
        mpfr_mul_2si(r.hi_.get(), hi_.get(), e, MPFR_RNDU);
        return r;
    }
    /// Division by a positive integer.
    Interval div(unsigned long d) const
    {
        Interval r(prec());
        mpfr_div_ui(r.lo_.get(), lo_.get(), d, MPFR_RNDD);
        mpfr_div_ui(r.hi_.get(), hi_.get(), d, MPFR_RNDU);
        return r;
    }
    Interval abs() const
    {
        if (mpfr_sgn(lo_.get()) >= 0) return *this;
        if (mpfr_sgn(hi_.get()) <= 0) return -*this;
        Interval r(prec());
        mpfr_set_zero(r.lo_.get(), 1);
        if (mpfr_cmpabs(lo_.get(), hi_.get()) > 0)
            mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
        else
            mpfr_set(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }
    /// Natural logarithm; requires a positive lower endpoint.
    Interval log() const
    {
        Interval r(prec());
        mpfr_log(r.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_log(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }
    /// Square root of the nonnegative part.
    Interval sqrt() const
    {
        Interval r(prec());
        if (mpfr_sgn(lo_.get()) <= 0)
            mpfr_set_zero(r.lo_.get(), 1);
        else
            mpfr_sqrt(r.lo_.get(), lo_.get(), MPFR_RNDD);
        if (mpfr_sgn(hi_.get()) <= 0)
            mpfr_set_zero(r.hi_.get(), 1);
        else
            mpfr_sqrt(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }
    /// Componentwise maximum; encloses max(a, b) for a in x, b in y.
    static Interval max(const Interval& x, const Interval& y)
    {
        Interval r(std::max(x.prec(), y.prec()));
        mpfr_max(r.lo_.get(), x.lo_.get(), y.lo_.get(), MPFR_RNDD);
        mpfr_max(r.hi_.get(), x.hi_.get(), y.hi_.get(), MPFR_RNDU);
        return r;
    }
    /// Intersection; empty intersections return false.
    static bool intersect(const Interval& x, const Interval& y, Interval* out = nullptr)
    {
        if (mpfr_greater_p(x.lo_.get(), y.hi_.get()) || mpfr_greater_p(y.lo_.get(), x.hi_.get())) return false;
        if (out) {
            Interval r(std::max(x.prec(), y.prec()));
            mpfr_max(r.lo_.get(), x.lo_.get(), y.lo_.get(), MPFR_RNDD);
            mpfr_min(r.hi_.get(), x.hi_.get(), y.hi_.get(), MPFR_RNDU);
            *out = r;
        }
        return true;
    }
    /// True when every element of x is strictly below every element of y.
    static bool certainly_less(const Interval& x, const Interval& y) { return mpfr_less_p(x.hi_.get(), y.lo_.get()); }
    /// Binary exponent of the larger endpoint magnitude (0 for the zero interval).
    long magnitude_exponent() const
    {
        const Real& big = mpfr_cmpabs(lo_.get(), hi_.get()) > 0 ? lo_ : hi_;
        if (mpfr_zero_p(big.get())) return 0;
        return mpfr_get_exp(big.get());
    }

    friend std::ostream& operator<<(std::ostream& os, const Interval& x)
    {
        return os << '[' << x.lower() << ", " << x.upper() << ']';
    }

private:
    Real lo_;
    Real hi_;
};

} // namespace ellsplit
