#pragma once

// Sparse multivariate polynomials over the rationals with block graded
// reverse lexicographic orders, plus a small text parser.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "error.hpp"

namespace ellsplit {

constexpr std::size_t kMaxVariables = 32;

struct Monomial {
    std::array<std::uint16_t, kMaxVariables> e{};

    std::uint32_t degree(std::size_t first = 0, std::size_t last = kMaxVariables) const
    {
        std::uint32_t d = 0;
        for (std::size_t i = first; i < last; ++i) d += e[i];
        return d;
    }
    bool is_one() const { return degree() == 0; }
    bool divides(const Monomial& o) const
    {
        for (std::size_t i = 0; i < kMaxVariables; ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }
    bool coprime(const Monomial& o) const
    {
        for (std::size_t i = 0; i < kMaxVariables; ++i)
            if (e[i] && o.e[i]) return false;
        return true;
    }
    /// Variables present, as a bit mask.
    std::uint32_t support() const
    {
        std::uint32_t s = 0;
        for (std::size_t i = 0; i < kMaxVariables; ++i)
            if (e[i]) s |= 1u << i;
        return s;
    }

    friend Monomial lcm(const Monomial& a, const Monomial& b)
    {
        Monomial r;
        for (std::size_t i = 0; i < kMaxVariables; ++i) r.e[i] = std::max(a.e[i], b.e[i]);
        return r;
    }
    /// a / b; caller guarantees divisibility.
    friend Monomial operator/(const Monomial& a, const Monomial& b)
    {
        Monomial r;
        for (std::size_t i = 0; i < kMaxVariables; ++i) r.e[i] = static_cast<std::uint16_t>(a.e[i] - b.e[i]);
        return r;
    }
    friend Monomial operator*(const Monomial& a, const Monomial& b)
    {
        Monomial r;
        for (std::size_t i = 0; i < kMaxVariables; ++i) {
            std::uint32_t s = std::uint32_t(a.e[i]) + b.e[i];
            if (s > 0xffff) raise(ErrorCode::Overflow, "monomial exponent overflow");
            r.e[i] = static_cast<std::uint16_t>(s);
        }
        return r;
    }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
};

/// Product of monomial orders on consecutive variable blocks, each graded
/// reverse lexicographic or pure lexicographic. A single grevlex block is plain
/// grevlex; two blocks give an elimination order for the first block.
class MonomialOrder {
public:
    MonomialOrder() = default;
    explicit MonomialOrder(std::vector<std::size_t> block_ends, std::vector<bool> lex = {})
        : ends_(std::move(block_ends)), lex_(std::move(lex))
    {
        lex_.resize(ends_.size(), false);
    }

    static std::shared_ptr<const MonomialOrder> grevlex(std::size_t n)
    {
        return std::make_shared<MonomialOrder>(std::vector<std::size_t>{n});
    }
    static std::shared_ptr<const MonomialOrder> lex(std::size_t n)
    {
        return std::make_shared<MonomialOrder>(std::vector<std::size_t>{n}, std::vector<bool>{true});
    }
    static std::shared_ptr<const MonomialOrder> elimination(std::size_t eliminated, std::size_t n)
    {
        if (eliminated == 0 || eliminated == n) return grevlex(n);
        return std::make_shared<MonomialOrder>(std::vector<std::size_t>{eliminated, n});
    }

    std::size_t nvars() const { return ends_.empty() ? 0 : ends_.back(); }
    const std::vector<std::size_t>& block_ends() const { return ends_; }
    bool same_as(const MonomialOrder& o) const { return ends_ == o.ends_ && lex_ == o.lex_; }

    int compare(const Monomial& a, const Monomial& b) const
    {
        std::size_t first = 0;
        for (std::size_t k = 0; k < ends_.size(); ++k) {
            std::size_t last = ends_[k];
            if (lex_[k]) {
                for (std::size_t i = first; i < last; ++i)
                    if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? -1 : 1;
            } else {
                auto da = a.degree(first, last), db = b.degree(first, last);
                if (da != db) return da < db ? -1 : 1;
                for (std::size_t i = last; i-- > first;)
                    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? -1 : 1;
            }
            first = last;
        }
        return 0;
    }

private:
    std::vector<std::size_t> ends_;
    std::vector<bool> lex_;
};

using OrderPtr = std::shared_ptr<const MonomialOrder>;

struct Term {
    Monomial m;
    mpq_class c;
};

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(OrderPtr order) : order_(std::move(order)) {}

    static Polynomial constant(OrderPtr order, const mpq_class& c)
    {
        Polynomial p(std::move(order));
        if (c != 0) p.terms_.push_back({Monomial{}, c});
        return p;
    }
    static Polynomial variable(OrderPtr order, std::size_t i, std::uint16_t power = 1)
    {
        if (i >= order->nvars()) raise(ErrorCode::DimensionMismatch, "variable index out of range");
        Polynomial p(std::move(order));
        Term t{Monomial{}, 1};
        t.m.e[i] = power;
        p.terms_.push_back(t);
        return p;
    }
    /// Builds from unsorted terms, merging duplicates.
    static Polynomial from_terms(OrderPtr order, std::vector<Term> terms)
    {
        Polynomial p(std::move(order));
        p.terms_ = std::move(terms);
        p.normalize();
        return p;
    }

    const OrderPtr& order() const { return order_; }
    std::size_t nvars() const { return order_ ? order_->nvars() : 0; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.is_one()); }
    const Term& lead() const { return terms_.front(); }
    const Monomial& lm() const { return terms_.front().m; }
    std::uint32_t total_degree() const
    {
        std::uint32_t d = 0;
        for (auto& t : terms_) d = std::max(d, t.m.degree());
        return d;
    }
    std::uint32_t support() const
    {
        std::uint32_t s = 0;
        for (auto& t : terms_) s |= t.m.support();
        return s;
    }

    Polynomial monic() const
    {
        Polynomial r(*this);
        if (r.terms_.empty()) return r;
        mpq_class inv = 1 / r.terms_.front().c;
        for (auto& t : r.terms_) t.c *= inv;
        return r;
    }

    /// Same polynomial sorted for another order on the same variables.
    Polynomial with_order(OrderPtr order) const
    {
        if (order->nvars() < nvars()) raise(ErrorCode::DimensionMismatch, "order has too few variables");
        return from_terms(std::move(order), terms_);
    }

    /// Renames variable i to map[i] in a ring with the given order.
    Polynomial embed(const std::vector<std::size_t>& map, OrderPtr order) const
    {
        std::vector<Term> ts;
        ts.reserve(terms_.size());
        for (auto& t : terms_) {
            Term u{Monomial{}, t.c};
            for (std::size_t i = 0; i < map.size(); ++i)
                if (t.m.e[i]) u.m.e[map[i]] = t.m.e[i];
            ts.push_back(std::move(u));
        }
        return from_terms(std::move(order), std::move(ts));
    }

    /// this - c * m * g, merged in one pass.
    Polynomial sub_scaled(const mpq_class& c, const Monomial& m, const Polynomial& g) const
    {
        Polynomial r(order_);
        r.terms_.reserve(terms_.size() + g.terms_.size());
        auto a = terms_.begin();
        auto b = g.terms_.begin();
        mpq_class v;
        while (a != terms_.end() || b != g.terms_.end()) {
            if (b == g.terms_.end()) {
                r.terms_.push_back(*a++);
                continue;
            }
            Monomial mb = b->m * m;
            int cmp = a == terms_.end() ? -1 : order_->compare(a->m, mb);
            if (cmp > 0) {
                r.terms_.push_back(*a++);
            } else if (cmp < 0) {
                r.terms_.push_back({mb, -c * b->c});
                ++b;
            } else {
                v = a->c - c * b->c;
                if (v != 0) r.terms_.push_back({mb, v});
                ++a;
                ++b;
            }
        }
        return r;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        if (!a.order_) return b;
        return a.sub_scaled(-1, Monomial{}, b);
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        if (!a.order_) return -b;
        return a.sub_scaled(1, Monomial{}, b);
    }
    Polynomial operator-() const
    {
        Polynomial r(*this);
        for (auto& t : r.terms_) t.c = -t.c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        std::vector<Term> ts;
        ts.reserve(a.terms_.size() * b.terms_.size());
        for (auto& x : a.terms_)
            for (auto& y : b.terms_) ts.push_back({x.m * y.m, x.c * y.c});
        return from_terms(a.order_, std::move(ts));
    }
    Polynomial pow(unsigned k) const
    {
        Polynomial r = constant(order_, 1), base = *this;
        while (k) {
            if (k & 1) r = r * base;
            k >>= 1;
            if (k) base = base * base;
        }
        return r;
    }

    Polynomial derivative(std::size_t i) const
    {
        std::vector<Term> ts;
        for (auto& t : terms_) {
            if (!t.m.e[i]) continue;
            Term d = t;
            d.c *= t.m.e[i];
            --d.m.e[i];
            ts.push_back(std::move(d));
        }
        return from_terms(order_, std::move(ts));
    }

    /// Replaces variable i by the polynomial v.
    Polynomial substitute(std::size_t i, const Polynomial& v) const
    {
        std::vector<Polynomial> powers{constant(order_, 1)};
        std::vector<Term> ts;
        for (auto& t : terms_) {
            std::uint16_t k = t.m.e[i];
            while (powers.size() <= k) powers.push_back(powers.back() * v);
            Term rest = t;
            rest.m.e[i] = 0;
            for (auto& u : powers[k].terms_) ts.push_back({u.m * rest.m, u.c * rest.c});
        }
        return from_terms(order_, std::move(ts));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b)
    {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (!(a.terms_[i].m == b.terms_[i].m) || a.terms_[i].c != b.terms_[i].c) return false;
        return true;
    }

    /// Evaluation at a point of any commutative ring built from rationals.
    template <class F>
    F evaluate(const std::vector<F>& point) const
    {
        if (point.size() < nvars()) raise(ErrorCode::DimensionMismatch, "evaluation point too short");
        F sum = F(0);
        for (auto& t : terms_) {
            F v = F(t.c);
            for (std::size_t i = 0; i < nvars(); ++i)
                for (std::uint16_t k = 0; k < t.m.e[i]; ++k) v = v * point[i];
            sum = sum + v;
        }
        return sum;
    }

    std::string to_string(const std::vector<std::string>& names) const
    {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& t : terms_) {
            mpq_class c = t.c;
            if (first) {
                if (c < 0) os << '-';
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            c = abs(c);
            bool one = t.m.is_one();
            if (c != 1 || one) os << c.get_str() << (one ? "" : "*");
            bool star = false;
            for (std::size_t i = 0; i < nvars(); ++i) {
                if (!t.m.e[i]) continue;
                if (star) os << '*';
                os << (i < names.size() ? names[i] : "v" + std::to_string(i + 1));
                if (t.m.e[i] > 1) os << '^' << t.m.e[i];
                star = true;
            }
            first = false;
        }
        return os.str();
    }

private:
    void normalize()
    {
        std::sort(terms_.begin(), terms_.end(),
                  [this](const Term& a, const Term& b) { return order_->compare(a.m, b.m) > 0; });
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!out.empty() && out.back().m == t.m)
                out.back().c += t.c;
            else
                out.push_back(std::move(t));
            if (out.back().c == 0) out.pop_back();
        }
        terms_ = std::move(out);
    }

    OrderPtr order_;
    std::vector<Term> terms_;
};

namespace detail {

class PolynomialParser {
public:
    PolynomialParser(const std::string& text, const std::vector<std::string>& names, OrderPtr order)
        : s_(text), names_(names), order_(std::move(order))
    {
    }

    Polynomial parse()
    {
        Polynomial p = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& why)
    {
        raise(ErrorCode::ParseError, why + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr()
    {
        Polynomial acc(order_);
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        acc = term();
        if (neg) acc = -acc;
        for (;;) {
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                return acc;
        }
    }
    Polynomial term()
    {
        Polynomial acc = factor();
        for (;;) {
            skip();
            if (eat('*')) {
                acc = acc * factor();
            } else if (pos_ < s_.size() && s_[pos_] == '/') {
                ++pos_;
                skip();
                mpz_class d = integer();
                if (d == 0) fail("division by zero");
                acc = acc * Polynomial::constant(order_, mpq_class(1, 1) / mpq_class(d));
            } else if (pos_ < s_.size() && (s_[pos_] == '(' || std::isalpha(static_cast<unsigned char>(s_[pos_])))) {
                acc = acc * factor(); // implicit product, e.g. 5z1^4
            } else {
                return acc;
            }
        }
    }
    Polynomial factor()
    {
        Polynomial base = atom();
        if (eat('^')) {
            skip();
            mpz_class k = integer();
            if (k > 4096) fail("exponent too large");
            base = base.pow(static_cast<unsigned>(k.get_ui()));
        }
        return base;
    }
    Polynomial atom()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial p = expr();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        if (c == '-') {
            ++pos_;
            return -factor();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return Polynomial::constant(order_, mpq_class(integer()));
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            auto it = std::find(names_.begin(), names_.end(), name);
            if (it == names_.end()) fail("unknown variable '" + name + "'");
            return Polynomial::variable(order_, static_cast<std::size_t>(it - names_.begin()));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
    mpz_class integer()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected integer");
        return mpz_class(s_.substr(start, pos_ - start));
    }

    std::string s_;
    const std::vector<std::string>& names_;
    OrderPtr order_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses integer/rational coefficients, named variables and + - * / ^.
inline Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names, OrderPtr order)
{
    if (names.size() > order->nvars()) raise(ErrorCode::DimensionMismatch, "more names than variables");
    return detail::PolynomialParser(text, names, std::move(order)).parse();
}

} // namespace ellsplit
