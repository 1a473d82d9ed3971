#pragma once

// Buchberger's algorithm with the Gebauer-Moeller pair criteria, reduced bases,
// elimination, saturation and Krull dimension from leading monomials.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "polynomial.hpp"

namespace ellsplit {

struct GroebnerConfig {
    std::size_t max_pairs = 200000;
    std::size_t max_terms = 1000000; // per intermediate polynomial
};

namespace detail {

struct CriticalPair {
    std::size_t i, j;
    Monomial lcm;
    std::uint32_t degree;
};

inline const Polynomial* find_reducer(const Monomial& m, const std::vector<Polynomial>& basis,
                                      const std::vector<bool>* active = nullptr)
{
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (active && !(*active)[k]) continue;
        if (!basis[k].is_zero() && basis[k].lm().divides(m)) return &basis[k];
    }
    return nullptr;
}

inline Polynomial full_reduce(Polynomial p, const std::vector<Polynomial>& basis, const std::vector<bool>* active,
                              std::size_t max_terms = SIZE_MAX)
{
    std::vector<Term> done;
    while (!p.is_zero()) {
        if (p.terms().size() + done.size() > max_terms)
            raise(ErrorCode::BudgetExceeded, "intermediate polynomial exceeds " + std::to_string(max_terms) + " terms");
        const Term& lt = p.lead();
        if (const Polynomial* g = find_reducer(lt.m, basis, active)) {
            mpq_class c = lt.c / g->lead().c;
            p = p.sub_scaled(c, lt.m / g->lm(), *g);
        } else {
            done.push_back(lt);
            std::vector<Term> rest(p.terms().begin() + 1, p.terms().end());
            p = Polynomial::from_terms(p.order(), std::move(rest));
        }
    }
    return Polynomial::from_terms(p.order(), std::move(done));
}

inline Polynomial s_polynomial(const Polynomial& f, const Polynomial& g)
{
    Monomial l = lcm(f.lm(), g.lm());
    Polynomial a = Polynomial(f.order()).sub_scaled(-1 / f.lead().c, l / f.lm(), f);
    return a.sub_scaled(1 / g.lead().c, l / g.lm(), g);
}

} // namespace detail

/// Remainder of f after full reduction by the given polynomials.
inline Polynomial normal_form(const Polynomial& f, const std::vector<Polynomial>& basis)
{
    return detail::full_reduce(f, basis, nullptr);
}

/// Reduced monic Groebner basis, sorted by increasing leading monomial.
inline std::vector<Polynomial> groebner(const std::vector<Polynomial>& generators, const GroebnerConfig& config = {})
{
    OrderPtr order;
    for (auto& f : generators)
        if (f.order()) {
            if (!order) order = f.order();
            else if (!order->same_as(*f.order()))
                raise(ErrorCode::DimensionMismatch, "generators use different monomial orders");
        }

    std::vector<Polynomial> polys;
    std::vector<bool> active;
    std::vector<detail::CriticalPair> pairs;

    auto update = [&](Polynomial h) {
        std::size_t hi = polys.size();
        polys.push_back(std::move(h));
        active.push_back(true);
        const Monomial& mh = polys[hi].lm();

        std::vector<detail::CriticalPair> fresh;
        for (std::size_t k = 0; k < hi; ++k)
            if (active[k]) {
                Monomial l = lcm(polys[k].lm(), mh);
                fresh.push_back({k, hi, l, l.degree()});
            }
        // a new pair whose lcm is a proper multiple of another new lcm is redundant
        std::vector<detail::CriticalPair> kept;
        for (auto& a : fresh) {
            bool redundant = std::any_of(fresh.begin(), fresh.end(), [&](const detail::CriticalPair& b) {
                return b.lcm.divides(a.lcm) && !(b.lcm == a.lcm);
            });
            if (!redundant) kept.push_back(a);
        }
        // one pair per lcm, none at all if some pair with that lcm is coprime
        std::vector<detail::CriticalPair> chosen;
        for (std::size_t a = 0; a < kept.size(); ++a) {
            bool seen = false, coprime = false;
            for (std::size_t b = 0; b < kept.size(); ++b) {
                if (!(kept[b].lcm == kept[a].lcm)) continue;
                if (b < a) seen = true;
                if (polys[kept[b].i].lm().coprime(mh)) coprime = true;
            }
            if (!seen && !coprime) chosen.push_back(kept[a]);
        }
        std::vector<detail::CriticalPair> next;
        for (auto& p : pairs) {
            bool drop = mh.divides(p.lcm) && !(lcm(polys[p.i].lm(), mh) == p.lcm) &&
                        !(lcm(polys[p.j].lm(), mh) == p.lcm);
            if (!drop) next.push_back(p);
        }
        next.insert(next.end(), chosen.begin(), chosen.end());
        pairs = std::move(next);
        for (std::size_t k = 0; k < hi; ++k)
            if (active[k] && mh.divides(polys[k].lm())) active[k] = false;
    };

    for (auto& f : generators) {
        if (f.is_zero()) continue;
        Polynomial h = detail::full_reduce(f, polys, &active, config.max_terms);
        if (!h.is_zero()) update(h.monic());
    }

    std::size_t processed = 0;
    while (!pairs.empty()) {
        if (++processed > config.max_pairs)
            raise(ErrorCode::BudgetExceeded, "S-pair budget of " + std::to_string(config.max_pairs) + " exhausted");
        auto best = pairs.begin();
        for (auto it = pairs.begin() + 1; it != pairs.end(); ++it) {
            if (it->degree != best->degree) {
                if (it->degree < best->degree) best = it;
            } else if (order->compare(it->lcm, best->lcm) < 0) {
                best = it;
            }
        }
        detail::CriticalPair p = *best;
        pairs.erase(best);
        Polynomial h = detail::full_reduce(detail::s_polynomial(polys[p.i], polys[p.j]), polys, &active, config.max_terms);
        if (!h.is_zero()) update(h.monic());
    }

    std::vector<Polynomial> minimal;
    for (std::size_t k = 0; k < polys.size(); ++k)
        if (active[k]) minimal.push_back(polys[k]);
    std::vector<Polynomial> reduced;
    for (std::size_t k = 0; k < minimal.size(); ++k) {
        std::vector<Polynomial> others;
        for (std::size_t l = 0; l < minimal.size(); ++l)
            if (l != k) others.push_back(minimal[l]);
        reduced.push_back(normal_form(minimal[k], others).monic());
    }
    std::sort(reduced.begin(), reduced.end(),
              [](const Polynomial& a, const Polynomial& b) { return a.order()->compare(a.lm(), b.lm()) < 0; });
    return reduced;
}

/// Reduced bases are unique, so equality of ideals is equality of bases.
inline bool same_ideal(const std::vector<Polynomial>& a, const std::vector<Polynomial>& b,
                       const GroebnerConfig& config = {})
{
    return groebner(a, config) == groebner(b, config);
}

inline bool is_unit_ideal(const std::vector<Polynomial>& basis)
{
    return std::any_of(basis.begin(), basis.end(), [](const Polynomial& p) { return !p.is_zero() && p.lm().is_one(); });
}

/// Krull dimension of the ideal spanned by a Groebner basis inside the ring on
/// the variables in `vars` (bit mask): the size of a largest set of those
/// variables containing the support of no leading monomial. -1 for the unit ideal.
inline int krull_dimension(const std::vector<Polynomial>& basis, std::uint32_t vars)
{
    if (is_unit_ideal(basis)) return -1;
    std::vector<std::uint32_t> supports;
    for (auto& p : basis)
        if (!p.is_zero()) supports.push_back(p.lm().support() & vars);
    std::sort(supports.begin(), supports.end(),
              [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
    // smallest set of variables meeting every support
    int best = std::popcount(vars);
    auto search = [&](auto&& self, std::uint32_t chosen, int size) -> void {
        if (size >= best) return;
        for (std::uint32_t s : supports)
            if (!(s & chosen)) {
                for (std::uint32_t rest = s; rest; rest &= rest - 1) self(self, chosen | (rest & -rest), size + 1);
                return;
            }
        best = size;
    };
    search(search, 0, 0);
    return std::popcount(vars) - best;
}

inline int krull_dimension(const std::vector<Polynomial>& basis, std::size_t nvars)
{
    return krull_dimension(basis, nvars >= 32 ? ~0u : (1u << nvars) - 1);
}

namespace detail {

/// Removes eliminated variables that some generator expresses as c*v - p with
/// p free of v, substituting v = p/c everywhere else.
inline void substitute_linear(std::vector<Polynomial>& gens, const std::vector<bool>& keep)
{
    for (;;) {
        std::size_t best_g = SIZE_MAX, best_v = 0, best_size = SIZE_MAX;
        for (std::size_t k = 0; k < gens.size(); ++k)
            for (std::size_t v = 0; v < keep.size(); ++v) {
                if (keep[v]) continue;
                std::size_t hits = 0;
                bool linear = false;
                for (auto& t : gens[k].terms()) {
                    if (!t.m.e[v]) continue;
                    ++hits;
                    linear = t.m.e[v] == 1 && t.m.degree() == 1;
                }
                if (hits == 1 && linear && gens[k].terms().size() < best_size) {
                    best_g = k;
                    best_v = v;
                    best_size = gens[k].terms().size();
                }
            }
        if (best_g == SIZE_MAX) return;
        Polynomial g = gens[best_g];
        gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(best_g));
        // g = c*v + rest, so v = -rest/c
        mpq_class c;
        std::vector<Term> rest;
        for (auto& t : g.terms()) {
            if (t.m.e[best_v]) c = t.c;
            else rest.push_back(t);
        }
        for (auto& t : rest) t.c = -t.c / c;
        Polynomial value = Polynomial::from_terms(g.order(), std::move(rest));
        std::vector<Polynomial> next;
        for (auto& h : gens) {
            Polynomial s = h.substitute(best_v, value);
            if (!s.is_zero()) next.push_back(std::move(s));
        }
        gens = std::move(next);
    }
}

} // namespace detail

/// I intersected with the subring on `kept`, as a reduced grevlex basis in
/// variables renumbered 0..kept.size()-1. A lexicographic order, which is
/// fast on the triangular systems arising from graphs and monomial maps, is
/// tried under a small pair budget before the block grevlex order.
inline std::vector<Polynomial> eliminate(const std::vector<Polynomial>& generators, std::size_t nvars,
                                         const std::vector<std::size_t>& kept, const GroebnerConfig& config = {})
{
    std::vector<bool> keep(nvars, false);
    for (auto k : kept) {
        if (k >= nvars) raise(ErrorCode::DimensionMismatch, "kept variable out of range");
        keep[k] = true;
    }
    std::vector<Polynomial> work;
    for (auto& g : generators)
        if (!g.is_zero()) work.push_back(g);
    detail::substitute_linear(work, keep);

    // eliminated variables go first, lowest degree first
    std::vector<std::size_t> elim;
    for (std::size_t i = 0; i < nvars; ++i)
        if (!keep[i]) elim.push_back(i);
    auto max_degree = [&](std::size_t v) {
        std::uint16_t d = 0;
        for (auto& g : work)
            for (auto& t : g.terms()) d = std::max(d, t.m.e[v]);
        return d;
    };
    std::stable_sort(elim.begin(), elim.end(),
                     [&](std::size_t a, std::size_t b) { return max_degree(a) < max_degree(b); });
    std::size_t e = elim.size();
    std::vector<std::size_t> to_block(nvars), to_small(nvars, 0);
    for (std::size_t i = 0; i < e; ++i) to_block[elim[i]] = i;
    for (std::size_t j = 0; j < kept.size(); ++j) {
        to_block[kept[j]] = e + j;
        to_small[e + j] = j;
    }
    std::uint32_t elim_mask = e >= 32 ? ~0u : (1u << e) - 1;
    auto small = MonomialOrder::grevlex(kept.size());

    auto run = [&](OrderPtr block, const GroebnerConfig& cfg) {
        std::vector<Polynomial> gens;
        for (auto& g : work) gens.push_back(g.embed(to_block, block));
        std::vector<Polynomial> out;
        for (auto& g : groebner(gens, cfg))
            if (!(g.support() & elim_mask)) out.push_back(g.embed(to_small, small));
        return groebner(out, cfg);
    };
    if (e > 0 && kept.size() > 0) {
        GroebnerConfig quick = config;
        quick.max_pairs = std::min<std::size_t>(config.max_pairs, 2000);
        quick.max_terms = std::min<std::size_t>(config.max_terms, 400);
        auto lex = std::make_shared<MonomialOrder>(std::vector<std::size_t>{e, nvars}, std::vector<bool>{true, true});
        try {
            return run(lex, quick);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::BudgetExceeded) throw;
        }
    }
    return run(MonomialOrder::elimination(e, nvars), config);
}

/// I : f^infinity, through the auxiliary relation t*f - 1.
inline std::vector<Polynomial> saturate(const std::vector<Polynomial>& generators, const Polynomial& f,
                                        std::size_t nvars, const GroebnerConfig& config = {})
{
    if (nvars + 1 > kMaxVariables) raise(ErrorCode::BudgetExceeded, "too many variables for saturation");
    auto big = MonomialOrder::grevlex(nvars + 1);
    std::vector<std::size_t> shift(nvars);
    for (std::size_t i = 0; i < nvars; ++i) shift[i] = i + 1;
    std::vector<Polynomial> gens;
    for (auto& g : generators) gens.push_back(g.embed(shift, big));
    gens.push_back(Polynomial::variable(big, 0) * f.embed(shift, big) - Polynomial::constant(big, 1));
    std::vector<std::size_t> kept(nvars);
    for (std::size_t i = 0; i < nvars; ++i) kept[i] = i + 1;
    return eliminate(gens, nvars + 1, kept, config);
}

} // namespace ellsplit
