#pragma once

// Subvarieties of G_m^g and E^g given by generators, with dimension and the
// closure of images under coordinate projections and monomial maps.

#include <algorithm>
#include <bit>
#include <functional>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curve.hpp"
#include "endo.hpp"
#include "error.hpp"
#include "groebner.hpp"
#include "polynomial.hpp"

namespace ellsplit {

enum class Ambient { Torus, EllipticPower };

inline std::string_view to_string(Ambient a) { return a == Ambient::Torus ? "torus" : "elliptic-power"; }

inline Ambient ambient_from_string(std::string_view s)
{
    if (s == "torus") return Ambient::Torus;
    if (s == "elliptic-power" || s == "elliptic") return Ambient::EllipticPower;
    raise(ErrorCode::ConfigError, "unknown ambient '" + std::string(s) + "'");
}

struct VarietySpec {
    std::string name;
    Ambient ambient = Ambient::Torus;
    std::size_t g = 0;
    std::optional<CurveSpec> curve;
    std::vector<std::string> generators;
    int claimed_dimension = -1;
    bool claimed_irreducible = true;
};

/// z1..zg on the torus, x1,y1,..,xg,yg on E^g.
inline std::vector<std::string> variable_names(Ambient a, std::size_t g)
{
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= g; ++i) {
        if (a == Ambient::Torus) {
            names.push_back("z" + std::to_string(i));
        } else {
            names.push_back("x" + std::to_string(i));
            names.push_back("y" + std::to_string(i));
        }
    }
    return names;
}

/// y^2 + a1 x y + a3 y - x^3 - a2 x^2 - a4 x - a6 in variables (x, y).
inline Polynomial weierstrass_polynomial(const CurveSpec& c, OrderPtr order, std::size_t x, std::size_t y)
{
    auto X = Polynomial::variable(order, x), Y = Polynomial::variable(order, y);
    auto k = [&](const mpq_class& v) { return Polynomial::constant(order, v); };
    return Y * Y + k(c.a1) * X * Y + k(c.a3) * Y - X * X * X - k(c.a2) * X * X - k(c.a4) * X - k(c.a6);
}

struct EliminationReport {
    std::vector<std::size_t> kept; // factor indices, empty for monomial maps
    std::vector<std::string> names;
    std::vector<Polynomial> generators; // reduced grevlex basis of the image ideal
    int image_dimension = -1;
    // false when the dimension came from a Jacobian rank certificate that
    // does not determine the image ideal
    bool generators_known = true;
    std::string method = "elimination";

    std::vector<std::string> generator_strings() const
    {
        std::vector<std::string> out;
        for (auto& p : generators) out.push_back(p.to_string(names));
        return out;
    }
};

namespace detail {

inline std::size_t rational_rank(std::vector<std::vector<mpq_class>> m)
{
    std::size_t rank = 0, cols = m.empty() ? 0 : m[0].size();
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t piv = rank;
        while (piv < m.size() && m[piv][c] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = rank + 1; r < m.size(); ++r) {
            if (m[r][c] == 0) continue;
            mpq_class f = m[r][c] / m[rank][c];
            for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

inline void for_each_subset(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& f)
{
    std::vector<std::size_t> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    if (k > n) return;
    for (;;) {
        if (!f(s)) return;
        std::size_t i = k;
        while (i > 0 && s[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
    }
}

} // namespace detail

class Variety {
public:
    explicit Variety(VarietySpec spec, GroebnerConfig config = {}) : spec_(std::move(spec)), config_(config)
    {
        if (spec_.g == 0) raise(ErrorCode::InvalidVariety, "ambient dimension must be positive");
        bool elliptic = spec_.ambient == Ambient::EllipticPower;
        if (elliptic && !spec_.curve) raise(ErrorCode::InvalidVariety, "elliptic-power ambient needs a curve");
        nvars_ = elliptic ? 2 * spec_.g : spec_.g;
        if (nvars_ + spec_.g + 2 > kMaxVariables) raise(ErrorCode::InvalidVariety, "ambient dimension too large");
        names_ = variable_names(spec_.ambient, spec_.g);
        order_ = MonomialOrder::grevlex(nvars_);

        for (auto& text : spec_.generators) generators_.push_back(parse_polynomial(text, names_, order_));
        std::vector<Polynomial> gens = generators_;
        if (elliptic) {
            for (std::size_t i = 0; i < spec_.g; ++i)
                gens.push_back(weierstrass_polynomial(*spec_.curve, order_, 2 * i, 2 * i + 1));
            basis_ = groebner(gens, config_);
            ideal_generators_ = gens;
        } else {
            Polynomial prod = Polynomial::constant(order_, 1);
            for (std::size_t i = 0; i < spec_.g; ++i) prod = prod * Polynomial::variable(order_, i);
            basis_ = saturate(gens, prod, nvars_, config_);
            // sparse input generators eliminate faster than the grevlex basis
            ideal_generators_ = groebner(gens, config_) == basis_ ? gens : basis_;
        }
        dimension_ = krull_dimension(basis_, nvars_);
        if (dimension_ < 0) raise(ErrorCode::InvalidVariety, spec_.name + ": empty variety");
        if (spec_.claimed_dimension >= 0 && spec_.claimed_dimension != dimension_)
            raise(ErrorCode::InvalidVariety, spec_.name + ": computed dimension " + std::to_string(dimension_) +
                                                 " differs from claimed " + std::to_string(spec_.claimed_dimension));
        if (!elliptic) find_smooth_points(3);
    }

    const VarietySpec& spec() const { return spec_; }
    const std::string& name() const { return spec_.name; }
    Ambient ambient() const { return spec_.ambient; }
    std::size_t g() const { return spec_.g; }
    int dimension() const { return dimension_; }
    std::size_t nvars() const { return nvars_; }
    const std::vector<std::string>& names() const { return names_; }
    const OrderPtr& order() const { return order_; }
    const std::vector<Polynomial>& generators() const { return generators_; }
    /// Reduced grevlex basis of the defining ideal.
    const std::vector<Polynomial>& basis() const { return basis_; }
    /// Some generating set of the same ideal.
    const std::vector<Polynomial>& ideal_generators() const { return ideal_generators_; }
    const GroebnerConfig& config() const { return config_; }
    const CurveSpec& curve() const
    {
        if (!spec_.curve) raise(ErrorCode::InvalidVariety, "torus variety has no curve");
        return *spec_.curve;
    }

    /// Exact substitution into the defining ideal. Points with a component at
    /// infinity lie outside the affine chart and are reported as not contained.
    bool contains(const PowerPoint& x) const
    {
        if (spec_.ambient != Ambient::EllipticPower) raise(ErrorCode::UnsupportedMap, "curve points on a torus variety");
        if (x.dim() != spec_.g) raise(ErrorCode::DimensionMismatch, "point has wrong number of components");
        std::vector<mpq_class> v;
        for (auto& c : x.components) {
            if (c.infinity) return false;
            v.push_back(c.x);
            v.push_back(c.y);
        }
        return contains(v);
    }
    bool contains(const std::vector<mpq_class>& coords) const
    {
        if (coords.size() != nvars_) raise(ErrorCode::DimensionMismatch, "coordinate vector has wrong length");
        if (spec_.ambient == Ambient::Torus)
            for (auto& c : coords)
                if (c == 0) return false;
        return std::all_of(basis_.begin(), basis_.end(),
                           [&](const Polynomial& p) { return p.evaluate(coords) == 0; });
    }

    /// Smooth rational points found by fixing d coordinates to small integers
    /// and solving; possibly empty.
    const std::vector<std::vector<mpq_class>>& smooth_points() const { return smooth_points_; }

    std::vector<std::vector<mpq_class>> jacobian(const std::vector<mpq_class>& p) const
    {
        std::vector<std::vector<mpq_class>> j;
        for (auto& f : basis_) {
            std::vector<mpq_class> row;
            for (std::size_t i = 0; i < nvars_; ++i) row.push_back(f.derivative(i).evaluate(p));
            j.push_back(std::move(row));
        }
        return j;
    }

    /// Variable indices carried by the given factors.
    std::vector<std::size_t> factor_variables(const std::vector<std::size_t>& factors) const
    {
        std::vector<std::size_t> out;
        for (auto f : factors) {
            if (f >= spec_.g) raise(ErrorCode::DimensionMismatch, "factor index out of range");
            if (spec_.ambient == Ambient::Torus) {
                out.push_back(f);
            } else {
                out.push_back(2 * f);
                out.push_back(2 * f + 1);
            }
        }
        return out;
    }

private:
    void find_smooth_points(std::size_t wanted)
    {
        static const int values[] = {2, 3, 5, 7, 11, 13, 17, 19, 23};
        auto lex = MonomialOrder::lex(nvars_);
        GroebnerConfig quick = config_;
        quick.max_pairs = std::min<std::size_t>(quick.max_pairs, 500);
        quick.max_terms = std::min<std::size_t>(quick.max_terms, 400);
        std::size_t d = static_cast<std::size_t>(dimension_);
        detail::for_each_subset(nvars_, d, [&](const std::vector<std::size_t>& fixed) {
            for (std::size_t trial = 0; trial < 3 && smooth_points_.size() < wanted; ++trial) {
                std::vector<Polynomial> sys;
                for (auto& f : ideal_generators_) sys.push_back(f.with_order(lex));
                for (std::size_t k = 0; k < d; ++k)
                    sys.push_back(Polynomial::variable(lex, fixed[k]) -
                                  Polynomial::constant(lex, values[(trial + 2 * k) % 9]));
                std::vector<Polynomial> gb;
                try {
                    gb = groebner(sys, quick);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::BudgetExceeded) throw;
                    return true;
                }
                if (gb.size() != nvars_) return true;
                std::vector<mpq_class> p(nvars_);
                bool ok = true;
                for (auto& f : gb) {
                    auto sup = f.lm().support();
                    if (f.lm().degree() != 1 || f.terms().size() != 2 || !f.terms()[1].m.is_one()) {
                        ok = false;
                        break;
                    }
                    p[static_cast<std::size_t>(std::countr_zero(sup))] = -f.terms()[1].c;
                }
                if (!ok) return true;
                if (detail::rational_rank(jacobian(p)) != nvars_ - d) continue;
                if (std::find(smooth_points_.begin(), smooth_points_.end(), p) == smooth_points_.end())
                    smooth_points_.push_back(p);
            }
            return smooth_points_.size() < wanted;
        });
    }

    VarietySpec spec_;
    GroebnerConfig config_;
    std::size_t nvars_ = 0;
    std::vector<std::string> names_;
    OrderPtr order_;
    std::vector<Polynomial> generators_;
    std::vector<Polynomial> basis_;
    std::vector<Polynomial> ideal_generators_;
    std::vector<std::vector<mpq_class>> smooth_points_;
    int dimension_ = -1;
};

/// Closure of the projection onto the given factors (0-based, increasing).
inline EliminationReport project(const Variety& v, std::vector<std::size_t> factors)
{
    std::sort(factors.begin(), factors.end());
    factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
    EliminationReport r;
    r.kept = factors;
    auto vars = v.factor_variables(factors);
    for (auto i : vars) r.names.push_back(v.names()[i]);
    r.generators = eliminate(v.ideal_generators(), v.nvars(), vars, v.config());
    r.image_dimension = krull_dimension(r.generators, vars.size());
    return r;
}

/// Dominance by ideal comparison: the elimination ideal is zero on the torus,
/// and exactly the curve relations on E^g.
inline bool is_dominant_projection(const Variety& v, const std::vector<std::size_t>& factors)
{
    auto r = project(v, factors);
    if (v.ambient() == Ambient::Torus) return r.generators.empty();
    auto order = MonomialOrder::grevlex(2 * r.kept.size());
    std::vector<Polynomial> curve;
    for (std::size_t i = 0; i < r.kept.size(); ++i) curve.push_back(weierstrass_polynomial(v.curve(), order, 2 * i, 2 * i + 1));
    return groebner(curve, v.config()) == r.generators;
}

namespace detail {

/// Factor indices when every row is a distinct unit coordinate vector.
inline std::optional<std::vector<std::size_t>> coordinate_rows(const MorphismMatrix& m)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::optional<std::size_t> col;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const auto& e = m(i, j);
            if (e.is_zero()) continue;
            if (col || !(e == Endomorphism(1, 0, m.order()))) return std::nullopt;
            col = j;
        }
        if (!col || std::find(out.begin(), out.end(), *col) != out.end()) return std::nullopt;
        out.push_back(*col);
    }
    return out;
}

} // namespace detail

namespace detail {

inline Polynomial determinant(std::vector<std::vector<Polynomial>> m, const OrderPtr& order)
{
    std::size_t n = m.size();
    if (n == 0) return Polynomial::constant(order, 1);
    if (n == 1) return m[0][0];
    Polynomial sum(order);
    for (std::size_t c = 0; c < n; ++c) {
        if (m[0][c].is_zero()) continue;
        std::vector<std::vector<Polynomial>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Polynomial> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(m[r][k]);
            minor.push_back(std::move(row));
        }
        Polynomial t = m[0][c] * determinant(std::move(minor), order);
        sum = c % 2 ? sum - t : sum + t;
    }
    return sum;
}

/// True when every minor of size (g - d + k + 1) of the Jacobian of the ideal
/// stacked with the logarithmic differential of the monomial map lies in the
/// ideal. Then the differential of the map on V has rank at most k everywhere.
inline bool jacobian_minors_vanish(const Variety& v, const MorphismMatrix& m, int k)
{
    std::size_t g = v.g(), d = static_cast<std::size_t>(v.dimension());
    std::size_t size = g - d + static_cast<std::size_t>(k) + 1;
    const auto& order = v.order();
    std::vector<std::vector<Polynomial>> rows;
    for (auto& f : v.basis()) {
        std::vector<Polynomial> row;
        for (std::size_t i = 0; i < g; ++i) row.push_back(f.derivative(i));
        rows.push_back(std::move(row));
    }
    // row j of d(z^M)/z^M scaled by z1*..*zg
    for (std::size_t j = 0; j < m.rows(); ++j) {
        std::vector<Polynomial> row;
        for (std::size_t i = 0; i < g; ++i) {
            Polynomial e = Polynomial::constant(order, mpq_class(m(j, i).a));
            for (std::size_t l = 0; l < g; ++l)
                if (l != i) e = e * Polynomial::variable(order, l);
            row.push_back(std::move(e));
        }
        rows.push_back(std::move(row));
    }
    if (size > std::min(rows.size(), g)) return true;
    bool all = true;
    for_each_subset(rows.size(), size, [&](const std::vector<std::size_t>& rs) {
        for_each_subset(g, size, [&](const std::vector<std::size_t>& cs) {
            std::vector<std::vector<Polynomial>> sub;
            for (auto r : rs) {
                std::vector<Polynomial> row;
                for (auto c : cs) row.push_back(rows[r][c]);
                sub.push_back(std::move(row));
            }
            if (!normal_form(determinant(std::move(sub), order), v.basis()).is_zero()) all = false;
            return all;
        });
        return all;
    });
    return all;
}

} // namespace detail

/// Closure of the image of a torus variety under z -> (z^{M_1}, .., z^{M_r}).
/// On E^g only coordinate selections are supported.
inline EliminationReport image(const Variety& v, const MorphismMatrix& m, bool use_certificates = true)
{
    if (m.cols() != v.g()) raise(ErrorCode::DimensionMismatch, "matrix columns differ from ambient dimension");
    if (v.ambient() == Ambient::EllipticPower) {
        auto rows = detail::coordinate_rows(m);
        if (!rows || !std::is_sorted(rows->begin(), rows->end()))
            raise(ErrorCode::UnsupportedMap, "only coordinate projections act on elliptic-power varieties");
        return project(v, *rows);
    }
    if (m.order() != Order::Z) raise(ErrorCode::UnsupportedMap, "monomial maps need integer exponents");

    // The rank of the differential at a smooth point bounds the image
    // dimension from below; vanishing of all larger minors of the Jacobian
    // modulo the ideal bounds it from above.
    int upper = std::min(v.dimension(), static_cast<int>(rank(m)));
    int lower = 0;
    for (auto& p : v.smooth_points()) {
        auto rows = v.jacobian(p);
        std::size_t base = detail::rational_rank(rows);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            std::vector<mpq_class> row;
            for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(mpq_class(m(i, j).a) / p[j]);
            rows.push_back(std::move(row));
        }
        lower = std::max(lower, static_cast<int>(detail::rational_rank(rows) - base));
    }
    auto certified = [&](int k, const char* method) {
        EliminationReport rep;
        for (std::size_t i = 0; i < m.rows(); ++i) rep.names.push_back("w" + std::to_string(i + 1));
        rep.image_dimension = k;
        rep.generators_known = k == static_cast<int>(m.rows());
        rep.method = method;
        return rep;
    };
    if (use_certificates && !v.smooth_points().empty()) {
        if (lower == upper) return certified(lower, "jacobian-rank");
        if (detail::jacobian_minors_vanish(v, m, lower)) return certified(lower, "jacobian-minors");
    }

    std::size_t g = v.g(), r = m.rows();
    std::vector<std::size_t> inverse_slot(g, SIZE_MAX);
    std::size_t n = g;
    for (std::size_t j = 0; j < g; ++j)
        for (std::size_t i = 0; i < r; ++i)
            if (m(i, j).a < 0 && inverse_slot[j] == SIZE_MAX) inverse_slot[j] = n++;
    std::size_t first_w = n;
    n += r;
    if (n > kMaxVariables) raise(ErrorCode::BudgetExceeded, "too many variables for monomial image");

    auto order = MonomialOrder::grevlex(n);
    std::vector<std::size_t> id(g);
    for (std::size_t j = 0; j < g; ++j) id[j] = j;
    std::vector<Polynomial> gens;
    for (auto& p : v.ideal_generators()) gens.push_back(p.embed(id, order));
    for (std::size_t j = 0; j < g; ++j)
        if (inverse_slot[j] != SIZE_MAX)
            gens.push_back(Polynomial::variable(order, j) * Polynomial::variable(order, inverse_slot[j]) -
                           Polynomial::constant(order, 1));
    for (std::size_t i = 0; i < r; ++i) {
        Polynomial mono = Polynomial::constant(order, 1);
        for (std::size_t j = 0; j < g; ++j) {
            std::int64_t a = m(i, j).a;
            if (a > 0) mono = mono * Polynomial::variable(order, j, static_cast<std::uint16_t>(a));
            if (a < 0) mono = mono * Polynomial::variable(order, inverse_slot[j], static_cast<std::uint16_t>(-a));
        }
        gens.push_back(Polynomial::variable(order, first_w + i) - mono);
    }
    EliminationReport rep;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < r; ++i) {
        kept.push_back(first_w + i);
        rep.names.push_back("w" + std::to_string(i + 1));
    }
    rep.generators = eliminate(gens, n, kept, v.config());
    rep.image_dimension = krull_dimension(rep.generators, r);
    return rep;
}

} // namespace ellsplit
