#pragma once

// Bounded checks of Property (S^n), dominant coordinate projections, split
// witnesses and the dimension formula for V + B.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "endo.hpp"
#include "error.hpp"
#include "variety.hpp"

namespace ellsplit {

struct PropertySReport {
    std::string variety;
    int n = 0;
    double bound = 0;
    int dimension = 0;
    bool fails = false;
    std::optional<MorphismMatrix> witness;
    std::size_t witness_index = 0;
    EliminationReport witness_image; // recomputed from scratch for the witness
    std::size_t candidates_checked = 0;
    std::size_t candidates_skipped = 0; // maps the ambient cannot evaluate
    // only meaningful for n = 0
    std::optional<bool> deprived_set_empty;

    std::string verdict() const { return fails ? "FAILS" : "PASSES-UP-TO-BOUND"; }
};

namespace detail {

/// Sorted factor indices when every row is a unit multiple of a distinct
/// coordinate vector; such maps have the image of the coordinate projection.
inline std::optional<std::vector<std::size_t>> unit_coordinate_rows(const MorphismMatrix& m)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::optional<std::size_t> col;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const auto& e = m(i, j);
            if (e.is_zero()) continue;
            if (col || e.norm2() != 1) return std::nullopt;
            col = j;
        }
        if (!col || std::find(out.begin(), out.end(), *col) != out.end()) return std::nullopt;
        out.push_back(*col);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Image dimension of V under m, or nullopt when the ambient cannot evaluate m.
inline std::optional<EliminationReport> try_image(const Variety& v, const MorphismMatrix& m, bool use_certificates = true)
{
    if (v.ambient() == Ambient::EllipticPower) {
        auto cols = detail::unit_coordinate_rows(m);
        if (!cols) return std::nullopt;
        return project(v, *cols);
    }
    return image(v, m, use_certificates);
}

/// Ideal-level report for a witness: elimination when it finishes within the
/// variety's budget, else the certificate path.
inline EliminationReport recheck_image(const Variety& v, const MorphismMatrix& m)
{
    if (auto cols = detail::unit_coordinate_rows(m)) return project(v, *cols);
    try {
        return image(v, m, false);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExceeded) throw;
    }
    return image(v, m, true);
}

inline PropertySReport check_property_S(const Variety& v, int n, double bound)
{
    if (n < 0) raise(ErrorCode::ConfigError, "n must be non-negative");
    PropertySReport rep;
    rep.variety = v.name();
    rep.n = n;
    rep.bound = bound;
    rep.dimension = v.dimension();
    std::size_t r = static_cast<std::size_t>(v.dimension() + n);
    if (r == 0 || r > v.g()) {
        // no morphism has image dimension d + n, or d = 0
        if (n == 0) rep.deprived_set_empty = false;
        return rep;
    }
    auto candidates = hermite_enumerate(r, v.g(), bound);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& m = candidates[i];
        auto img = try_image(v, m);
        if (!img) {
            ++rep.candidates_skipped;
            continue;
        }
        ++rep.candidates_checked;
        if (img->image_dimension < v.dimension()) {
            rep.fails = true;
            rep.witness = m;
            rep.witness_index = i;
            rep.witness_image = recheck_image(v, m);
            if (rep.witness_image.image_dimension != img->image_dimension)
                raise(ErrorCode::VerificationFailed, "witness image dimension does not re-verify");
            break;
        }
    }
    if (n == 0) rep.deprived_set_empty = rep.fails;
    return rep;
}

// ---------------------------------------------------------------------------

/// Number of factors the projection onto `factors` keeps free.
inline int projection_dimension(const Variety& v, const std::vector<std::size_t>& factors)
{
    if (factors.empty()) return 0;
    return project(v, factors).image_dimension;
}

/// Greedy growth of an independent coordinate set, one coordinate at a time.
/// Coordinates form an algebraic matroid on V, so the result is the
/// lexicographically first dominant d-subset.
inline std::vector<std::size_t> find_dominant_projection(const Variety& v)
{
    std::vector<std::size_t> chosen;
    std::size_t d = static_cast<std::size_t>(v.dimension());
    for (std::size_t i = 0; i < v.g() && chosen.size() < d; ++i) {
        auto trial = chosen;
        trial.push_back(i);
        if (projection_dimension(v, trial) == static_cast<int>(trial.size())) chosen = std::move(trial);
    }
    if (chosen.size() != d) raise(ErrorCode::VerificationFailed, v.name() + ": no dominant projection found");
    if (d > 0 && !is_dominant_projection(v, chosen))
        raise(ErrorCode::VerificationFailed, v.name() + ": greedy projection fails the dominance check");
    return chosen;
}

/// All dominant d-subsets in lexicographic order.
inline std::vector<std::vector<std::size_t>> dominant_projections_brute_force(const Variety& v)
{
    std::vector<std::vector<std::size_t>> out;
    std::size_t d = static_cast<std::size_t>(v.dimension());
    if (d == 0) return {{}};
    detail::for_each_subset(v.g(), d, [&](const std::vector<std::size_t>& s) {
        if (is_dominant_projection(v, s)) out.push_back(s);
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------

/// Turns a rank-d witness with zero-dimensional image into one whose image
/// has dimension in (0, d) by swapping in a nonconstant coordinate.
inline MorphismMatrix refine_failure(const Variety& v, const MorphismMatrix& witness)
{
    int d = v.dimension();
    if (witness.cols() != v.g()) raise(ErrorCode::DimensionMismatch, "witness has wrong number of columns");
    auto img = try_image(v, witness);
    if (!img) raise(ErrorCode::UnsupportedMap, "witness cannot be evaluated on this ambient");
    if (img->image_dimension >= d) raise(ErrorCode::ConfigError, "not a failure witness");
    if (img->image_dimension > 0) return witness;
    if (d < 2) raise(ErrorCode::NoCaseApplies, "a zero-dimensional image cannot be refined when d < 2");
    std::size_t rows = witness.rows();
    for (std::size_t row = 0; row < rows; ++row)
        for (std::size_t c = 0; c < v.g(); ++c) {
            if (projection_dimension(v, {c}) != 1) continue;
            MorphismMatrix m = witness;
            for (std::size_t j = 0; j < v.g(); ++j) m(row, j) = Endomorphism(j == c ? 1 : 0, 0, m.order());
            if (rank(m) != rank(witness)) continue;
            auto refined = try_image(v, m);
            if (refined && refined->image_dimension > 0 && refined->image_dimension < d) return m;
        }
    raise(ErrorCode::NoCaseApplies, "no coordinate refines the witness");
}

// ---------------------------------------------------------------------------

struct SplitWitness {
    MorphismMatrix isogeny;
    std::size_t g1 = 0, g2 = 0;
    int dim_w1 = 0, dim_w2 = 0;
};

/// f = (phi ; K) from complement_to_isogeny; f(V) lies in W1 x W2 with W1 the
/// closure of phi(V) and W2 that of K(V). Returned when dim W1 < min(d, g1 - n).
inline std::optional<SplitWitness> build_split_witness(const Variety& v, const MorphismMatrix& phi, int n)
{
    auto w1 = try_image(v, phi);
    if (!w1) raise(ErrorCode::UnsupportedMap, "witness cannot be evaluated on this ambient");
    SplitWitness s;
    s.isogeny = complement_to_isogeny(phi);
    s.g1 = phi.rows();
    s.g2 = v.g() - s.g1;
    s.dim_w1 = w1->image_dimension;
    s.dim_w2 = 0;
    if (s.g2 > 0) {
        auto w2 = try_image(v, s.isogeny.row_block(s.g1, s.g2));
        s.dim_w2 = w2 ? w2->image_dimension : static_cast<int>(s.g2);
    }
    int limit = std::min(v.dimension(), static_cast<int>(s.g1) - n);
    if (s.dim_w1 < limit) return s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

struct SumDimensionReport {
    int dim_v = 0;
    int dim_b = 0;
    int dim_sum = 0;
    int expected = 0; // min(dim V + dim B, g)
    bool holds = false;
};

/// dim(V + B) for the subtorus B = {t^P} with P a g x k integer matrix,
/// computed as the image of V x G_m^k under (z, t) -> z * t^P.
inline SumDimensionReport check_ps_criterion(const Variety& v, const MorphismMatrix& param)
{
    if (v.ambient() != Ambient::Torus) raise(ErrorCode::UnsupportedMap, "dimension of V + B needs the torus model");
    if (param.rows() != v.g()) raise(ErrorCode::DimensionMismatch, "parameterization needs g rows");
    std::size_t g = v.g(), k = param.cols();
    SumDimensionReport rep;
    rep.dim_v = v.dimension();
    rep.dim_b = static_cast<int>(k ? rank(param) : 0);
    rep.expected = std::min(rep.dim_v + rep.dim_b, static_cast<int>(g));
    if (rep.dim_b == 0) {
        rep.dim_sum = rep.dim_v;
    } else {
        VarietySpec prod = v.spec();
        prod.name = v.name() + "-x-torus";
        prod.g = g + k;
        prod.claimed_dimension = rep.dim_v + static_cast<int>(k);
        Variety w(prod, v.config());
        MorphismMatrix m(g, g + k);
        for (std::size_t i = 0; i < g; ++i) {
            m(i, i) = Endomorphism(1);
            for (std::size_t j = 0; j < k; ++j) m(i, g + j) = param(i, j);
        }
        rep.dim_sum = image(w, m).image_dimension;
    }
    rep.holds = rep.dim_sum == rep.expected;
    return rep;
}

} // namespace ellsplit
