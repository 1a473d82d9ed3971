#pragma once

// Matrices over End(E): exact rank and elimination over the fraction field,
// Gauss block decompositions, Hermite canonical forms and isogeny completion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "error.hpp"
#include "quad.hpp"

namespace ellsplit {

class MorphismMatrix {
public:
    MorphismMatrix() = default;
    MorphismMatrix(std::size_t rows, std::size_t cols, Order order = Order::Z)
        : rows_(rows), cols_(cols), order_(order), data_(rows * cols, Endomorphism(0, 0, order))
    {
    }

    /// Integer matrix from nested braces, e.g. {{2, -1, 0}, {0, -11, 1}}.
    static MorphismMatrix from_ints(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    {
        std::vector<std::vector<std::int64_t>> v;
        for (auto& r : rows) v.emplace_back(r);
        return from_ints(v);
    }

    static MorphismMatrix from_ints(const std::vector<std::vector<std::int64_t>>& rows)
    {
        std::size_t r = rows.size();
        std::size_t c = r ? rows.front().size() : 0;
        MorphismMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) raise(ErrorCode::DimensionMismatch, "ragged matrix rows");
            for (std::size_t j = 0; j < c; ++j) m(i, j) = Endomorphism(rows[i][j]);
        }
        return m;
    }

    static MorphismMatrix identity(std::size_t n, Order order = Order::Z)
    {
        MorphismMatrix m(n, n, order);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Endomorphism(1, 0, order);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Order order() const { return order_; }

    Endomorphism& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Endomorphism& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<Endomorphism>& entries() const { return data_; }

    /// Squared matrix norm max_ij |f_ij|^2.
    std::int64_t norm2() const
    {
        std::int64_t m = 0;
        for (auto& e : data_) m = std::max(m, e.norm2());
        return m;
    }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const Endomorphism& e) { return e.is_zero(); });
    }

    MorphismMatrix row_block(std::size_t first, std::size_t count) const
    {
        MorphismMatrix m(count, cols_, order_);
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(first + i, j);
        return m;
    }

    MorphismMatrix submatrix(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const
    {
        MorphismMatrix m(rs.size(), cs.size(), order_);
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < cs.size(); ++j) m(i, j) = (*this)(rs[i], cs[j]);
        return m;
    }

    MorphismMatrix columns(const std::vector<std::size_t>& cs) const
    {
        std::vector<std::size_t> rs(rows_);
        std::iota(rs.begin(), rs.end(), std::size_t{0});
        return submatrix(rs, cs);
    }

    friend MorphismMatrix operator*(const MorphismMatrix& x, const MorphismMatrix& y)
    {
        if (x.cols_ != y.rows_) raise(ErrorCode::DimensionMismatch, "matrix product shape");
        MorphismMatrix m(x.rows_, y.cols_, common_order(x.order_, y.order_));
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                const Endomorphism& xik = x(i, k);
                if (xik.is_zero()) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) m(i, j) += xik * y(k, j);
            }
        return m;
    }

    friend bool operator==(const MorphismMatrix& x, const MorphismMatrix& y)
    {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.data_ == y.data_;
    }
    friend bool operator!=(const MorphismMatrix& x, const MorphismMatrix& y) { return !(x == y); }

    friend std::ostream& operator<<(std::ostream& os, const MorphismMatrix& m)
    {
        os << '[';
        for (std::size_t i = 0; i < m.rows_; ++i) {
            os << (i ? ", [" : "[");
            for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
            os << ']';
        }
        return os << ']';
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Order order_ = Order::Z;
    std::vector<Endomorphism> data_;
};

/// Stacks matrices vertically (same column count).
inline MorphismMatrix vstack(const MorphismMatrix& top, const MorphismMatrix& bottom)
{
    if (top.rows() == 0) return bottom;
    if (bottom.rows() == 0) return top;
    if (top.cols() != bottom.cols()) raise(ErrorCode::DimensionMismatch, "vstack column mismatch");
    MorphismMatrix m(top.rows() + bottom.rows(), top.cols(), common_order(top.order(), bottom.order()));
    for (std::size_t i = 0; i < top.rows(); ++i)
        for (std::size_t j = 0; j < top.cols(); ++j) m(i, j) = top(i, j);
    for (std::size_t i = 0; i < bottom.rows(); ++i)
        for (std::size_t j = 0; j < top.cols(); ++j) m(top.rows() + i, j) = bottom(i, j);
    return m;
}

inline MorphismMatrix hstack(const MorphismMatrix& left, const MorphismMatrix& right)
{
    if (left.rows() != right.rows()) raise(ErrorCode::DimensionMismatch, "hstack row mismatch");
    MorphismMatrix m(left.rows(), left.cols() + right.cols(), common_order(left.order(), right.order()));
    for (std::size_t i = 0; i < left.rows(); ++i) {
        for (std::size_t j = 0; j < left.cols(); ++j) m(i, j) = left(i, j);
        for (std::size_t j = 0; j < right.cols(); ++j) m(i, left.cols() + j) = right(i, j);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Fraction-field linear algebra

using FieldRow = std::vector<QuadRational>;
using FieldMatrix = std::vector<FieldRow>;

inline FieldMatrix to_field(const MorphismMatrix& m)
{
    FieldMatrix f(m.rows(), FieldRow(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            f[i][j] = to_field(m(i, j));
            f[i][j].order = m.order();
        }
    return f;
}

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref(FieldMatrix& m)
{
    std::vector<std::size_t> pivots;
    std::size_t rows = m.size();
    std::size_t cols = rows ? m.front().size() : 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        QuadRational inv = inverse(m[r][c]);
        for (auto& x : m[r]) x = x * inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c].is_zero()) continue;
            QuadRational f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

/// Rank over the fraction field of End(E).
inline std::size_t rank(const MorphismMatrix& m)
{
    FieldMatrix f = to_field(m);
    return rref(f).size();
}

inline QuadRational determinant(const MorphismMatrix& m)
{
    if (m.rows() != m.cols()) raise(ErrorCode::DimensionMismatch, "determinant of a non-square matrix");
    FieldMatrix f = to_field(m);
    std::size_t n = f.size();
    QuadRational det(mpq_class(1), mpq_class(0), m.order());
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && f[p][c].is_zero()) ++p;
        if (p == n) return QuadRational(mpq_class(0), mpq_class(0), m.order());
        if (p != c) {
            std::swap(f[p], f[c]);
            det = -det;
        }
        det = det * f[c][c];
        QuadRational inv = inverse(f[c][c]);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (f[i][c].is_zero()) continue;
            QuadRational k = f[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) f[i][j] = f[i][j] - k * f[c][j];
        }
    }
    return det;
}

/// Scales a field vector to a primitive vector with entries in End(E).
inline std::vector<Endomorphism> clear_denominators(const FieldRow& v, Order order)
{
    mpz_class l = 1;
    for (auto& x : v) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.a.get_den_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.b.get_den_mpz_t());
    }
    std::vector<mpz_class> ints;
    for (auto& x : v) {
        ints.push_back(mpz_class(x.a * l));
        ints.push_back(mpz_class(x.b * l));
    }
    mpz_class g = 0;
    for (auto& z : ints) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
    if (g == 0) g = 1;
    std::vector<Endomorphism> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        mpz_class a = ints[2 * i] / g, b = ints[2 * i + 1] / g;
        if (!a.fits_slong_p() || !b.fits_slong_p()) raise(ErrorCode::Overflow, "cleared entry exceeds int64");
        out.emplace_back(a.get_si(), order == Order::Z ? 0 : b.get_si(), order);
    }
    // fix the unit: first nonzero entry becomes its lexicographically largest associate
    for (auto& e : out) {
        if (e.is_zero()) continue;
        Endomorphism best_u(1, 0, order), best = e;
        for (auto& u : units(order)) {
            Endomorphism c = u * e;
            if (std::tie(c.a, c.b) > std::tie(best.a, best.b)) {
                best = c;
                best_u = u;
            }
        }
        for (auto& x : out) x = best_u * x;
        break;
    }
    return out;
}

/// Basis of {v : M v = 0} over the fraction field, scaled into End(E).
inline MorphismMatrix right_kernel(const MorphismMatrix& m)
{
    FieldMatrix f = to_field(m);
    auto pivots = rref(f);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Endomorphism>> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        FieldRow v(m.cols(), QuadRational(mpq_class(0), mpq_class(0), m.order()));
        v[free] = QuadRational(mpq_class(1), mpq_class(0), m.order());
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -f[r][free];
        basis.push_back(clear_denominators(v, m.order()));
    }
    // one kernel vector per row
    MorphismMatrix k(basis.size(), m.cols(), m.order());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) k(i, j) = basis[i][j];
    return k;
}

inline MorphismMatrix transpose(const MorphismMatrix& m)
{
    MorphismMatrix t(m.cols(), m.rows(), m.order());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

/// Rows v with v M = 0.
inline MorphismMatrix left_kernel(const MorphismMatrix& m) { return right_kernel(transpose(m)); }

/// Extends `rows` by standard basis vectors (lowest index first) to a square matrix of full rank.
/// The new rows are inserted before (`prepend`) or after the given ones.
inline MorphismMatrix complete_with_unit_rows(const MorphismMatrix& rows, std::size_t n, bool prepend)
{
    MorphismMatrix extra(0, n, rows.order());
    std::size_t need = n - rows.rows();
    for (std::size_t i = 0; i < n && extra.rows() < need; ++i) {
        MorphismMatrix e(1, n, rows.order());
        e(0, i) = Endomorphism(1, 0, rows.order());
        MorphismMatrix trial = vstack(vstack(extra, e), rows);
        if (rank(trial) == trial.rows()) extra = vstack(extra, e);
    }
    if (extra.rows() != need) raise(ErrorCode::RankDeficient, "rows cannot be completed to full rank");
    return prepend ? vstack(extra, rows) : vstack(rows, extra);
}

// ---------------------------------------------------------------------------
// Gauss block decompositions of a (d1+d2+1) x ((d1+1)+(d2+1)) matrix phi = (A|B)

enum class BlockShape { BlockLower, BlockUpper, LeftScaledIdentity, RightScaledIdentity };

inline std::string_view to_string(BlockShape s)
{
    switch (s) {
    case BlockShape::BlockLower: return "block-lower";
    case BlockShape::BlockUpper: return "block-upper";
    case BlockShape::LeftScaledIdentity: return "left-scaled-identity";
    case BlockShape::RightScaledIdentity: return "right-scaled-identity";
    }
    return "?";
}

struct GaussDecomposition {
    BlockShape shape = BlockShape::BlockLower;
    MorphismMatrix delta;
    MorphismMatrix product; // delta * phi
    std::map<std::string, MorphismMatrix> blocks;
    // Scaled forms: columns of phi listed in block order, i.e. (aI | l) reads
    // product.columns(column_order). Identity for the block forms.
    std::vector<std::size_t> column_order;
    Endomorphism scale; // a or b for scaled forms
};

struct GaussCase {
    int case_number = 0; // 1: block forms, 2: scaled forms
    std::size_t rank_a = 0;
    std::size_t rank_b = 0;
    std::vector<GaussDecomposition> forms;
};

namespace detail {

inline std::vector<std::size_t> range(std::size_t first, std::size_t last)
{
    std::vector<std::size_t> v;
    for (std::size_t i = first; i < last; ++i) v.push_back(i);
    return v;
}

/// delta = a * M^{-1} with a the least positive integer making delta integral.
inline std::pair<MorphismMatrix, std::int64_t> scaled_inverse(const MorphismMatrix& m)
{
    std::size_t n = m.rows();
    FieldMatrix aug = to_field(m);
    for (std::size_t i = 0; i < n; ++i) {
        aug[i].resize(2 * n, QuadRational(mpq_class(0), mpq_class(0), m.order()));
        aug[i][n + i] = QuadRational(mpq_class(1), mpq_class(0), m.order());
    }
    auto piv = rref(aug);
    if (piv.size() < n || piv[n - 1] >= n) raise(ErrorCode::RankDeficient, "singular block in scaled form");
    mpz_class l = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = n; j < 2 * n; ++j) {
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), aug[i][j].a.get_den_mpz_t());
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), aug[i][j].b.get_den_mpz_t());
        }
    if (!l.fits_slong_p()) raise(ErrorCode::Overflow, "scale factor");
    MorphismMatrix d(n, n, m.order());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            mpz_class a(aug[i][n + j].a * l), b(aug[i][n + j].b * l);
            d(i, j) = Endomorphism(a.get_si(), m.order() == Order::Z ? 0 : b.get_si(), m.order());
        }
    return {d, l.get_si()};
}

/// Picks `take` columns from `pool` (lexicographically first choice, scanning
/// subsets that drop later columns first) such that `fixed` + chosen has full rank.
inline std::vector<std::size_t> choose_columns(const MorphismMatrix& phi, const std::vector<std::size_t>& fixed,
                                               const std::vector<std::size_t>& pool, std::size_t take)
{
    std::vector<bool> mask(pool.size(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(take), true);
    do {
        std::vector<std::size_t> cols = fixed;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (mask[i]) cols.push_back(pool[i]);
        if (rank(phi.columns(cols)) == cols.size()) return cols;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    raise(ErrorCode::NoCaseApplies, "no invertible column selection for scaled form");
}

} // namespace detail

/// Declared-shape check: exact comparison of delta*phi against the block pattern.
inline bool verify_shape(const GaussDecomposition& dec, const MorphismMatrix& phi, std::size_t d1, std::size_t d2)
{
    MorphismMatrix prod = dec.delta * phi;
    if (prod != dec.product) return false;
    if (determinant(dec.delta).is_zero()) return false;
    std::size_t n = d1 + d2 + 1;
    auto is_zero_block = [&](std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc) {
        for (std::size_t i = r0; i < r0 + nr; ++i)
            for (std::size_t j = c0; j < c0 + nc; ++j)
                if (!prod(i, j).is_zero()) return false;
        return true;
    };
    switch (dec.shape) {
    case BlockShape::BlockLower:
        return is_zero_block(0, d1 + 1, d1 + 1, d2 + 1)
               && rank(prod.submatrix(detail::range(0, d1 + 1), detail::range(0, d1 + 1))) == d1 + 1;
    case BlockShape::BlockUpper:
        return is_zero_block(d1, d2 + 1, 0, d1 + 1)
               && rank(prod.submatrix(detail::range(d1, n), detail::range(d1 + 1, n + 1))) == d2 + 1;
    case BlockShape::LeftScaledIdentity:
    case BlockShape::RightScaledIdentity: {
        if (dec.scale.is_zero()) return false;
        MorphismMatrix ordered = prod.columns(dec.column_order);
        std::size_t off = dec.shape == BlockShape::LeftScaledIdentity ? 0 : 1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Endomorphism want = i == j ? dec.scale : Endomorphism(0, 0, phi.order());
                if (ordered(i, j + off) != want) return false;
            }
        // scaled forms only permute columns inside the A block and inside the B block
        std::vector<std::size_t> a_cols, b_cols;
        for (auto c : dec.column_order) (c <= d1 ? a_cols : b_cols).push_back(c);
        return a_cols.size() == d1 + 1 && b_cols.size() == d2 + 1;
    }
    }
    return false;
}

/// Case analysis for phi = (A|B) with rank(phi) = d1 + d2 + 1 (A = first d1+1 columns).
inline GaussCase gauss_block_decompose(const MorphismMatrix& phi, std::size_t d1, std::size_t d2)
{
    std::size_t n = d1 + d2 + 1;
    if (phi.rows() != n || phi.cols() != n + 1)
        raise(ErrorCode::DimensionMismatch, "expected a (d1+d2+1) x (d1+d2+2) matrix");
    if (rank(phi) < n) raise(ErrorCode::RankDeficient, "rank(phi) < d1 + d2 + 1");

    auto a_cols = detail::range(0, d1 + 1);
    auto b_cols = detail::range(d1 + 1, n + 1);
    MorphismMatrix a = phi.columns(a_cols), b = phi.columns(b_cols);
    GaussCase out;
    out.rank_a = rank(a);
    out.rank_b = rank(b);

    auto finish = [&](GaussDecomposition dec) {
        dec.product = dec.delta * phi;
        if (dec.column_order.empty()) dec.column_order = detail::range(0, n + 1);
        if (!verify_shape(dec, phi, d1, d2)) raise(ErrorCode::VerificationFailed, "Gauss decomposition shape");
        return dec;
    };

    if (out.rank_b == d2) {
        out.case_number = 1;
        GaussDecomposition dec;
        dec.shape = BlockShape::BlockLower;
        dec.delta = complete_with_unit_rows(left_kernel(b), n, false);
        dec = finish(dec);
        dec.blocks["phi1"] = dec.product.submatrix(detail::range(0, d1 + 1), a_cols);
        dec.blocks["0"] = dec.product.submatrix(detail::range(0, d1 + 1), b_cols);
        dec.blocks["*"] = dec.product.submatrix(detail::range(d1 + 1, n), a_cols);
        dec.blocks["phi2"] = dec.product.submatrix(detail::range(d1 + 1, n), b_cols);
        out.forms.push_back(std::move(dec));
    } else if (out.rank_a == d1) {
        out.case_number = 1;
        GaussDecomposition dec;
        dec.shape = BlockShape::BlockUpper;
        dec.delta = complete_with_unit_rows(left_kernel(a), n, true);
        dec = finish(dec);
        dec.blocks["phi1"] = dec.product.submatrix(detail::range(0, d1), a_cols);
        dec.blocks["*"] = dec.product.submatrix(detail::range(0, d1), b_cols);
        dec.blocks["0"] = dec.product.submatrix(detail::range(d1, n), a_cols);
        dec.blocks["phi2"] = dec.product.submatrix(detail::range(d1, n), b_cols);
        out.forms.push_back(std::move(dec));
    } else if (out.rank_a == d1 + 1 && out.rank_b == d2 + 1) {
        out.case_number = 2;
        {
            GaussDecomposition dec;
            dec.shape = BlockShape::LeftScaledIdentity;
            auto cols = detail::choose_columns(phi, a_cols, b_cols, d2);
            auto [delta, scale] = detail::scaled_inverse(phi.columns(cols));
            for (auto c : b_cols)
                if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
            dec.delta = delta;
            dec.scale = Endomorphism(scale, 0, phi.order());
            dec.column_order = cols;
            dec = finish(dec);
            dec.blocks["aI"] = dec.product.columns(std::vector<std::size_t>(cols.begin(), cols.begin() + n));
            dec.blocks["l"] = dec.product.columns({cols.back()});
            out.forms.push_back(std::move(dec));
        }
        {
            GaussDecomposition dec;
            dec.shape = BlockShape::RightScaledIdentity;
            // the dropped A column goes in front: (l' | bI)
            // A columns are chosen jointly with all of B; B has full column rank,
            // so d1 columns of A complete it to a basis
            auto with_b = detail::choose_columns(phi, b_cols, a_cols, d1);
            std::vector<std::size_t> chosen(with_b.begin() + static_cast<std::ptrdiff_t>(b_cols.size()), with_b.end());
            for (auto c : b_cols) chosen.push_back(c);
            auto [delta, scale] = detail::scaled_inverse(phi.columns(chosen));
            std::size_t dropped = 0;
            for (auto c : a_cols)
                if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) dropped = c;
            std::vector<std::size_t> order{dropped};
            order.insert(order.end(), chosen.begin(), chosen.end());
            dec.delta = delta;
            dec.scale = Endomorphism(scale, 0, phi.order());
            dec.column_order = order;
            dec = finish(dec);
            dec.blocks["l'"] = dec.product.columns({dropped});
            dec.blocks["bI"] = dec.product.columns(chosen);
            out.forms.push_back(std::move(dec));
        }
    } else {
        // rank(A) >= d1 and rank(B) >= d2 always hold, so one branch above is taken
        raise(ErrorCode::NoCaseApplies, "Gauss case analysis is not exhaustive");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hermite normal form over the Euclidean orders Z, Z[i], Z[w]

namespace detail {

/// Canonical associate: the unit multiple with lexicographically largest (a, b).
inline Endomorphism normalize_unit(const Endomorphism& x, Endomorphism* unit_out = nullptr)
{
    Endomorphism best = x;
    Endomorphism best_u(1, 0, x.order);
    for (auto& u : units(x.order)) {
        Endomorphism c = u * x;
        if (std::tie(c.a, c.b) > std::tie(best.a, best.b)) {
            best = c;
            best_u = u;
        }
    }
    if (unit_out) *unit_out = best_u;
    return best;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// Quotient q with x - q*p in the canonical residue system of End(E)/(p).
inline Endomorphism canonical_quotient(const Endomorphism& x, const Endomorphism& p)
{
    Order o = common_order(x.order, p.order);
    if (o == Order::Z) return Endomorphism(floor_div(x.a, p.a));
    // Z-basis of the ideal pO: p and p*w, brought to a 2x2 upper triangular HNF
    Endomorphism pw = p * Endomorphism::gen(o);
    std::int64_t r1a = p.a, r1b = p.b, r2a = pw.a, r2b = pw.b;
    while (r2a != 0) {
        std::int64_t q = floor_div(r1a, r2a);
        r1a = sub(r1a, mul(q, r2a));
        r1b = sub(r1b, mul(q, r2b));
        std::swap(r1a, r2a);
        std::swap(r1b, r2b);
    }
    if (r1a < 0) { r1a = -r1a; r1b = -r1b; }
    if (r2b < 0) { r2b = -r2b; }
    r1b = r1b - mul(floor_div(r1b, r2b), r2b);
    std::int64_t xa = x.a, xb = x.b;
    std::int64_t k1 = floor_div(xa, r1a);
    xa = sub(xa, mul(k1, r1a));
    xb = sub(xb, mul(k1, r1b));
    std::int64_t k2 = floor_div(xb, r2b);
    xb = sub(xb, mul(k2, r2b));
    Endomorphism residue(xa, xb, o);
    QuadRational q = to_field(x - residue) / to_field(p);
    if (q.a.get_den() != 1 || q.b.get_den() != 1) raise(ErrorCode::VerificationFailed, "non-integral residue quotient");
    return Endomorphism(q.a.get_num().get_si(), q.b.get_num().get_si(), o);
}

} // namespace detail

/// Row-style Hermite normal form: H = U*M with U invertible over End(E); zero rows trail.
inline MorphismMatrix hermite_form(const MorphismMatrix& m, std::vector<std::size_t>* pivots = nullptr)
{
    MorphismMatrix h = m;
    std::size_t rows = h.rows(), cols = h.cols();
    auto row_axpy = [&](std::size_t dst, const Endomorphism& q, std::size_t src) {
        for (std::size_t j = 0; j < cols; ++j) h(dst, j) -= q * h(src, j);
    };
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        while (true) {
            std::size_t best = rows;
            for (std::size_t i = r; i < rows; ++i)
                if (!h(i, c).is_zero() && (best == rows || h(i, c).norm2() < h(best, c).norm2())) best = i;
            if (best == rows) break;
            if (best != r)
                for (std::size_t j = 0; j < cols; ++j) std::swap(h(best, j), h(r, j));
            bool done = true;
            for (std::size_t i = r + 1; i < rows; ++i) {
                if (h(i, c).is_zero()) continue;
                row_axpy(i, euclid_quotient(h(i, c), h(r, c)), r);
                if (!h(i, c).is_zero()) done = false;
            }
            if (done) break;
        }
        if (h(r, c).is_zero()) continue;
        Endomorphism u;
        detail::normalize_unit(h(r, c), &u);
        for (std::size_t j = 0; j < cols; ++j) h(r, j) = u * h(r, j);
        for (std::size_t i = 0; i < r; ++i) row_axpy(i, detail::canonical_quotient(h(i, c), h(r, c)), r);
        if (pivots) pivots->push_back(c);
        ++r;
    }
    return h;
}

/// Ring elements of squared norm at most `bound2`, in a fixed order.
inline std::vector<Endomorphism> elements_up_to(Order o, std::int64_t bound2)
{
    std::vector<Endomorphism> out;
    std::int64_t lim = 0;
    while ((lim + 1) * (lim + 1) <= 4 * bound2 + 4) ++lim;
    for (std::int64_t a = -lim; a <= lim; ++a) {
        if (o == Order::Z) {
            if (a * a <= bound2) out.emplace_back(a);
            continue;
        }
        for (std::int64_t b = -lim; b <= lim; ++b) {
            Endomorphism e(a, b, o);
            if (e.norm2() <= bound2) out.push_back(e);
        }
    }
    return out;
}

namespace detail {

/// Ordering key for entries: nonzero before zero, then smaller norm, then positive first.
inline std::tuple<int, std::int64_t, std::int64_t, std::int64_t> entry_key(const Endomorphism& e)
{
    return {e.is_zero() ? 1 : 0, e.norm2(), -e.a, -e.b};
}

inline bool rep_less(const MorphismMatrix& x, const MorphismMatrix& y)
{
    if (x.norm2() != y.norm2()) return x.norm2() < y.norm2();
    auto nnz = [](const MorphismMatrix& m) {
        return std::count_if(m.entries().begin(), m.entries().end(), [](const Endomorphism& e) { return !e.is_zero(); });
    };
    if (nnz(x) != nnz(y)) return nnz(x) < nnz(y);
    const auto &ex = x.entries(), &ey = y.entries();
    for (std::size_t i = 0; i < ex.size(); ++i) {
        auto kx = entry_key(ex[i]), ky = entry_key(ey[i]);
        if (kx != ky) return kx < ky;
    }
    return false;
}

inline std::vector<std::int64_t> matrix_key(const MorphismMatrix& m)
{
    std::vector<std::int64_t> k;
    k.reserve(2 * m.entries().size());
    for (auto& e : m.entries()) {
        k.push_back(e.a);
        k.push_back(e.b);
    }
    return k;
}

} // namespace detail

/// Canonical left-equivalence classes of full-rank r x g matrices having a member with |F| <= bound.
/// Each class is represented by its smallest member under (|F|, sparsity, entry order).
/// The list is materialized once; streams may restart at any index.
class HermiteEnumeration {
public:
    HermiteEnumeration() = default;
    explicit HermiteEnumeration(std::shared_ptr<const std::vector<MorphismMatrix>> reps) : reps_(std::move(reps)) {}

    std::size_t size() const { return reps_ ? reps_->size() : 0; }
    const MorphismMatrix& operator[](std::size_t i) const { return (*reps_)[i]; }
    auto begin() const { return reps_->begin(); }
    auto end() const { return reps_->end(); }
    /// Stream restarted at `index`.
    std::vector<MorphismMatrix> from(std::size_t index) const
    {
        if (!reps_ || index >= reps_->size()) return {};
        return {reps_->begin() + static_cast<std::ptrdiff_t>(index), reps_->end()};
    }

private:
    std::shared_ptr<const std::vector<MorphismMatrix>> reps_ = std::make_shared<std::vector<MorphismMatrix>>();
};

inline constexpr std::uint64_t kHermiteCandidateBudget = 50'000'000;

inline HermiteEnumeration hermite_enumerate(std::size_t r, std::size_t g, double bound, Order order = Order::Z)
{
    if (r < 1 || r > g) raise(ErrorCode::ConfigError, "hermite_enumerate requires 1 <= r <= g");
    if (!(bound > 0)) return HermiteEnumeration();
    auto bound2 = static_cast<std::int64_t>(std::floor(bound * bound + 1e-9));

    using Key = std::tuple<Order, std::size_t, std::size_t, std::int64_t>;
    static std::mutex cache_mutex;
    static std::map<Key, std::shared_ptr<const std::vector<MorphismMatrix>>> cache;
    Key key{order, r, g, bound2};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) return HermiteEnumeration(it->second);
    }

    auto elems = elements_up_to(order, bound2);
    std::size_t cells = r * g;
    double total = std::pow(static_cast<double>(elems.size()), static_cast<double>(cells));
    if (total > static_cast<double>(kHermiteCandidateBudget))
        raise(ErrorCode::BudgetExceeded, "Hermite enumeration candidate count " + std::to_string(total));

    std::map<std::vector<std::int64_t>, MorphismMatrix> classes;
    std::vector<std::size_t> idx(cells, 0);
    MorphismMatrix m(r, g, order);
    while (true) {
        for (std::size_t c = 0; c < cells; ++c) m(c / g, c % g) = elems[idx[c]];
        std::vector<std::size_t> piv;
        MorphismMatrix h = hermite_form(m, &piv);
        if (piv.size() == r) {
            auto k = detail::matrix_key(h);
            auto it = classes.find(k);
            if (it == classes.end())
                classes.emplace(std::move(k), m);
            else if (detail::rep_less(m, it->second))
                it->second = m;
        }
        std::size_t c = 0;
        while (c < cells && ++idx[c] == elems.size()) idx[c++] = 0;
        if (c == cells) break;
    }
    auto reps = std::make_shared<std::vector<MorphismMatrix>>();
    for (auto& [k, rep] : classes) reps->push_back(rep);
    std::sort(reps->begin(), reps->end(), detail::rep_less);

    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, reps);
    return HermiteEnumeration(reps);
}

// ---------------------------------------------------------------------------

/// Square matrix f = (phi ; K) with det f != 0 whose trailing rows K are the
/// conjugated integral kernel basis of phi, so f(ker phi) lands in 0 x E^{g-g'}.
inline MorphismMatrix complement_to_isogeny(const MorphismMatrix& phi)
{
    if (rank(phi) < phi.rows()) raise(ErrorCode::NotSurjective, "rank(phi) < number of rows");
    MorphismMatrix kernel = right_kernel(phi);
    MorphismMatrix k(kernel.rows(), kernel.cols(), phi.order());
    for (std::size_t i = 0; i < kernel.rows(); ++i)
        for (std::size_t j = 0; j < kernel.cols(); ++j) k(i, j) = kernel(i, j).conj();
    MorphismMatrix f = vstack(phi, k);
    if (determinant(f).is_zero()) raise(ErrorCode::VerificationFailed, "complement is not an isogeny");
    return f;
}

} // namespace ellsplit
