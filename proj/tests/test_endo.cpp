#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ellsplit/endo.hpp"

using namespace ellsplit;

namespace {

// Oracle: determinant by cofactor expansion over the fraction field.
QuadRational cofactor_det(const std::vector<std::vector<QuadRational>>& m)
{
    std::size_t n = m.size();
    Order o = n ? m[0][0].order : Order::Z;
    if (n == 0) return QuadRational(mpq_class(1), mpq_class(0), o);
    if (n == 1) return m[0][0];
    QuadRational acc(mpq_class(0), mpq_class(0), o);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<QuadRational>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<QuadRational> row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != c) row.push_back(m[i][j]);
            minor.push_back(row);
        }
        QuadRational term = m[0][c] * cofactor_det(minor);
        acc = (c % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

QuadRational q(const Endomorphism& e) { return to_field(e); }

bool is_ring_element(const QuadRational& x) { return x.a.get_den() == 1 && x.b.get_den() == 1; }

// Oracle: M2 = D*M1 for D in GL_r(O). Solves for D with Cramer's rule on an
// invertible column selection, then checks integrality, the product and det(D) a unit.
bool cramer_left_equivalent(const MorphismMatrix& m1, const MorphismMatrix& m2)
{
    std::size_t r = m1.rows(), g = m1.cols();
    std::vector<std::size_t> sel(r);
    std::vector<bool> mask(g, false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(r), true);
    std::vector<std::vector<QuadRational>> a;
    QuadRational det;
    bool found = false;
    do {
        sel.clear();
        for (std::size_t j = 0; j < g; ++j)
            if (mask[j]) sel.push_back(j);
        a.assign(r, {});
        for (std::size_t i = 0; i < r; ++i)
            for (auto j : sel) a[i].push_back(q(m1(i, j)));
        det = cofactor_det(a);
        if (!det.is_zero()) found = true;
    } while (!found && std::prev_permutation(mask.begin(), mask.end()));
    if (!found) return false;
    // D * A = B  <=>  A^T D^T = B^T; solve column by column
    MorphismMatrix d(r, r, m1.order());
    for (std::size_t row = 0; row < r; ++row) {
        for (std::size_t k = 0; k < r; ++k) {
            // D[row][k] = det(A with row k replaced by B[row]) / det(A)
            auto ak = a;
            for (std::size_t t = 0; t < r; ++t) ak[k][t] = q(m2(row, sel[t]));
            QuadRational v = cofactor_det(ak) / det;
            if (!is_ring_element(v)) return false;
            d(row, k) = Endomorphism(v.a.get_num().get_si(), v.b.get_num().get_si(), m1.order());
        }
    }
    if (d * m1 != m2) return false;
    std::vector<std::vector<QuadRational>> dq(r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) dq[i].push_back(q(d(i, j)));
    QuadRational dd = cofactor_det(dq);
    return is_ring_element(dd) && dd.norm2() == 1;
}

// Oracle: all full-rank r x g matrices with entries of norm <= 1, grouped by pairwise equivalence.
std::size_t brute_force_class_count(std::size_t r, std::size_t g, Order o)
{
    auto elems = elements_up_to(o, 1);
    std::vector<MorphismMatrix> reps;
    std::vector<std::size_t> idx(r * g, 0);
    while (true) {
        MorphismMatrix m(r, g, o);
        for (std::size_t c = 0; c < r * g; ++c) m(c / g, c % g) = elems[idx[c]];
        if (rank(m) == r) {
            bool seen = false;
            for (auto& rep : reps)
                if (cramer_left_equivalent(rep, m)) {
                    seen = true;
                    break;
                }
            if (!seen) reps.push_back(m);
        }
        std::size_t c = 0;
        while (c < r * g && ++idx[c] == elems.size()) idx[c++] = 0;
        if (c == r * g) break;
    }
    return reps.size();
}

} // namespace

TEST(QuadArithmetic, EisensteinGeneratorRelation)
{
    Endomorphism w = Endomorphism::gen(Order::Eisenstein);
    EXPECT_EQ(w * w, Endomorphism(-1, -1, Order::Eisenstein));
    EXPECT_EQ(w * w * w, Endomorphism(1, 0, Order::Eisenstein));
    EXPECT_EQ(w.norm2(), 1);
    EXPECT_EQ(Endomorphism(2, 1, Order::Eisenstein).norm2(), 3); // |2 + w|^2 = 4 - 2 + 1
}

TEST(QuadArithmetic, GaussianNormIsMultiplicative)
{
    Endomorphism x(3, -2, Order::Gaussian), y(-1, 4, Order::Gaussian);
    EXPECT_EQ((x * y).norm2(), x.norm2() * y.norm2());
    EXPECT_EQ(x * x.conj(), Endomorphism(x.norm2(), 0, Order::Gaussian));
}

TEST(QuadArithmetic, IntegerScalarRejectsImaginaryPart)
{
    EXPECT_THROW(Endomorphism(1, 1, Order::Z), Error);
}

TEST(QuadArithmetic, OverflowIsReported)
{
    Endomorphism big(INT64_MAX / 2 + 1);
    try {
        (void)(big * Endomorphism(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Overflow);
    }
}

TEST(Rank, Examples)
{
    EXPECT_EQ(rank(MorphismMatrix::identity(4)), 4u);
    EXPECT_EQ(rank(MorphismMatrix::from_ints({{1, 2}, {2, 4}})), 1u);
    EXPECT_EQ(rank(MorphismMatrix::from_ints({{2, -1, 0}, {0, -11, 1}})), 2u);
}

TEST(Rank, OverGaussianIntegers)
{
    // rows (1, i) and (i, -1) are proportional over Q(i)
    MorphismMatrix m(2, 2, Order::Gaussian);
    m(0, 0) = Endomorphism(1, 0, Order::Gaussian);
    m(0, 1) = Endomorphism(0, 1, Order::Gaussian);
    m(1, 0) = Endomorphism(0, 1, Order::Gaussian);
    m(1, 1) = Endomorphism(-1, 0, Order::Gaussian);
    EXPECT_EQ(rank(m), 1u);
}

TEST(Rank, InvariantUnderInvertibleLeftMultiplication)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        MorphismMatrix m(3, 4);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = Endomorphism(entry(rng));
        MorphismMatrix delta(3, 3);
        do {
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) delta(i, j) = Endomorphism(entry(rng));
        } while (determinant(delta).is_zero());
        EXPECT_EQ(rank(delta * m), rank(m));
    }
}

TEST(Determinant, MatchesCofactorExpansion)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> entry(-4, 4);
    for (int trial = 0; trial < 50; ++trial) {
        MorphismMatrix m(4, 4, Order::Eisenstein);
        std::vector<std::vector<QuadRational>> f(4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                m(i, j) = Endomorphism(entry(rng), entry(rng), Order::Eisenstein);
                f[i].push_back(q(m(i, j)));
            }
        EXPECT_EQ(determinant(m), cofactor_det(f));
    }
}

TEST(Gauss, UnitRowIsCaseTwo)
{
    auto res = gauss_block_decompose(MorphismMatrix::from_ints({{1, 1}}), 0, 0);
    EXPECT_EQ(res.case_number, 2);
    ASSERT_EQ(res.forms.size(), 2u);
    for (auto& f : res.forms) {
        EXPECT_EQ(f.scale, Endomorphism(1));
        EXPECT_EQ(f.delta, MorphismMatrix::identity(1));
    }
    EXPECT_EQ(res.forms[0].shape, BlockShape::LeftScaledIdentity);
    EXPECT_EQ(res.forms[1].shape, BlockShape::RightScaledIdentity);
}

TEST(Gauss, DependentRightBlockGivesBlockLower)
{
    MorphismMatrix phi = MorphismMatrix::from_ints({{1, 2, 4}, {0, 1, 2}});
    auto res = gauss_block_decompose(phi, 0, 1);
    EXPECT_EQ(res.case_number, 1);
    ASSERT_EQ(res.forms.size(), 1u);
    auto& f = res.forms[0];
    EXPECT_EQ(f.shape, BlockShape::BlockLower);
    EXPECT_EQ(f.blocks.at("phi1"), MorphismMatrix::from_ints({{1}}));
    EXPECT_TRUE(f.blocks.at("0").is_zero());
    EXPECT_EQ(f.delta * phi, f.product);
    EXPECT_TRUE(verify_shape(f, phi, 0, 1));
}

TEST(Gauss, RightBlockWithZeroRowIsCaseOne)
{
    // B = [[0,0],[2,1]] has rank 1, so this is the block-lower case
    MorphismMatrix phi = MorphismMatrix::from_ints({{1, 0, 0}, {0, 2, 1}});
    auto res = gauss_block_decompose(phi, 0, 1);
    EXPECT_EQ(res.rank_b, 1u);
    EXPECT_EQ(res.case_number, 1);
    EXPECT_EQ(res.forms[0].shape, BlockShape::BlockLower);
    EXPECT_EQ(res.forms[0].product, phi);
}

TEST(Gauss, BothBlocksFullRankGivesScaledForms)
{
    MorphismMatrix phi = MorphismMatrix::from_ints({{1, 0, 1}, {0, 1, 1}});
    auto res = gauss_block_decompose(phi, 0, 1);
    EXPECT_EQ(res.case_number, 2);
    ASSERT_EQ(res.forms.size(), 2u);
    for (auto& f : res.forms) {
        EXPECT_FALSE(f.scale.is_zero());
        EXPECT_TRUE(verify_shape(f, phi, 0, 1));
    }
}

TEST(Gauss, ScaledFormNeedsColumnChoice)
{
    // dropping the last B column leaves a singular block; the decomposition picks another
    MorphismMatrix phi = MorphismMatrix::from_ints({{1, 1, 0}, {0, 0, 1}});
    auto res = gauss_block_decompose(phi, 0, 1);
    EXPECT_EQ(res.case_number, 2);
    for (auto& f : res.forms) EXPECT_TRUE(verify_shape(f, phi, 0, 1));
    EXPECT_EQ(res.forms[0].column_order, (std::vector<std::size_t>{0, 2, 1}));
}

TEST(Gauss, RightScaledColumnsAreChosenWithB)
{
    // column 0 alone is fine but parallel to the B column; column 1 must be used
    MorphismMatrix phi = MorphismMatrix::from_ints({{1, 0, 1}, {0, 1, 0}});
    auto res = gauss_block_decompose(phi, 1, 0);
    ASSERT_EQ(res.case_number, 2);
    ASSERT_EQ(res.forms.size(), 2u);
    for (auto& f : res.forms) EXPECT_TRUE(verify_shape(f, phi, 1, 0));
    EXPECT_EQ(res.forms[1].column_order, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Gauss, RankDeficientInputIsRejected)
{
    try {
        gauss_block_decompose(MorphismMatrix::from_ints({{1, 2, 3}, {2, 4, 6}}), 0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    }
}

TEST(Gauss, RandomMatricesOverGaussianIntegers)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> entry(-2, 2);
    int done = 0;
    while (done < 40) {
        std::size_t d1 = rng() % 2, d2 = rng() % 2, n = d1 + d2 + 1;
        MorphismMatrix phi(n, n + 1, Order::Gaussian);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= n; ++j) phi(i, j) = Endomorphism(entry(rng), entry(rng), Order::Gaussian);
        if (rank(phi) < n) continue;
        auto res = gauss_block_decompose(phi, d1, d2);
        for (auto& f : res.forms) EXPECT_TRUE(verify_shape(f, phi, d1, d2));
        ++done;
    }
}

TEST(Hermite, SingleEntryCollapsesUnits)
{
    auto e = hermite_enumerate(1, 1, 1.0);
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0], MorphismMatrix::from_ints({{1}}));
}

TEST(Hermite, RowsOfLengthTwo)
{
    auto e = hermite_enumerate(1, 2, 1.0);
    std::vector<MorphismMatrix> want{MorphismMatrix::from_ints({{1, 0}}), MorphismMatrix::from_ints({{0, 1}}),
                                     MorphismMatrix::from_ints({{1, 1}}), MorphismMatrix::from_ints({{1, -1}})};
    ASSERT_EQ(e.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(e[i], want[i]);
}

TEST(Hermite, ZeroBoundIsEmpty)
{
    EXPECT_EQ(hermite_enumerate(1, 3, 0.0).size(), 0u);
}

TEST(Hermite, ClassCountMatchesBruteForce)
{
    // frozen from the Cramer-rule oracle
    EXPECT_EQ(brute_force_class_count(2, 2, Order::Z), 2u);
    EXPECT_EQ(hermite_enumerate(2, 2, 1.0).size(), 2u);
    EXPECT_EQ(brute_force_class_count(2, 3, Order::Z), hermite_enumerate(2, 3, 1.0).size());
    EXPECT_EQ(brute_force_class_count(1, 2, Order::Gaussian), hermite_enumerate(1, 2, 1.0, Order::Gaussian).size());
    EXPECT_EQ(brute_force_class_count(1, 3, Order::Z), hermite_enumerate(1, 3, 1.0).size());
}

TEST(Hermite, RepresentativesArePairwiseInequivalent)
{
    auto e = hermite_enumerate(2, 3, 1.0);
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) EXPECT_FALSE(cramer_left_equivalent(e[i], e[j])) << e[i] << e[j];
}

TEST(Hermite, EisensteinRepresentativesArePairwiseInequivalent)
{
    auto e = hermite_enumerate(2, 2, 1.0, Order::Eisenstein);
    EXPECT_EQ(e.size(), brute_force_class_count(2, 2, Order::Eisenstein));
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) EXPECT_FALSE(cramer_left_equivalent(e[i], e[j]));
}

TEST(Hermite, LargerBoundIsSuperset)
{
    auto small = hermite_enumerate(2, 3, 1.0);
    auto large = hermite_enumerate(2, 3, 2.0);
    std::set<std::vector<std::int64_t>> keys;
    for (auto& m : large) keys.insert(detail::matrix_key(hermite_form(m)));
    for (auto& m : small) EXPECT_TRUE(keys.count(detail::matrix_key(hermite_form(m)))) << m;
}

TEST(Hermite, RestartFromIndex)
{
    auto e = hermite_enumerate(2, 4, 1.0);
    EXPECT_EQ(e[0], MorphismMatrix::from_ints({{1, 0, 0, 0}, {0, 1, 0, 0}}));
    auto tail = e.from(5);
    ASSERT_EQ(tail.size(), e.size() - 5);
    EXPECT_EQ(tail.front(), e[5]);
}

TEST(Hermite, FormIsLeftEquivalent)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> entry(-6, 6);
    for (Order o : {Order::Z, Order::Gaussian, Order::Eisenstein}) {
        for (int t = 0; t < 30; ++t) {
            MorphismMatrix m(2, 3, o);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    m(i, j) = Endomorphism(entry(rng), o == Order::Z ? 0 : entry(rng), o);
            if (rank(m) < 2) continue;
            EXPECT_TRUE(cramer_left_equivalent(m, hermite_form(m))) << m;
        }
    }
}

TEST(Complement, SumMap)
{
    auto f = complement_to_isogeny(MorphismMatrix::from_ints({{1, 1}}));
    EXPECT_EQ(f, MorphismMatrix::from_ints({{1, 1}, {1, -1}}));
    EXPECT_EQ(determinant(f), to_field(Endomorphism(-2)));
    // kernel generator (1,-1) lands in 0 x E
    auto img = f * MorphismMatrix::from_ints({{1}, {-1}});
    EXPECT_EQ(img, MorphismMatrix::from_ints({{0}, {2}}));
}

TEST(Complement, IdentityAndScaledCoordinate)
{
    EXPECT_EQ(complement_to_isogeny(MorphismMatrix::identity(3)), MorphismMatrix::identity(3));
    auto f = complement_to_isogeny(MorphismMatrix::from_ints({{2, 0}}));
    EXPECT_EQ(f, MorphismMatrix::from_ints({{2, 0}, {0, 1}}));
    EXPECT_EQ(f * MorphismMatrix::from_ints({{0}, {1}}), MorphismMatrix::from_ints({{0}, {1}}));
}

TEST(Complement, NotSurjective)
{
    try {
        complement_to_isogeny(MorphismMatrix::from_ints({{1, 2}, {2, 4}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotSurjective);
    }
}

TEST(Complement, RandomSurjectionsOverEisensteinIntegers)
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int t = 0; t < 30; ++t) {
        MorphismMatrix phi(2, 4, Order::Eisenstein);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 4; ++j) phi(i, j) = Endomorphism(entry(rng), entry(rng), Order::Eisenstein);
        if (rank(phi) < 2) continue;
        auto f = complement_to_isogeny(phi);
        EXPECT_FALSE(determinant(f).is_zero());
        EXPECT_EQ(f.row_block(0, 2), phi);
        // kernel vectors map into the trailing block
        auto k = right_kernel(phi);
        EXPECT_TRUE((phi * transpose(k)).is_zero());
    }
}
