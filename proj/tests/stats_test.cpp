#include <newstopics/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace newstopics;
using V = std::vector<double>;

namespace {

// The two topic-list pairs of the measure-selection experiment.
const V kPair1X = {1, 2, 0, 6, 3, 4, 5}, kPair1Y = {2, 1, 0, 6, 3, 4, 5};
const V kPair2X = {1, 6, 0, 2, 3, 4, 5}, kPair2Y = {6, 1, 0, 2, 3, 4, 5};

}  // namespace

TEST(MeasureComparison, Cosine) {
    EXPECT_NEAR(stats::cosine_similarity(kPair1X, kPair1Y), 0.989, 1e-3);
    EXPECT_NEAR(stats::cosine_similarity(kPair2X, kPair2Y), 0.725, 1e-3);
    // Exact values: 90/91 and 66/91.
    EXPECT_NEAR(stats::cosine_similarity(kPair1X, kPair1Y), 90.0 / 91.0, 1e-15);
    EXPECT_NEAR(stats::cosine_similarity(kPair2X, kPair2Y), 66.0 / 91.0, 1e-15);
}

TEST(MeasureComparison, Spearman) {
    EXPECT_NEAR(stats::spearman(kPair1X, kPair1Y), 0.964, 1e-3);
    EXPECT_NEAR(stats::spearman(kPair2X, kPair2Y), 0.107, 1e-3);
    // 1 - 6*sum(d^2)/(n(n^2-1)) with sum(d^2) = 2 and 50.
    EXPECT_NEAR(stats::spearman(kPair1X, kPair1Y), 1.0 - 12.0 / 336.0, 1e-12);
    EXPECT_NEAR(stats::spearman(kPair2X, kPair2Y), 1.0 - 300.0 / 336.0, 1e-12);
}

TEST(MeasureComparison, Kendall) {
    EXPECT_NEAR(stats::kendall_tau(kPair1X, kPair1Y), 0.905, 1e-3);
    EXPECT_NEAR(stats::kendall_tau(kPair2X, kPair2Y), 0.143, 1e-3);
    // (concordant - discordant) / 21 with 1 and 9 discordant pairs.
    EXPECT_NEAR(stats::kendall_tau(kPair1X, kPair1Y), 19.0 / 21.0, 1e-12);
    EXPECT_NEAR(stats::kendall_tau(kPair2X, kPair2Y), 3.0 / 21.0, 1e-12);
}

TEST(MeasureComparison, CosineIsTheMostStable) {
    const double dc = std::abs(stats::cosine_similarity(kPair1X, kPair1Y) - stats::cosine_similarity(kPair2X, kPair2Y));
    const double ds = std::abs(stats::spearman(kPair1X, kPair1Y) - stats::spearman(kPair2X, kPair2Y));
    const double dk = std::abs(stats::kendall_tau(kPair1X, kPair1Y) - stats::kendall_tau(kPair2X, kPair2Y));
    EXPECT_LT(dc, ds);
    EXPECT_LT(dc, dk);
}

TEST(Cosine, SelfAndScale) {
    const V x = {0.2, 0.5, 0.3};
    const V y = {0.6, 0.1, 0.3};
    EXPECT_NEAR(stats::cosine_similarity(x, x), 1.0, 1e-15);
    const V cx = {0.6, 1.5, 0.9};
    EXPECT_NEAR(stats::cosine_similarity(cx, y), stats::cosine_similarity(x, y), 1e-15);
    EXPECT_EQ(stats::cosine_similarity(x, y), stats::cosine_similarity(y, x));
}

TEST(Cosine, ZeroVector) { EXPECT_THROW(stats::cosine_similarity(V{0, 0}, V{1, 2}), DataError); }

TEST(Pearson, Examples) {
    const V x = {1, 2, 3, 4};
    V affine, neg;
    for (double v : x) {
        affine.push_back(2 * v + 3);
        neg.push_back(-v);
    }
    EXPECT_NEAR(stats::pearson(x, affine), 1.0, 1e-12);
    EXPECT_NEAR(stats::pearson(x, neg), -1.0, 1e-12);
    // Centered: (-1.5,-.5,.5,1.5) vs (-1.5,-.5,1.5,.5); 4 / sqrt(5*5) = 0.8.
    EXPECT_NEAR(stats::pearson(x, V{1, 2, 4, 3}), 0.8, 1e-12);
}

TEST(Pearson, ZeroVariance) {
    try {
        stats::pearson(V{1, 1, 1}, V{1, 2, 3});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("zero variance"), std::string::npos);
    }
}

TEST(Spearman, MonotoneAgreementAndTies) {
    EXPECT_NEAR(stats::spearman(V{1, 2, 3, 10}, V{-5, 0, 7, 8}), 1.0, 1e-12);
    EXPECT_EQ(stats::average_ranks(V{10, 20, 20, 5}), (V{2, 3.5, 3.5, 1}));
}

TEST(Kendall, FullDiscordance) {
    EXPECT_NEAR(stats::kendall_tau(V{1, 2, 3, 4, 5}, V{5, 4, 3, 2, 1}), -1.0, 1e-12);
}

TEST(RankMeasures, InvariantUnderIncreasingTransform) {
    const V x = {0.3, 1.2, -0.7, 2.5, 0.9, 1.1};
    const V y = {1.0, 0.2, 0.4, 3.0, -1.0, 0.5};
    V ex;
    for (double v : x) ex.push_back(std::exp(v) * 3 + 1);
    EXPECT_NEAR(stats::spearman(ex, y), stats::spearman(x, y), 1e-12);
    EXPECT_NEAR(stats::kendall_tau(ex, y), stats::kendall_tau(x, y), 1e-12);
}

TEST(AllMeasures, Symmetric) {
    const V x = {0.3, 1.2, -0.7, 2.5}, y = {1.0, 0.2, 0.4, 3.0};
    EXPECT_EQ(stats::pearson(x, y), stats::pearson(y, x));
    EXPECT_EQ(stats::spearman(x, y), stats::spearman(y, x));
    EXPECT_EQ(stats::kendall_tau(x, y), stats::kendall_tau(y, x));
}

TEST(AllMeasures, InputChecks) {
    EXPECT_THROW(stats::pearson(V{1, 2}, V{1, 2, 3}), ArgumentError);
    EXPECT_THROW(stats::spearman(V{1}, V{1}), ArgumentError);
    EXPECT_THROW(stats::kendall_tau(V{1, NAN}, V{1, 2}), ArgumentError);
}
