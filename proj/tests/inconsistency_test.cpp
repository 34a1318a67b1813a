#include <newstopics/inconsistency.hpp>

#include <gtest/gtest.h>

using namespace newstopics;
using Dists = std::vector<TopicDistribution>;

namespace {

InconsistencyRecord rec(double s, std::size_t article_topic = 0) {
    InconsistencyRecord r;
    r.news_id = "n";
    r.similarity = s;
    r.article_dominant = article_topic;
    return r;
}

Document doc(std::string id, std::string news, DocKind kind) {
    Document d;
    d.doc_id = std::move(id);
    d.news_id = std::move(news);
    d.kind = kind;
    d.text = "x";
    return d;
}

}  // namespace

TEST(ThreadSimilarity, IdenticalDistributions) {
    const ThreadGroup g{"1", {{0.2, 0.5, 0.3}}, {{{0.1, 0.6, 0.3}}, {{0.3, 0.4, 0.3}}}};
    EXPECT_NEAR(thread_similarity(g).similarity, 1.0, 1e-12);
}

TEST(ThreadSimilarity, Orthogonal) {
    const ThreadGroup g{"1", {{1.0, 0.0}}, {{{0.0, 1.0}}}};
    const auto r = thread_similarity(g);
    EXPECT_EQ(r.similarity, 0.0);
    EXPECT_EQ(r.article_dominant, 0u);
    EXPECT_EQ(r.comments_dominant, 1u);
    EXPECT_EQ(r.n_comments, 1u);
}

TEST(ThreadSimilarity, AggregationModesDiffer) {
    const ThreadGroup g{"1", {{0.5, 0.5}}, {{{1.0, 0.0}}, {{0.0, 1.0}}}};
    EXPECT_NEAR(thread_similarity(g, CommentAggregation::MeanDistribution).similarity, 1.0, 1e-12);
    EXPECT_NEAR(thread_similarity(g, CommentAggregation::MeanSimilarity).similarity, std::sqrt(0.5), 1e-12);
}

TEST(ThreadSimilarity, OrderAndDuplicationInvariant) {
    const ThreadGroup g{"1", {{0.7, 0.2, 0.1}}, {{{0.1, 0.1, 0.8}}, {{0.3, 0.6, 0.1}}, {{0.5, 0.25, 0.25}}}};
    const double base = thread_similarity(g).similarity;
    auto reordered = g;
    std::reverse(reordered.comment_dists.begin(), reordered.comment_dists.end());
    EXPECT_NEAR(thread_similarity(reordered).similarity, base, 1e-12);
    auto doubled = g;
    for (const auto& c : g.comment_dists) doubled.comment_dists.push_back(c);
    EXPECT_NEAR(thread_similarity(doubled).similarity, base, 1e-12);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
}

TEST(ThreadSimilarity, NoComments) {
    EXPECT_THROW(thread_similarity(ThreadGroup{"1", {{1.0}}, {}}), ArgumentError);
}

TEST(GroupThreads, ExclusionsAreReported) {
    const std::vector<Document> docs = {
        doc("A1", "1", DocKind::Article), doc("C1a", "1", DocKind::Comment), doc("C1b", "1", DocKind::Comment),
        doc("A2", "2", DocKind::Article),                                      // no comments
        doc("C3", "3", DocKind::Comment),                                      // no article
        doc("A4", "4", DocKind::Article), doc("C4", "4", DocKind::Comment),    // article empty
        doc("A5", "5", DocKind::Article), doc("C5", "5", DocKind::Comment),    // comments empty
    };
    const TopicDistribution t{{0.5, 0.5}};
    const std::vector<std::optional<TopicDistribution>> dists = {t, t, std::nullopt, t, t, std::nullopt, t, t,
                                                                 std::nullopt};
    const auto g = group_threads(docs, dists);
    ASSERT_EQ(g.groups.size(), 1u);
    EXPECT_EQ(g.groups[0].news_id, "1");
    EXPECT_EQ(g.groups[0].comment_dists.size(), 1u);
    ASSERT_EQ(g.excluded.size(), 4u);
    EXPECT_EQ(g.excluded[0].reason, "no comments");
    EXPECT_EQ(g.excluded[1].reason, "no article");
    EXPECT_EQ(g.excluded[2].reason, "article empty after preprocessing");
    EXPECT_EQ(g.excluded[3].reason, "all comments empty after preprocessing");
}

TEST(Histogram, SingleBin) {
    const std::vector<InconsistencyRecord> r = {rec(1.0), rec(1.0)};
    const auto h = similarity_histogram(r, std::vector<double>{0, 0.6, 1});
    EXPECT_EQ(h.proportions, (std::vector<double>{0, 1}));
}

TEST(Histogram, TwoBinsRightOpen) {
    const std::vector<InconsistencyRecord> r = {rec(0.1), rec(0.7)};
    EXPECT_EQ(similarity_histogram(r, std::vector<double>{0, 0.6, 1}).counts, (std::vector<std::size_t>{1, 1}));
    const std::vector<InconsistencyRecord> edge = {rec(0.6), rec(0.0)};
    EXPECT_EQ(similarity_histogram(edge, std::vector<double>{0, 0.6, 1}).counts, (std::vector<std::size_t>{1, 1}));
}

TEST(Histogram, CountsSumToRecords) {
    std::vector<InconsistencyRecord> r;
    for (int i = 0; i <= 20; ++i) r.push_back(rec(i / 20.0));
    const auto h = similarity_histogram(r, std::vector<double>{0, 0.2, 0.4, 0.6, 0.8, 1.0});
    std::size_t total = 0;
    double p = 0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        total += h.counts[b];
        p += h.proportions[b];
    }
    EXPECT_EQ(total, r.size());
    EXPECT_NEAR(p, 1.0, 1e-12);
}

TEST(Histogram, BadEdges) {
    const std::vector<InconsistencyRecord> r = {rec(0.5)};
    EXPECT_THROW(similarity_histogram(r, std::vector<double>{0, 0.6, 0.4, 1}), ArgumentError);
    EXPECT_THROW(similarity_histogram(r, std::vector<double>{0.1, 1}), ArgumentError);
    EXPECT_THROW(similarity_histogram({}, std::vector<double>{0, 1}), ArgumentError);
}

TEST(Profile, IdenticalCompositionGivesOne) {
    const Dists all = {{{0.9, 0.1, 0.0}}, {{0.8, 0.2, 0.0}}, {{0.1, 0.9, 0.0}}, {{0.1, 0.1, 0.8}}};
    // Low set: topics 0, 0, 1, 2, same mix as all documents.
    const std::vector<InconsistencyRecord> r = {rec(0.1, 0), rec(0.2, 0), rec(0.3, 1), rec(0.4, 2), rec(0.9, 1)};
    const auto p = inconsistent_topic_profile(r, all, 0.6);
    EXPECT_EQ(p.n_low, 4u);
    EXPECT_NEAR(p.pearson_r, 1.0, 1e-12);
}

TEST(Profile, ConcentratedLowSet) {
    // Overall shares [1/3, 1/3, 1/3, 0], low shares [1, 0, 0, 0]: r = 1/3.
    const Dists all = {{{0.7, 0.1, 0.1, 0.1}}, {{0.1, 0.7, 0.1, 0.1}}, {{0.1, 0.1, 0.7, 0.1}}};
    const std::vector<InconsistencyRecord> r = {rec(0.2, 0), rec(0.3, 0), rec(0.95, 2)};
    const auto p = inconsistent_topic_profile(r, all, 0.6);
    EXPECT_NEAR(p.pearson_r, 1.0 / 3.0, 1e-12);
    EXPECT_LT(p.pearson_r, 0.5);
}

TEST(Profile, Errors) {
    const Dists all = {{{0.7, 0.3}}, {{0.2, 0.8}}};
    const std::vector<InconsistencyRecord> high = {rec(0.9)};
    try {
        inconsistent_topic_profile(high, all, 0.6);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(std::string(e.what()), "empty selection");
    }
    EXPECT_THROW(inconsistent_topic_profile(high, all, 1.0), ArgumentError);
    // Both share vectors [0.5, 0.5] vs [1, 0]: the first is constant.
    const std::vector<InconsistencyRecord> low = {rec(0.1, 0)};
    EXPECT_THROW(inconsistent_topic_profile(low, all, 0.6), DataError);
}

TEST(Export, RecordsCsv) {
    InconsistencyRecord r{"a,b", 0.25, 1, 2, 3};
    EXPECT_EQ(records_csv(std::vector<InconsistencyRecord>{r}),
              "news_id,similarity,article_dominant,comments_dominant,n_comments\n\"a,b\",0.25,1,2,3\n");
}
