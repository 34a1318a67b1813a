#include <newstopics/analysis.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace newstopics;
using Dists = std::vector<TopicDistribution>;

namespace {

double dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

/// Model over words {apple, berry, cherry, date} with explicit lambda rows.
LdaModel handmade(std::vector<std::vector<double>> rows) {
    auto dict = std::make_shared<const Dictionary>(std::vector<std::string>{"apple", "berry", "cherry", "date"},
                                                   std::vector<std::uint32_t>{1, 1, 1, 1});
    std::vector<double> lambda;
    for (const auto& r : rows) lambda.insert(lambda.end(), r.begin(), r.end());
    return LdaModel(LdaParams(rows.size()), dict, lambda, 0);
}

}  // namespace

TEST(TopicShares, Counting) {
    const auto s = dominant_topic_shares(Dists{{{0.9, 0.1, 0.0}}, {{0.6, 0.3, 0.1}}, {{0.2, 0.7, 0.1}}});
    EXPECT_EQ(s.counts, (std::vector<std::size_t>{2, 1, 0}));
    EXPECT_NEAR(s.proportions[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(s.proportions[1], 1.0 / 3.0, 1e-15);
    EXPECT_EQ(s.proportions[2], 0.0);
}

TEST(TopicShares, UniformGoesToTopicZero) {
    const auto s = dominant_topic_shares(Dists(4, {{0.25, 0.25, 0.25, 0.25}}));
    EXPECT_EQ(s.proportions[0], 1.0);
}

TEST(TopicShares, EmptyInput) { EXPECT_THROW(dominant_topic_shares(Dists{}), ArgumentError); }

TEST(Representatives, MaxWithinGroup) {
    const std::vector<DocumentTopics> docs = {{"A", {{0.9, 0.1}}}, {"B", {{0.6, 0.4}}}};
    const auto r = representative_documents(docs);
    ASSERT_TRUE(r[0]);
    EXPECT_EQ(r[0]->doc_id, "A");
    EXPECT_EQ(r[0]->probability, 0.9);
    EXPECT_FALSE(r[1]);
}

TEST(Representatives, TieGoesToTopicZero) {
    const auto r = representative_documents(std::vector<DocumentTopics>{{"only", {{0.5, 0.5}}}});
    ASSERT_TRUE(r[0]);
    EXPECT_EQ(r[0]->doc_id, "only");
    EXPECT_FALSE(r[1]);
}

TEST(Representatives, ProbabilityDominatesItsGroup) {
    const std::vector<DocumentTopics> docs = {
        {"a", {{0.5, 0.3, 0.2}}}, {"b", {{0.7, 0.2, 0.1}}}, {"c", {{0.1, 0.8, 0.1}}}, {"d", {{0.2, 0.6, 0.2}}}};
    const auto r = representative_documents(docs);
    for (std::size_t k = 0; k < 3; ++k) {
        if (!r[k]) continue;
        for (const auto& d : docs)
            if (dominant_topic(d.dist) == k) {
                EXPECT_GE(r[k]->probability, d.dist[k]);
            }
    }
    EXPECT_EQ(r[0]->doc_id, "b");
    EXPECT_EQ(r[1]->doc_id, "c");
}

TEST(KeywordTopics, SingleTopicWord) {
    // "date" only carries weight in topic 1.
    const auto m = handmade({{10, 10, 10, 1e-9}, {1e-9, 5, 5, 10}, {10, 1e-9, 10, 1e-9}});
    EXPECT_EQ(keyword_topics(m, "date"), (std::vector<std::size_t>{1}));
    EXPECT_EQ(keyword_topics(m, "cherry"), (std::vector<std::size_t>{2, 0, 1}));
    EXPECT_EQ(keyword_topics(m, "date", 0.0).size(), 3u);
}

TEST(KeywordTopics, UnknownToken) {
    const auto m = handmade({{1, 1, 1, 1}, {1, 2, 3, 4}});
    try {
        keyword_topics(m, "kiwi");
        FAIL();
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown token"), std::string::npos);
    }
}

TEST(KeywordTopics, CsvLeavesUnknownWordsEmpty) {
    const auto m = handmade({{10, 10, 10, 1e-9}, {1e-9, 5, 5, 10}});
    const std::vector<std::string> words = {"date", "kiwi"};
    EXPECT_EQ(keyword_topics_csv(m, words, 0.001), "keyword,topics\ndate,1\nkiwi,\n");
}

TEST(TopicTermsCsv, Layout) {
    const auto m = handmade({{4, 3, 2, 1}, {1, 2, 3, 4}});
    EXPECT_EQ(topic_terms_csv(m, 2), "topic,rank,token,probability\n0,1,apple,0.4\n0,2,berry,0.3\n1,1,date,0.4\n1,2,cherry,0.3\n");
}

TEST(JensenShannon, Properties) {
    const std::vector<double> p = {0.5, 0.5, 0, 0}, q = {0, 0, 0.5, 0.5}, r = {0.1, 0.2, 0.3, 0.4};
    EXPECT_NEAR(jensen_shannon(p, q), std::log(2.0), 1e-15);
    EXPECT_EQ(jensen_shannon(r, r), 0.0);
    EXPECT_EQ(jensen_shannon(p, r), jensen_shannon(r, p));
    EXPECT_LE(jensen_shannon(p, r), std::log(2.0));
    EXPECT_GT(jensen_shannon(p, r), 0.0);
}

TEST(Mds, EquilateralTriangle) {
    const std::vector<std::vector<double>> d = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    const auto e = classical_mds(d);
    EXPECT_NEAR(dist2(e.coords[0], e.coords[1]), 1.0, 1e-9);
    EXPECT_NEAR(dist2(e.coords[1], e.coords[2]), 1.0, 1e-9);
    EXPECT_NEAR(dist2(e.coords[0], e.coords[2]), 1.0, 1e-9);
    EXPECT_NEAR(e.stress, 0.0, 1e-9);
}

TEST(Mds, PlanarPointsRecoveredUpToRigidMotion) {
    const std::vector<std::array<double, 2>> pts = {{0, 0}, {3, 0}, {0, 4}, {1, 1}, {2, 5}};
    std::vector<std::vector<double>> d(5, std::vector<double>(5));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) d[i][j] = dist2(pts[i], pts[j]);
    const auto e = classical_mds(d);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(dist2(e.coords[i], e.coords[j]), d[i][j], 1e-9);

    // Reordering the input permutes the embedding rigidly.
    const std::vector<std::size_t> perm = {3, 0, 4, 2, 1};
    std::vector<std::vector<double>> dp(5, std::vector<double>(5));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) dp[i][j] = d[perm[i]][perm[j]];
    const auto ep = classical_mds(dp);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            EXPECT_NEAR(dist2(ep.coords[i], ep.coords[j]), dist2(e.coords[perm[i]], e.coords[perm[j]]), 1e-9);
    EXPECT_NEAR(ep.stress, e.stress, 1e-12);
}

TEST(Mds, NothingToEmbed) { EXPECT_THROW(classical_mds({{0}}), ArgumentError); }

TEST(TopicOverview, IdenticalRowsCoincide) {
    const auto m = handmade({{1, 2, 3, 4}, {1, 2, 3, 4}, {4, 3, 2, 1}});
    const auto ov = topic_overview(m, Dists{{{0.2, 0.3, 0.5}}});
    EXPECT_EQ(ov.distance[0][1], 0.0);
    EXPECT_NEAR(dist2(ov.coords[0], ov.coords[1]), 0.0, 1e-9);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(ov.distance[i][i], 0.0);
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(ov.distance[i][j], ov.distance[j][i]);
    }
    const auto j = to_json(ov);
    EXPECT_EQ(j.at("coords").size(), 3u);
    EXPECT_EQ(j.at("shares"), nlohmann::json({0.0, 0.0, 1.0}));
}

TEST(TopicOverview, SingleTopic) {
    const auto m = handmade({{1, 2, 3, 4}});
    EXPECT_THROW(topic_overview(m, Dists{{{1.0}}}), ArgumentError);
}
