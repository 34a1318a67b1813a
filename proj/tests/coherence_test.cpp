#include "fixtures.hpp"
#include "oracles.hpp"

#include <newstopics/coherence.hpp>
#include <newstopics/diagnostics.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <boost/random/uniform_int_distribution.hpp>
#include <cmath>

using namespace newstopics;
using Docs = std::vector<std::vector<std::string>>;

namespace {

struct Quiet {
    std::vector<std::string> seen;
    ScopedWarningSink sink;
    Quiet() : sink(WarningSink([this](std::string_view m) { seen.emplace_back(m); })) {}
};

Docs random_corpus(Rng& rng, std::size_t max_tokens, std::size_t vocab) {
    boost::random::uniform_int_distribution<std::size_t> n_docs(2, 8), word(0, vocab - 1);
    Docs docs(n_docs(rng));
    std::size_t budget = max_tokens;
    for (auto& d : docs) {
        boost::random::uniform_int_distribution<std::size_t> len(0, std::min<std::size_t>(budget, 150));
        const auto n = len(rng);
        budget -= n;
        for (std::size_t i = 0; i < n; ++i) d.push_back("w" + std::to_string(word(rng)));
    }
    return docs;
}

}  // namespace

TEST(WindowCounts, SingleWindow) {
    const auto s = window_counts(Docs{{"a", "b"}}, {"a", "b"}, 2);
    EXPECT_EQ(s.n_windows(), 1u);
    EXPECT_EQ(s.occur("a"), 1u);
    EXPECT_EQ(s.occur("b"), 1u);
    EXPECT_EQ(s.co_occur("a", "b"), 1u);
}

TEST(WindowCounts, NeverCoWindowed) {
    const auto s = window_counts(Docs{{"a", "x", "b"}}, {"a", "b"}, 2);
    EXPECT_EQ(s.n_windows(), 2u);
    EXPECT_EQ(s.occur("a"), 1u);
    EXPECT_EQ(s.occur("b"), 1u);
    EXPECT_EQ(s.co_occur("a", "b"), 0u);
}

TEST(WindowCounts, BooleanPresenceInShortDocument) {
    const auto s = window_counts(Docs{std::vector<std::string>(110, "a")}, {"a"}, 110);
    EXPECT_EQ(s.n_windows(), 1u);
    EXPECT_EQ(s.occur("a"), 1u);
}

TEST(WindowCounts, EmptyDocumentsContributeNothing) {
    const auto s = window_counts(Docs{{}, {"a"}}, {"a"}, 3);
    EXPECT_EQ(s.n_windows(), 1u);
}

TEST(WindowCounts, Errors) {
    EXPECT_THROW(window_counts(Docs{}, {"a"}, 2), DataError);
    EXPECT_THROW(window_counts(Docs{{"a"}}, {"a"}, 0), ArgumentError);
}

TEST(WindowCounts, MatchesEnumerationAndMergeIsOrderFree) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto docs = random_corpus(rng, 600, 12);
        const std::vector<std::string> words = {"w0", "w1", "w2", "w3", "w11"};
        for (std::size_t window : {1u, 2u, 5u, 40u}) {
            const auto s = window_counts(docs, words, window);
            const auto wins = oracle::windows(docs, window);
            EXPECT_EQ(s.n_windows(), wins.size());
            for (const auto& a : words) {
                EXPECT_EQ(s.occur(a), static_cast<std::uint64_t>(std::count_if(
                                          wins.begin(), wins.end(), [&](const auto& w) { return w.count(a) > 0; })));
                for (const auto& b : words) {
                    if (a == b) continue;
                    const auto expect = std::count_if(wins.begin(), wins.end(),
                                                      [&](const auto& w) { return w.count(a) && w.count(b); });
                    EXPECT_EQ(s.co_occur(a, b), static_cast<std::uint64_t>(expect));
                }
            }
            // Splitting the corpus and merging partial counts in either order.
            const Docs first(docs.begin(), docs.begin() + 1), rest(docs.begin() + 1, docs.end());
            auto x = window_counts(first, words, window);
            auto y = window_counts(rest, words, window);
            auto xy = x;
            xy.merge(y);
            auto yx = y;
            yx.merge(x);
            for (const auto& a : words)
                for (const auto& b : words) {
                    EXPECT_EQ(xy.co_occur(a, b), s.co_occur(a, b));
                    EXPECT_EQ(yx.co_occur(a, b), s.co_occur(a, b));
                }
        }
    }
}

TEST(Npmi, PerfectAssociation) {
    // p(a) = p(b) = p(a,b) = 0.5
    const auto s = window_counts(Docs{{"a", "b"}, {"c"}}, {"a", "b"}, 2);
    EXPECT_NEAR(npmi(s, "a", "b"), 1.0, 1e-6);
}

TEST(Npmi, Independence) {
    // Four windows: {a,b}, {a}, {b}, {} so p(a)=p(b)=1/2, p(a,b)=1/4.
    const auto s = window_counts(Docs{{"a", "b"}, {"a"}, {"b"}, {"c"}}, {"a", "b"}, 2);
    EXPECT_NEAR(npmi(s, "a", "b"), 0.0, 1e-6);
}

TEST(Npmi, NeverTogether) {
    // p(a) = p(b) = 0.5, no co-occurrence; evaluated from the formula directly.
    const double expected = std::log(1e-12 / 0.25) / -std::log(1e-12);
    EXPECT_NEAR(expected, -0.949828, 1e-6);
    const auto s = window_counts(Docs{{"a"}, {"b"}}, {"a", "b"}, 2);
    EXPECT_NEAR(npmi(s, "a", "b", 1e-12), expected, 1e-12);
}

TEST(Npmi, AbsentWordIsZeroWithWarning) {
    Quiet q;
    const auto s = window_counts(Docs{{"a"}}, {"a", "z"}, 2);
    EXPECT_EQ(npmi(s, "a", "z"), 0.0);
    EXPECT_EQ(q.seen.size(), 1u);
}

TEST(Npmi, Symmetric) {
    Rng rng(8);
    const auto docs = random_corpus(rng, 800, 10);
    const std::vector<std::string> words = {"w0", "w1", "w2", "w3", "w4", "w5"};
    const auto s = window_counts(docs, words, 7);
    Quiet q;
    for (const auto& a : words)
        for (const auto& b : words) EXPECT_EQ(npmi(s, a, b), npmi(s, b, a));
}

TEST(CvCoherence, AllWordsAlwaysTogetherScoresOne) {
    const Docs docs = {{"a", "b", "c"}, {"c", "b", "a"}, {"b", "a", "c"}};
    const Docs topics = {{"a", "b", "c"}};
    for (auto mode : {SetVector::Sum, SetVector::BooleanUnion}) {
        CoherenceOptions o;
        o.window_size = 110;
        o.set_vector = mode;
        EXPECT_NEAR(cv_coherence(topics, docs, o).per_topic[0], 1.0, 1e-9);
    }
}

TEST(CvCoherence, TinyCorpusMatchesBruteForce) {
    const Docs docs = {{"a", "b", "x", "c"}, {"d", "e", "a", "f"}, {"b", "c", "f", "d", "e"}};
    const Docs topics = {{"a", "b", "c"}, {"d", "e", "f"}};
    for (bool u : {false, true}) {
        CoherenceOptions o;
        o.window_size = 3;
        o.set_vector = u ? SetVector::BooleanUnion : SetVector::Sum;
        const auto r = cv_coherence(topics, docs, o);
        const auto expect = oracle::cv(topics, docs, o.topn, 3, o.eps, u);
        ASSERT_EQ(r.per_topic.size(), 2u);
        for (std::size_t t = 0; t < 2; ++t) EXPECT_NEAR(r.per_topic[t], expect[t], 1e-12);
        EXPECT_NEAR(r.aggregate, (expect[0] + expect[1]) / 2, 1e-12);
    }
}

TEST(CvCoherence, RandomCorporaMatchBruteForce) {
    Rng rng(21);
    Quiet q;
    for (int trial = 0; trial < 15; ++trial) {
        const auto docs = random_corpus(rng, 1000, 15);
        boost::random::uniform_int_distribution<std::size_t> n_topics(2, 4), n_words(3, 5), window(2, 30);
        std::vector<std::string> pool;
        for (int i = 0; i < 20; ++i) pool.push_back("w" + std::to_string(i));  // w15.. never occur
        const auto order = seeded_permutation(pool.size(), rng());
        std::vector<std::string> shuffled;
        for (auto i : order) shuffled.push_back(pool[i]);
        pool = shuffled;
        Docs topics;
        std::size_t next = 0;
        const auto k = n_topics(rng);
        for (std::size_t t = 0; t < k; ++t) {
            const auto n = n_words(rng);
            topics.emplace_back(pool.begin() + next, pool.begin() + next + n);
            next += n;
        }
        CoherenceOptions o;
        o.window_size = window(rng);
        for (bool u : {false, true}) {
            o.set_vector = u ? SetVector::BooleanUnion : SetVector::Sum;
            const auto r = cv_coherence(topics, docs, o);
            const auto expect = oracle::cv(topics, docs, o.topn, o.window_size, o.eps, u);
            for (std::size_t t = 0; t < k; ++t) {
                EXPECT_NEAR(r.per_topic[t], expect[t], 1e-9) << "trial " << trial;
                EXPECT_GE(r.per_topic[t], -1.0);
                EXPECT_LE(r.per_topic[t], 1.0);
            }
        }
    }
}

TEST(CvCoherence, DocumentOrderInvariant) {
    Rng rng(4);
    const auto docs = random_corpus(rng, 900, 10);
    auto reversed = docs;
    std::reverse(reversed.begin(), reversed.end());
    const Docs topics = {{"w0", "w1", "w2", "w3"}, {"w4", "w5", "w6"}};
    CoherenceOptions o;
    o.window_size = 9;
    const auto a = cv_coherence(topics, docs, o);
    const auto b = cv_coherence(topics, reversed, o);
    EXPECT_EQ(a.per_topic, b.per_topic);
}

TEST(CvCoherence, TopnTruncatesAndIsRecorded) {
    const Docs docs = {{"a", "b", "c", "d"}, {"a", "b"}, {"c", "d"}};
    CoherenceOptions o;
    o.topn = 2;
    const auto r = cv_coherence(Docs{{"a", "b", "c", "d"}}, docs, o);
    const auto direct = cv_coherence(Docs{{"a", "b"}}, docs, o);
    EXPECT_EQ(r.per_topic, direct.per_topic);
    const auto j = to_json(r);
    EXPECT_EQ(j.at("topn"), 2);
    EXPECT_EQ(j.at("window_size"), 110);
    EXPECT_TRUE(j.contains("aggregate"));
    EXPECT_TRUE(j.contains("per_topic"));
}

TEST(CvCoherence, AbsentWordsWarnNotFail) {
    Quiet q;
    const auto r = cv_coherence(Docs{{"a", "zz"}}, Docs{{"a", "b"}}, {});
    EXPECT_EQ(r.warnings.size(), 1u);
    EXPECT_FALSE(q.seen.empty());
    EXPECT_TRUE(std::isfinite(r.aggregate));
}

TEST(CvCoherence, Errors) {
    EXPECT_THROW(cv_coherence(Docs{{"a", "b"}}, Docs{}, {}), DataError);
    EXPECT_THROW(cv_coherence(Docs{{"a"}}, Docs{{"a"}}, {}), ArgumentError);
    EXPECT_THROW(cv_coherence(Docs{}, Docs{{"a"}}, {}), ArgumentError);
}
