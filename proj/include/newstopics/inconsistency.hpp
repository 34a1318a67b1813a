#pragma once

// Article-comment topic agreement per news thread.

#include "analysis.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "io.hpp"
#include "lda.hpp"
#include "stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace newstopics {

struct ThreadGroup {
    std::string news_id;
    TopicDistribution article_dist;
    std::vector<TopicDistribution> comment_dists;
};

struct InconsistencyRecord {
    std::string news_id;
    double similarity = 0.0;
    std::size_t article_dominant = 0;
    std::size_t comments_dominant = 0;
    std::size_t n_comments = 0;
};

enum class CommentAggregation {
    MeanDistribution,  ///< cosine(article, renormalised mean of comment distributions)
    MeanSimilarity,    ///< mean over comments of cosine(article, comment)
};

inline TopicDistribution mean_distribution(std::span<const TopicDistribution> dists) {
    if (dists.empty()) throw ArgumentError("no distributions to average");
    const std::size_t K = dists.front().size();
    std::vector<double> acc(K, 0.0);
    for (const auto& d : dists) {
        if (d.size() != K) throw ArgumentError("topic distributions disagree on K");
        for (std::size_t k = 0; k < K; ++k) acc[k] += d[k];
    }
    double total = 0.0;
    for (double v : acc) total += v;
    if (!(total > 0.0)) throw DataError("comment distributions sum to zero");
    for (double& v : acc) v /= total;
    return {std::move(acc)};
}

inline InconsistencyRecord thread_similarity(const ThreadGroup& group,
                                             CommentAggregation mode = CommentAggregation::MeanDistribution) {
    if (group.comment_dists.empty()) throw ArgumentError("thread " + group.news_id + " has no comments");
    const auto aggregate = mean_distribution(group.comment_dists);
    if (aggregate.size() != group.article_dist.size()) throw ArgumentError("topic distributions disagree on K");

    InconsistencyRecord rec;
    rec.news_id = group.news_id;
    rec.article_dominant = dominant_topic(group.article_dist);
    rec.comments_dominant = dominant_topic(aggregate);
    rec.n_comments = group.comment_dists.size();
    try {
        if (mode == CommentAggregation::MeanDistribution) {
            rec.similarity = stats::cosine_similarity(group.article_dist.probs, aggregate.probs);
        } else {
            double total = 0.0;
            for (const auto& c : group.comment_dists) total += stats::cosine_similarity(group.article_dist.probs, c.probs);
            rec.similarity = total / static_cast<double>(group.comment_dists.size());
        }
    } catch (const DataError& e) {
        throw Error("internal error in thread " + group.news_id + ": " + e.what());
    }
    rec.similarity = std::clamp(rec.similarity, 0.0, 1.0);
    return rec;
}

struct ExcludedThread {
    std::string news_id;
    std::string reason;
};

struct ThreadGrouping {
    std::vector<ThreadGroup> groups;  // ordered by news_id
    std::vector<ExcludedThread> excluded;
};

/// Groups documents by news_id. dists[i] belongs to documents[i]; an empty
/// optional marks a document whose bag of words was empty. Threads lacking a
/// usable article or any usable comment are excluded with a reason.
inline ThreadGrouping group_threads(std::span<const Document> documents,
                                    std::span<const std::optional<TopicDistribution>> dists) {
    if (documents.size() != dists.size()) throw ArgumentError("documents and distributions differ in length");
    struct Acc {
        bool has_article = false;
        std::optional<TopicDistribution> article;
        std::size_t comments_seen = 0;
        std::vector<TopicDistribution> comments;
    };
    std::map<std::string, Acc> threads;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        auto& acc = threads[documents[i].news_id];
        if (documents[i].kind == DocKind::Article) {
            acc.has_article = true;
            acc.article = dists[i];
        } else {
            ++acc.comments_seen;
            if (dists[i]) acc.comments.push_back(*dists[i]);
        }
    }
    ThreadGrouping out;
    for (auto& [id, acc] : threads) {
        if (!acc.has_article)
            out.excluded.push_back({id, "no article"});
        else if (!acc.article)
            out.excluded.push_back({id, "article empty after preprocessing"});
        else if (acc.comments_seen == 0)
            out.excluded.push_back({id, "no comments"});
        else if (acc.comments.empty())
            out.excluded.push_back({id, "all comments empty after preprocessing"});
        else
            out.groups.push_back({id, std::move(*acc.article), std::move(acc.comments)});
    }
    return out;
}

struct SimilarityHistogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::vector<double> proportions;
};

/// Bins are [e_i, e_{i+1}) except the last, which is closed.
inline SimilarityHistogram similarity_histogram(std::span<const InconsistencyRecord> records,
                                                std::span<const double> edges) {
    if (edges.size() < 2) throw ArgumentError("need at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw ArgumentError("bin edges must be strictly ascending");
    if (edges.front() > 0.0 || edges.back() < 1.0) throw ArgumentError("bin edges must cover [0, 1]");
    if (records.empty()) throw ArgumentError("no records to bin");

    SimilarityHistogram h;
    h.edges.assign(edges.begin(), edges.end());
    const std::size_t bins = edges.size() - 1;
    h.counts.assign(bins, 0);
    for (const auto& r : records) {
        const double s = r.similarity;
        std::size_t bin = bins - 1;
        if (s < edges.back()) {
            auto it = std::upper_bound(edges.begin(), edges.end(), s);
            bin = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
        }
        ++h.counts[bin];
    }
    h.proportions.resize(bins);
    for (std::size_t b = 0; b < bins; ++b)
        h.proportions[b] = static_cast<double>(h.counts[b]) / static_cast<double>(records.size());
    return h;
}

struct TopicProfile {
    double threshold = 0.0;
    std::size_t n_low = 0;
    std::vector<double> low_shares;      // dominant article topics of threads below threshold
    std::vector<double> overall_shares;  // dominant topics over all documents
    double pearson_r = 0.0;
};

/// Compares the dominant-topic mix of low-similarity threads with the mix over
/// the whole corpus. A high correlation means no topic drives the disagreement.
inline TopicProfile inconsistent_topic_profile(std::span<const InconsistencyRecord> records,
                                               std::span<const TopicDistribution> all_dists, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ArgumentError("threshold must lie in (0, 1)");
    TopicProfile p;
    p.threshold = threshold;
    p.overall_shares = dominant_topic_shares(all_dists).proportions;
    const std::size_t K = p.overall_shares.size();
    std::vector<std::size_t> counts(K, 0);
    for (const auto& r : records) {
        if (r.similarity < threshold) {
            if (r.article_dominant >= K) throw ArgumentError("record topic out of range");
            ++counts[r.article_dominant];
            ++p.n_low;
        }
    }
    if (p.n_low == 0) throw DataError("empty selection");
    p.low_shares.resize(K);
    for (std::size_t k = 0; k < K; ++k) p.low_shares[k] = static_cast<double>(counts[k]) / static_cast<double>(p.n_low);
    p.pearson_r = stats::pearson(p.low_shares, p.overall_shares);
    return p;
}

inline std::string records_csv(std::span<const InconsistencyRecord> records) {
    std::string out = "news_id,similarity,article_dominant,comments_dominant,n_comments\n";
    for (const auto& r : records)
        out += io::csv_field(r.news_id) + "," + io::format_double(r.similarity) + "," +
               std::to_string(r.article_dominant) + "," + std::to_string(r.comments_dominant) + "," +
               std::to_string(r.n_comments) + "\n";
    return out;
}

inline nlohmann::json to_json(const SimilarityHistogram& h) {
    return {{"edges", h.edges}, {"counts", h.counts}, {"proportions", h.proportions}};
}

inline nlohmann::json to_json(const TopicProfile& p) {
    return {{"threshold", p.threshold},
            {"n_low", p.n_low},
            {"low_shares", p.low_shares},
            {"overall_shares", p.overall_shares},
            {"pearson_r", p.pearson_r}};
}

}  // namespace newstopics
