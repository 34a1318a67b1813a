#pragma once

#include "error.hpp"
#include "io.hpp"
#include "lda.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace newstopics {

struct TopicShare {
    std::vector<std::size_t> counts;
    std::vector<double> proportions;
};

inline TopicShare dominant_topic_shares(std::span<const TopicDistribution> dists) {
    if (dists.empty()) throw ArgumentError("no topic distributions");
    const std::size_t K = dists.front().size();
    TopicShare share;
    share.counts.assign(K, 0);
    for (const auto& d : dists) {
        if (d.size() != K) throw ArgumentError("topic distributions disagree on K");
        ++share.counts[dominant_topic(d)];
    }
    share.proportions.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        share.proportions[k] = static_cast<double>(share.counts[k]) / static_cast<double>(dists.size());
    return share;
}

struct Representative {
    std::string doc_id;
    double probability = 0.0;
};

struct DocumentTopics {
    std::string doc_id;
    TopicDistribution dist;
};

/// For each topic, the document it dominates with the highest probability;
/// the first such document wins ties. Topics dominating nothing stay empty.
inline std::vector<std::optional<Representative>> representative_documents(std::span<const DocumentTopics> docs) {
    if (docs.empty()) throw ArgumentError("no documents");
    const std::size_t K = docs.front().dist.size();
    std::vector<std::optional<Representative>> reps(K);
    for (const auto& d : docs) {
        if (d.dist.size() != K) throw ArgumentError("topic distributions disagree on K");
        const auto k = dominant_topic(d.dist);
        if (!reps[k] || d.dist[k] > reps[k]->probability) reps[k] = Representative{d.doc_id, d.dist[k]};
    }
    return reps;
}

/// Topics in which P(word | topic) >= floor, most probable first.
inline std::vector<std::size_t> keyword_topics(const LdaModel& model, const std::string& word, double floor = 0.001) {
    const auto id = model.dictionary().find(word);
    if (!id) throw ArgumentError("unknown token: " + word);
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
        const double p = model.term_probability(k, *id);
        if (p >= floor) scored.emplace_back(p, k);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::size_t> topics;
    for (const auto& [p, k] : scored) topics.push_back(k);
    return topics;
}

/// Jensen-Shannon divergence with natural logarithms; bounded by ln 2.
inline double jensen_shannon(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ArgumentError("distributions differ in length");
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) js += 0.5 * p[i] * std::log(p[i] / m);
        if (q[i] > 0.0) js += 0.5 * q[i] * std::log(q[i] / m);
    }
    return std::max(js, 0.0);
}

struct Embedding {
    std::vector<std::array<double, 2>> coords;
    double stress = 0.0;  // Kruskal stress-1 of embedded vs input distances
};

/// Classical (Torgerson) scaling into two dimensions. Each axis is oriented
/// so its largest-magnitude coordinate is positive.
inline Embedding classical_mds(const std::vector<std::vector<double>>& distance) {
    const auto n = static_cast<Eigen::Index>(distance.size());
    if (n < 2) throw ArgumentError("nothing to embed");
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (distance[i].size() != distance.size()) throw ArgumentError("distance matrix must be square");
        for (Eigen::Index j = 0; j < n; ++j) d2(i, j) = distance[i][j] * distance[i][j];
    }
    const Eigen::MatrixXd centering =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::MatrixXd b = -0.5 * centering * d2 * centering;
    b = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed", 0);

    Embedding out;
    out.coords.assign(distance.size(), {0.0, 0.0});
    for (int axis = 0; axis < 2 && axis < n; ++axis) {
        const Eigen::Index col = n - 1 - axis;  // eigenvalues ascend
        const double lambda = std::max(solver.eigenvalues()(col), 0.0);
        Eigen::VectorXd v = solver.eigenvectors().col(col);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < n; ++i)
            if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) arg = i;
        if (v(arg) < 0) v = -v;
        for (Eigen::Index i = 0; i < n; ++i) out.coords[i][axis] = v(i) * std::sqrt(lambda);
    }

    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dx = out.coords[i][0] - out.coords[j][0];
            const double dy = out.coords[i][1] - out.coords[j][1];
            const double diff = std::sqrt(dx * dx + dy * dy) - distance[i][j];
            num += diff * diff;
            den += distance[i][j] * distance[i][j];
        }
    out.stress = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return out;
}

struct TopicOverview {
    std::vector<std::vector<double>> distance;
    std::vector<std::array<double, 2>> coords;
    double stress = 0.0;
    TopicShare share;
};

inline TopicOverview topic_overview(const LdaModel& model, std::span<const TopicDistribution> dists) {
    const std::size_t K = model.num_topics();
    if (K < 2) throw ArgumentError("nothing to embed");
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < K; ++k) rows.push_back(model.topic_word(k));
    TopicOverview ov;
    ov.distance.assign(K, std::vector<double>(K, 0.0));
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j) ov.distance[i][j] = ov.distance[j][i] = jensen_shannon(rows[i], rows[j]);
    auto emb = classical_mds(ov.distance);
    ov.coords = std::move(emb.coords);
    ov.stress = emb.stress;
    ov.share = dominant_topic_shares(dists);
    return ov;
}

inline nlohmann::json to_json(const TopicShare& s) {
    return {{"counts", s.counts}, {"proportions", s.proportions}};
}

inline nlohmann::json to_json(const TopicOverview& ov) {
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& c : ov.coords) coords.push_back({c[0], c[1]});
    return {{"distance", ov.distance}, {"coords", coords}, {"shares", ov.share.proportions}, {"stress", ov.stress}};
}

/// topic,rank,token,probability; rank is 1-based.
inline std::string topic_terms_csv(const LdaModel& model, std::size_t topn) {
    std::string out = "topic,rank,token,probability\n";
    const std::size_t n = std::min(topn, model.vocab_size());
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
        auto terms = model.topic_terms(k, n);
        for (std::size_t r = 0; r < terms.size(); ++r)
            out += std::to_string(k) + "," + std::to_string(r + 1) + "," + io::csv_field(terms[r].token) + "," +
                   io::format_double(terms[r].probability) + "\n";
    }
    return out;
}

/// keyword,topics with topics space-separated in probability order. Words
/// missing from the dictionary get an empty topic list.
inline std::string keyword_topics_csv(const LdaModel& model, std::span<const std::string> keywords, double floor) {
    std::string out = "keyword,topics\n";
    for (const auto& w : keywords) {
        std::string list;
        if (model.dictionary().find(w)) {
            for (auto k : keyword_topics(model, w, floor)) {
                if (!list.empty()) list.push_back(' ');
                list += std::to_string(k);
            }
        }
        out += io::csv_field(w) + "," + list + "\n";
    }
    return out;
}

}  // namespace newstopics
