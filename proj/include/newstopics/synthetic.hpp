#pragma once

// Draws documents from a known LDA generative process. Topic k owns the
// words "t<k>w<i>" exclusively, weighted by a Zipf law so every topic has a
// well-defined ranking of its top words.

#include "random.hpp"

#include <boost/random/discrete_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace newstopics::synthetic {

struct Spec {
    std::size_t num_topics = 5;
    std::size_t words_per_topic = 100;
    std::size_t num_docs = 2000;
    std::size_t min_length = 40;
    std::size_t max_length = 60;
    double doc_alpha = 0.1;   // symmetric Dirichlet over topic mixtures
    double zipf_exponent = 1.0;
    std::uint64_t seed = 1;
};

struct Corpus {
    std::vector<std::vector<std::string>> docs;
    std::vector<std::vector<std::string>> topic_words;  // per topic, most probable first
    std::vector<std::vector<double>> topic_weights;     // aligned with topic_words, sums to 1
    std::vector<std::vector<double>> doc_topics;
};

inline std::string word_name(std::size_t topic, std::size_t rank) {
    return "t" + std::to_string(topic) + "w" + std::to_string(rank);
}

inline Corpus generate(const Spec& spec) {
    Corpus c;
    for (std::size_t k = 0; k < spec.num_topics; ++k) {
        std::vector<std::string> words;
        std::vector<double> weights;
        double total = 0.0;
        for (std::size_t r = 0; r < spec.words_per_topic; ++r) {
            words.push_back(word_name(k, r));
            weights.push_back(std::pow(static_cast<double>(r + 1), -spec.zipf_exponent));
            total += weights.back();
        }
        for (double& w : weights) w /= total;
        c.topic_words.push_back(std::move(words));
        c.topic_weights.push_back(std::move(weights));
    }

    Rng rng(spec.seed);
    std::vector<boost::random::discrete_distribution<std::size_t>> word_dists;
    for (const auto& w : c.topic_weights) word_dists.emplace_back(w.begin(), w.end());
    boost::random::gamma_distribution<double> mix_draw(spec.doc_alpha, 1.0);
    boost::random::uniform_int_distribution<std::size_t> length_draw(spec.min_length, spec.max_length);

    for (std::size_t d = 0; d < spec.num_docs; ++d) {
        std::vector<double> theta(spec.num_topics);
        double total = 0.0;
        for (double& t : theta) total += (t = mix_draw(rng));
        if (total <= 0.0) {
            theta.assign(spec.num_topics, 1.0);
            total = static_cast<double>(spec.num_topics);
        }
        for (double& t : theta) t /= total;
        boost::random::discrete_distribution<std::size_t> topic_draw(theta.begin(), theta.end());
        const std::size_t len = length_draw(rng);
        std::vector<std::string> doc;
        doc.reserve(len);
        for (std::size_t i = 0; i < len; ++i) {
            const auto k = topic_draw(rng);
            doc.push_back(c.topic_words[k][word_dists[k](rng)]);
        }
        c.docs.push_back(std::move(doc));
        c.doc_topics.push_back(std::move(theta));
    }
    return c;
}

}  // namespace newstopics::synthetic
