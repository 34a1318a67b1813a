#pragma once

#include <newstopics/corpus.hpp>
#include <newstopics/lda.hpp>
#include <newstopics/synthetic.hpp>

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace fixtures {

using namespace newstopics;

struct Encoded {
    std::vector<std::vector<std::string>> tokens;
    std::shared_ptr<const Dictionary> dictionary;
    std::vector<BowDocument> bows;
};

inline Encoded encode(std::vector<std::vector<std::string>> docs) {
    Encoded e;
    e.tokens = std::move(docs);
    e.dictionary = std::make_shared<const Dictionary>(build_dictionary(e.tokens));
    for (std::size_t i = 0; i < e.tokens.size(); ++i)
        e.bows.push_back(doc_to_bow(*e.dictionary, e.tokens[i], "d" + std::to_string(i)));
    return e;
}

/// Two topics over disjoint 20-word vocabularies, mostly pure documents.
inline synthetic::Corpus two_cluster(std::uint64_t seed = 3) {
    synthetic::Spec spec;
    spec.num_topics = 2;
    spec.words_per_topic = 20;
    spec.num_docs = 300;
    spec.min_length = 20;
    spec.max_length = 30;
    spec.doc_alpha = 0.05;
    spec.seed = seed;
    return synthetic::generate(spec);
}

/// Which generating topic the word "t<k>w<r>" belongs to.
inline std::size_t source_topic(const std::string& word) { return static_cast<std::size_t>(std::stoul(word.substr(1))); }

/// Mean top-n overlap after greedily matching each learned topic to the
/// unmatched true topic it shares the most top words with.
inline double matched_overlap(const LdaModel& model, const synthetic::Corpus& truth, std::size_t topn) {
    const std::size_t K = truth.topic_words.size();
    std::vector<std::set<std::string>> learned, actual;
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
        std::set<std::string> s;
        for (const auto& t : model.topic_terms(k, topn)) s.insert(t.token);
        learned.push_back(std::move(s));
    }
    for (const auto& words : truth.topic_words) actual.emplace_back(words.begin(), words.begin() + topn);

    struct Cand {
        std::size_t overlap, l, a;
    };
    std::vector<Cand> cands;
    for (std::size_t l = 0; l < learned.size(); ++l)
        for (std::size_t a = 0; a < K; ++a) {
            std::size_t o = 0;
            for (const auto& w : learned[l]) o += actual[a].count(w);
            cands.push_back({o, l, a});
        }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.overlap > y.overlap; });
    std::vector<bool> used_l(learned.size()), used_a(K);
    double total = 0.0;
    for (const auto& c : cands) {
        if (used_l[c.l] || used_a[c.a]) continue;
        used_l[c.l] = used_a[c.a] = true;
        total += static_cast<double>(c.overlap) / static_cast<double>(topn);
    }
    return total / static_cast<double>(K);
}

}  // namespace fixtures
