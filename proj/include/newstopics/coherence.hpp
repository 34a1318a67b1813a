#pragma once

// C_v topic coherence: boolean sliding-window document frequencies, NPMI
// context vectors, cosine confirmation of each word against its topic's word
// set, arithmetic-mean aggregation.

#include "diagnostics.hpp"
#include "error.hpp"
#include "lda.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace newstopics {

/// Window co-occurrence counts for a fixed set of tracked words, plus
/// "any member present" counts for registered word sets.
class WindowStats {
public:
    WindowStats(std::size_t window_size, std::vector<std::string> words) : window_size_(window_size) {
        for (auto& w : words) {
            if (index_.count(w)) continue;
            index_.emplace(w, words_.size());
            words_.push_back(std::move(w));
        }
        occur_.assign(words_.size(), 0);
    }

    std::size_t window_size() const { return window_size_; }
    std::uint64_t n_windows() const { return n_windows_; }
    const std::vector<std::string>& tracked_words() const { return words_; }
    bool tracked(const std::string& w) const { return index_.count(w) != 0; }

    std::uint64_t occur(const std::string& w) const { return occur_[index_of(w)]; }

    std::uint64_t co_occur(const std::string& a, const std::string& b) const {
        const auto i = index_of(a), j = index_of(b);
        if (i == j) return occur_[i];
        auto it = co_.find(pair_key(i, j));
        return it == co_.end() ? 0 : it->second;
    }

    /// Windows in which at least one member of registered set `s` appears.
    std::uint64_t set_occur(std::size_t s) const { return set_occur_.at(s); }
    std::size_t set_count() const { return sets_.size(); }

    std::size_t register_set(std::span<const std::string> members) {
        std::vector<std::size_t> ids;
        for (const auto& m : members) ids.push_back(index_of(m));
        sets_.push_back(std::move(ids));
        set_occur_.push_back(0);
        return sets_.size() - 1;
    }

    /// Adds every window of one document. Documents shorter than the window
    /// contribute a single window; empty documents contribute nothing.
    void add_document(std::span<const std::string> tokens) {
        if (tokens.empty()) return;
        std::vector<std::ptrdiff_t> ids(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            auto it = index_.find(tokens[i]);
            ids[i] = it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
        }
        const std::size_t width = std::min(window_size_, tokens.size());
        const std::size_t windows = tokens.size() - width + 1;
        n_windows_ += windows;

        // Presence sets only change when a tracked word enters or leaves, so
        // identical consecutive windows are flushed together as one run.
        std::vector<std::uint32_t> count(words_.size(), 0);
        std::vector<std::size_t> present;
        std::vector<std::size_t> slot(words_.size(), 0);
        auto enter = [&](std::ptrdiff_t id) {
            if (id < 0) return;
            if (count[id]++ == 0) {
                slot[id] = present.size();
                present.push_back(static_cast<std::size_t>(id));
            }
        };
        auto leave = [&](std::ptrdiff_t id) {
            if (id < 0) return;
            if (--count[id] == 0) {
                const auto pos = slot[id];
                present[pos] = present.back();
                slot[present[pos]] = pos;
                present.pop_back();
            }
        };

        for (std::size_t i = 0; i < width; ++i) enter(ids[i]);
        std::uint64_t run = 1;
        for (std::size_t start = 1; start < windows; ++start) {
            const auto out = ids[start - 1];
            const auto in = ids[start + width - 1];
            const bool changes =
                out != in && ((in >= 0 && count[in] == 0) || (out >= 0 && count[out] == 1));
            if (changes) {
                flush(present, run);
                run = 0;
            }
            enter(in);
            leave(out);
            ++run;
        }
        flush(present, run);
    }

    void merge(const WindowStats& other) {
        if (other.words_ != words_ || other.window_size_ != window_size_ || other.sets_ != sets_)
            throw ArgumentError("cannot merge window statistics over different word sets");
        n_windows_ += other.n_windows_;
        for (std::size_t i = 0; i < occur_.size(); ++i) occur_[i] += other.occur_[i];
        for (const auto& [k, v] : other.co_) co_[k] += v;
        for (std::size_t s = 0; s < set_occur_.size(); ++s) set_occur_[s] += other.set_occur_[s];
    }

private:
    static std::uint64_t pair_key(std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
    }

    std::size_t index_of(const std::string& w) const {
        auto it = index_.find(w);
        if (it == index_.end()) throw ArgumentError("word not tracked: " + w);
        return it->second;
    }

    void flush(const std::vector<std::size_t>& present, std::uint64_t run) {
        if (run == 0 || present.empty()) return;
        for (std::size_t a = 0; a < present.size(); ++a) {
            occur_[present[a]] += run;
            for (std::size_t b = a + 1; b < present.size(); ++b) co_[pair_key(present[a], present[b])] += run;
        }
        for (std::size_t s = 0; s < sets_.size(); ++s) {
            const bool any = std::any_of(sets_[s].begin(), sets_[s].end(), [&](std::size_t id) {
                return std::find(present.begin(), present.end(), id) != present.end();
            });
            if (any) set_occur_[s] += run;
        }
    }

    std::size_t window_size_;
    std::uint64_t n_windows_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::uint64_t> occur_;
    std::unordered_map<std::uint64_t, std::uint64_t> co_;
    std::vector<std::vector<std::size_t>> sets_;
    std::vector<std::uint64_t> set_occur_;
};

inline WindowStats window_counts(std::span<const std::vector<std::string>> token_docs,
                                 std::vector<std::string> words, std::size_t window_size) {
    if (window_size < 1) throw ArgumentError("window_size must be >= 1");
    if (words.empty()) throw ArgumentError("no words to track");
    if (token_docs.empty()) throw DataError("no reference corpus");
    WindowStats stats(window_size, std::move(words));
    for (const auto& doc : token_docs) stats.add_document(doc);
    return stats;
}

/// NPMI from window probabilities; see npmi().
inline double npmi_from_counts(std::uint64_t occur_a, std::uint64_t occur_b, std::uint64_t co, std::uint64_t n,
                               double eps) {
    if (occur_a == 0 || occur_b == 0 || n == 0) return 0.0;
    const double N = static_cast<double>(n);
    const double pa = static_cast<double>(occur_a) / N;
    const double pb = static_cast<double>(occur_b) / N;
    const double pab = static_cast<double>(co) / N + eps;
    const double denom = -std::log(pab);
    if (denom == 0.0) return 1.0;
    return std::clamp(std::log(pab / (pa * pb)) / denom, -1.0, 1.0);
}

/// ln((p(a,b) + eps) / (p(a) p(b))) / -ln(p(a,b) + eps); 0 when either word
/// never occurs.
inline double npmi(const WindowStats& stats, const std::string& a, const std::string& b, double eps = 1e-12) {
    const auto oa = stats.occur(a), ob = stats.occur(b);
    if (oa == 0 || ob == 0) {
        warn("word absent from reference corpus: " + (oa == 0 ? a : b));
        return 0.0;
    }
    return npmi_from_counts(oa, ob, stats.co_occur(a, b), stats.n_windows(), eps);
}

/// How the topic-side context vector is formed.
enum class SetVector {
    Sum,            ///< sum of the members' NPMI vectors
    BooleanUnion,   ///< NPMI of the pseudo-word "any member present"
};

struct CoherenceOptions {
    std::size_t topn = 20;
    std::size_t window_size = 110;
    double eps = 1e-12;
    SetVector set_vector = SetVector::Sum;
};

struct CoherenceResult {
    std::vector<double> per_topic;
    double aggregate = 0.0;
    std::size_t topn = 0;
    std::size_t window_size = 0;
    std::vector<std::string> warnings;
};

inline nlohmann::json to_json(const CoherenceResult& r) {
    return {{"aggregate", r.aggregate}, {"per_topic", r.per_topic}, {"topn", r.topn}, {"window_size", r.window_size}};
}

namespace detail {

inline double cosine_or_zero(std::span<const double> x, std::span<const double> y) {
    double dot = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx == 0.0 || yy == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
}

}  // namespace detail

/// Scores each topic's first `topn` words against the reference corpus.
inline CoherenceResult cv_coherence(std::span<const std::vector<std::string>> topics,
                                    std::span<const std::vector<std::string>> token_docs,
                                    const CoherenceOptions& options = {}) {
    if (topics.empty()) throw ArgumentError("no topics to score");
    if (!(options.eps > 0.0)) throw ArgumentError("eps must be positive");
    if (options.topn < 2) throw ArgumentError("topn must be >= 2");

    std::vector<std::vector<std::string>> lists;
    std::vector<std::string> all_words;
    for (const auto& t : topics) {
        if (t.size() < 2) throw ArgumentError("every topic needs at least 2 words");
        lists.emplace_back(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(std::min(t.size(), options.topn)));
        all_words.insert(all_words.end(), lists.back().begin(), lists.back().end());
    }
    if (token_docs.empty()) throw DataError("no reference corpus");
    WindowStats stats(options.window_size, all_words);
    if (options.set_vector == SetVector::BooleanUnion)
        for (const auto& l : lists) stats.register_set(l);
    for (const auto& doc : token_docs) stats.add_document(doc);

    CoherenceResult result;
    result.topn = options.topn;
    result.window_size = options.window_size;
    for (const auto& w : stats.tracked_words())
        if (stats.occur(w) == 0) result.warnings.push_back("word absent from reference corpus: " + w);
    for (const auto& msg : result.warnings) warn(msg);

    const auto N = stats.n_windows();
    for (std::size_t t = 0; t < lists.size(); ++t) {
        const auto& W = lists[t];
        const std::size_t n = W.size();
        // vectors[i][j] = NPMI(w_i, w_j)
        std::vector<std::vector<double>> vectors(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                vectors[i][j] = npmi_from_counts(stats.occur(W[i]), stats.occur(W[j]), stats.co_occur(W[i], W[j]),
                                                 N, options.eps);

        std::vector<double> topic_vec(n, 0.0);
        if (options.set_vector == SetVector::Sum) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) topic_vec[j] += vectors[i][j];
        } else {
            // w_j is itself a member, so every window holding w_j holds the set.
            const auto set_n = stats.set_occur(t);
            for (std::size_t j = 0; j < n; ++j) {
                const auto oj = stats.occur(W[j]);
                topic_vec[j] = npmi_from_counts(set_n, oj, oj, N, options.eps);
            }
        }

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += detail::cosine_or_zero(vectors[i], topic_vec);
        result.per_topic.push_back(total / static_cast<double>(n));
    }
    double sum = 0.0;
    for (double s : result.per_topic) sum += s;
    result.aggregate = sum / static_cast<double>(result.per_topic.size());
    return result;
}

/// Top words of every topic in the model, as fed to cv_coherence.
inline std::vector<std::vector<std::string>> topic_word_lists(const LdaModel& model, std::size_t topn) {
    const std::size_t n = std::min(topn, model.vocab_size());
    std::vector<std::vector<std::string>> lists;
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
        std::vector<std::string> words;
        for (auto& t : model.topic_terms(k, n)) words.push_back(std::move(t.token));
        lists.push_back(std::move(words));
    }
    return lists;
}

inline CoherenceResult model_coherence(const LdaModel& model, std::span<const std::vector<std::string>> token_docs,
                                       const CoherenceOptions& options = {}) {
    return cv_coherence(topic_word_lists(model, options.topn), token_docs, options);
}

}  // namespace newstopics
