#pragma once

// Corpus ingestion and bag-of-words encoding: JSONL loading, Unicode-aware
// tokenisation, stopword filtering, dictionary construction and the seeded
// train/test split.

#include "error.hpp"
#include "io.hpp"
#include "random.hpp"

#include <nlohmann/json.hpp>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace newstopics {

enum class DocKind { Article, Comment };

inline std::string_view to_string(DocKind kind) { return kind == DocKind::Article ? "article" : "comment"; }

inline DocKind parse_doc_kind(std::string_view s) {
    if (s == "article") return DocKind::Article;
    if (s == "comment") return DocKind::Comment;
    throw ArgumentError("unknown document kind: " + std::string(s));
}

struct Document {
    std::string doc_id;
    std::string news_id;
    DocKind kind = DocKind::Article;
    std::string text;
    std::string timestamp;
    std::optional<bool> is_reply;  // comments only
    std::optional<std::string> title;
    std::optional<std::string> url;
    std::optional<std::string> username;
};

enum class InputSchema { ArticlesJsonl, CommentsJsonl };

struct SkippedLine {
    std::size_t line = 0;  // 1-based
    std::string reason;
};

struct LoadResult {
    std::vector<Document> documents;
    std::vector<SkippedLine> skipped;
};

namespace detail {

inline std::optional<std::string> json_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    if (it->is_number_unsigned()) return std::to_string(it->get<std::uint64_t>());
    return std::nullopt;
}

inline bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace detail

/// Reads one JSON object per line. Lines that fail to parse, lack a required
/// field or carry empty text are reported in LoadResult::skipped.
///
/// Articles require news_id and text; comments require news_id and one of
/// clean_comment / raw_comment (clean_comment wins when both are non-empty).
/// Documents get ids "A<news_id>" and "C<news_id>#<line>" unless the line
/// carries an explicit "doc_id".
inline LoadResult load_corpus(const std::filesystem::path& path, InputSchema schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    LoadResult result;
    std::unordered_set<std::string> seen_ids;
    std::unordered_set<std::string> article_threads;
    std::string line;
    std::size_t lineno = 0;
    auto skip = [&](std::string reason) { result.skipped.push_back({lineno, std::move(reason)}); };

    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_blank(line)) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            skip(std::string("malformed JSON: ") + e.what());
            continue;
        }
        if (!obj.is_object()) {
            skip("not a JSON object");
            continue;
        }

        Document doc;
        auto news_id = detail::json_string(obj, "news_id");
        if (!news_id || news_id->empty()) {
            skip("missing news_id");
            continue;
        }
        doc.news_id = *news_id;

        if (schema == InputSchema::ArticlesJsonl) {
            doc.kind = DocKind::Article;
            auto text = detail::json_string(obj, "text");
            if (!text || detail::is_blank(*text)) {
                skip("empty text");
                continue;
            }
            if (article_threads.count(doc.news_id)) {
                skip("duplicate article for news_id " + doc.news_id);
                continue;
            }
            doc.text = std::move(*text);
            doc.title = detail::json_string(obj, "title");
            doc.url = detail::json_string(obj, "url");
            doc.timestamp = detail::json_string(obj, "release_time").value_or("");
            doc.doc_id = detail::json_string(obj, "doc_id").value_or("A" + doc.news_id);
        } else {
            doc.kind = DocKind::Comment;
            auto clean = detail::json_string(obj, "clean_comment");
            auto raw = detail::json_string(obj, "raw_comment");
            if (clean && !detail::is_blank(*clean))
                doc.text = std::move(*clean);
            else if (raw && !detail::is_blank(*raw))
                doc.text = std::move(*raw);
            else {
                skip("empty text");
                continue;
            }
            doc.username = detail::json_string(obj, "username");
            doc.timestamp = detail::json_string(obj, "date").value_or("");
            auto reply = obj.find("is_reply");
            if (reply != obj.end() && reply->is_boolean())
                doc.is_reply = reply->get<bool>();
            else
                doc.is_reply = false;
            doc.doc_id = detail::json_string(obj, "doc_id")
                             .value_or("C" + doc.news_id + "#" + std::to_string(lineno));
        }

        if (!seen_ids.insert(doc.doc_id).second) {
            skip("duplicate doc_id " + doc.doc_id);
            continue;
        }
        if (doc.kind == DocKind::Article) article_threads.insert(doc.news_id);
        result.documents.push_back(std::move(doc));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Tokenisation

namespace detail {

// Letters, numbers and combining marks form tokens. Everything else
// (punctuation, symbols, whitespace, controls, invalid UTF-8) separates.
inline bool is_token_char(UChar32 c) {
    if (c < 0) return false;
    return (U_GET_GC_MASK(c) & (U_GC_L_MASK | U_GC_N_MASK | U_GC_M_MASK)) != 0;
}

inline void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, c, error);
    if (!error) out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace detail

/// Splits at every maximal run of non-token characters and lowercases with
/// the Unicode simple case mapping.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(bytes, i, length, c);
        if (detail::is_token_char(c)) {
            detail::append_utf8(current, u_tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// ---------------------------------------------------------------------------
// Stopwords

class StopList {
public:
    StopList() = default;
    explicit StopList(std::unordered_set<std::string> entries) : entries_(std::move(entries)) {}

    /// NLTK English stopwords + integers 1..999 + the given custom entries.
    static StopList standard(std::span<const std::string> custom = {}) {
        StopList list;
        for (auto w : english_defaults()) list.entries_.emplace(w);
        for (int n = 1; n <= 999; ++n) list.entries_.insert(std::to_string(n));
        for (const auto& w : custom) list.entries_.insert(w);
        return list;
    }

    /// Newline-delimited file; blank lines and lines starting with '#' are ignored.
    static std::vector<std::string> read_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open stopword file " + path.string());
        std::vector<std::string> words;
        std::string line;
        while (std::getline(in, line)) {
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            auto last = line.find_last_not_of(" \t\r");
            words.push_back(line.substr(first, last - first + 1));
        }
        return words;
    }

    bool contains(std::string_view token) const { return entries_.count(std::string(token)) != 0; }
    std::size_t size() const { return entries_.size(); }
    const std::unordered_set<std::string>& entries() const { return entries_; }

    static std::span<const std::string_view> english_defaults() {
        static constexpr std::string_view words[] = {
            "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
            "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his",
            "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself",
            "they", "them", "their", "theirs", "themselves", "what", "which", "who", "whom",
            "this", "that", "that'll", "these", "those", "am", "is", "are", "was", "were", "be",
            "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a",
            "an", "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at",
            "by", "for", "with", "about", "against", "between", "into", "through", "during",
            "before", "after", "above", "below", "to", "from", "up", "down", "in", "out", "on",
            "off", "over", "under", "again", "further", "then", "once", "here", "there", "when",
            "where", "why", "how", "all", "any", "both", "each", "few", "more", "most", "other",
            "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too",
            "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've",
            "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn",
            "couldn't", "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't",
            "haven", "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't",
            "needn", "needn't", "shan", "shan't", "shouldn", "shouldn't", "wasn", "wasn't",
            "weren", "weren't", "won", "won't", "wouldn", "wouldn't"};
        return words;
    }

private:
    std::unordered_set<std::string> entries_;
};

inline std::vector<std::string> filter_stopwords(std::span<const std::string> tokens, const StopList& stoplist) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stoplist.contains(t)) kept.push_back(t);
    return kept;
}

// ---------------------------------------------------------------------------
// Dictionary and bag-of-words

using TermId = std::uint32_t;

class Dictionary {
public:
    Dictionary() = default;

    /// Rebuilds a dictionary from its serialised parts.
    Dictionary(std::vector<std::string> tokens, std::vector<std::uint32_t> doc_freq)
        : id_to_token_(std::move(tokens)), doc_freq_(std::move(doc_freq)) {
        if (id_to_token_.size() != doc_freq_.size())
            throw ArgumentError("dictionary tokens and doc_freq differ in length");
        for (std::size_t i = 0; i < id_to_token_.size(); ++i)
            if (!token_to_id_.emplace(id_to_token_[i], static_cast<TermId>(i)).second)
                throw ArgumentError("duplicate dictionary token: " + id_to_token_[i]);
    }

    std::size_t size() const { return id_to_token_.size(); }
    const std::string& token(TermId id) const { return id_to_token_.at(id); }
    std::uint32_t doc_freq(TermId id) const { return doc_freq_.at(id); }
    const std::vector<std::string>& tokens() const { return id_to_token_; }
    const std::vector<std::uint32_t>& doc_freqs() const { return doc_freq_; }

    std::optional<TermId> find(std::string_view token) const {
        auto it = token_to_id_.find(std::string(token));
        if (it == token_to_id_.end()) return std::nullopt;
        return it->second;
    }

    /// SHA-256 over the id-ordered vocabulary; identifies a dictionary version.
    std::string fingerprint() const {
        std::string joined;
        for (const auto& t : id_to_token_) {
            joined += t;
            joined.push_back('\n');
        }
        return io::sha256_hex(joined);
    }

private:
    std::unordered_map<std::string, TermId> token_to_id_;
    std::vector<std::string> id_to_token_;
    std::vector<std::uint32_t> doc_freq_;
};

/// Ids follow first occurrence; tokens seen in fewer than min_doc_freq
/// documents are dropped and the remaining ids recompacted in order.
inline Dictionary build_dictionary(std::span<const std::vector<std::string>> token_docs,
                                   std::uint32_t min_doc_freq = 1) {
    if (min_doc_freq < 1) throw ArgumentError("min_doc_freq must be >= 1");
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> order;
    std::vector<std::uint32_t> df;
    std::unordered_set<std::size_t> in_doc;
    for (const auto& doc : token_docs) {
        in_doc.clear();
        for (const auto& tok : doc) {
            auto [it, inserted] = index.emplace(tok, order.size());
            if (inserted) {
                order.push_back(tok);
                df.push_back(0);
            }
            if (in_doc.insert(it->second).second) ++df[it->second];
        }
    }
    std::vector<std::string> kept_tokens;
    std::vector<std::uint32_t> kept_df;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (df[i] >= min_doc_freq) {
            kept_tokens.push_back(std::move(order[i]));
            kept_df.push_back(df[i]);
        }
    }
    if (kept_tokens.empty()) throw DataError("empty vocabulary");
    return Dictionary(std::move(kept_tokens), std::move(kept_df));
}

struct BowEntry {
    TermId term = 0;
    std::uint32_t count = 0;
    friend bool operator==(const BowEntry&, const BowEntry&) = default;
};

struct BowDocument {
    std::vector<BowEntry> entries;  // strictly increasing term ids
    std::string doc_id;

    std::uint64_t total_count() const {
        std::uint64_t n = 0;
        for (const auto& e : entries) n += e.count;
        return n;
    }
    bool empty() const { return entries.empty(); }
    friend bool operator==(const BowDocument&, const BowDocument&) = default;
};

inline BowDocument doc_to_bow(const Dictionary& dict, std::span<const std::string> tokens, std::string doc_id = {}) {
    std::map<TermId, std::uint32_t> counts;
    for (const auto& tok : tokens)
        if (auto id = dict.find(tok)) ++counts[*id];
    BowDocument bow;
    bow.doc_id = std::move(doc_id);
    bow.entries.reserve(counts.size());
    for (auto [id, c] : counts) bow.entries.push_back({id, c});
    return bow;
}

// ---------------------------------------------------------------------------
// Train/test split

struct SplitCorpus {
    std::vector<BowDocument> train;
    std::vector<BowDocument> test;
    std::vector<std::size_t> train_index;  // positions in the input corpus
    std::vector<std::size_t> test_index;
    std::uint64_t seed = 0;
    double ratio = 0.9;
};

/// Seeded shuffle, then the first round(ratio * N) documents go to train.
inline SplitCorpus split_train_test(std::span<const BowDocument> corpus, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("split ratio must lie in (0, 1)");
    if (corpus.empty()) throw ArgumentError("cannot split an empty corpus");
    SplitCorpus split;
    split.seed = seed;
    split.ratio = ratio;
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(corpus.size())));
    auto perm = seeded_permutation(corpus.size(), seed);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (i < n_train) {
            split.train.push_back(corpus[perm[i]]);
            split.train_index.push_back(perm[i]);
        } else {
            split.test.push_back(corpus[perm[i]]);
            split.test_index.push_back(perm[i]);
        }
    }
    return split;
}

// ---------------------------------------------------------------------------
// Whole-corpus preprocessing

struct PreprocessOptions {
    bool include_title = false;
    std::uint32_t min_doc_freq = 1;
};

/// Documents with their filtered tokens, the dictionary and the encoded corpus,
/// all index-aligned.
struct PreparedCorpus {
    std::vector<Document> documents;
    std::vector<std::vector<std::string>> tokens;
    Dictionary dictionary;
    std::vector<BowDocument> bows;
};

inline std::vector<std::string> preprocess_text(const Document& doc, const StopList& stoplist,
                                                const PreprocessOptions& options) {
    std::string text = doc.text;
    if (options.include_title && doc.title && !doc.title->empty()) text = *doc.title + "\n" + text;
    auto toks = tokenize(text);
    return filter_stopwords(toks, stoplist);
}

inline PreparedCorpus prepare_corpus(std::vector<Document> documents, const StopList& stoplist,
                                     const PreprocessOptions& options = {}) {
    PreparedCorpus out;
    out.tokens.reserve(documents.size());
    for (const auto& doc : documents) out.tokens.push_back(preprocess_text(doc, stoplist, options));
    out.dictionary = build_dictionary(out.tokens, options.min_doc_freq);
    out.bows.reserve(documents.size());
    for (std::size_t i = 0; i < documents.size(); ++i)
        out.bows.push_back(doc_to_bow(out.dictionary, out.tokens[i], documents[i].doc_id));
    out.documents = std::move(documents);
    return out;
}

}  // namespace newstopics
