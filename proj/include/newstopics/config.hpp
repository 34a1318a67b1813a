#pragma once

// Run configuration: an INI file with fixed sections and keys. Every key has a
// documented default; unknown sections or keys are rejected.

#include "coherence.hpp"
#include "error.hpp"
#include "inconsistency.hpp"
#include "lda.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace newstopics {

struct ConfigKey {
    const char* name;  // "section.key"
    const char* default_value;
    const char* help;
};

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"run.seed", "42", "master seed; per-stage seeds are derived from it"},
        {"input.articles", "", "articles JSONL file (required)"},
        {"input.comments", "", "comments JSONL file (required)"},
        {"input.stopwords", "", "extra stopword file; empty for none"},
        {"input.include_title", "false", "prepend article titles to the body text"},
        {"preprocess.min_doc_freq", "1", "drop tokens found in fewer documents"},
        {"preprocess.split_ratio", "0.9", "fraction of shuffled documents used for training"},
        {"lda.num_topics", "7", "number of topics (ignored when selection runs)"},
        {"lda.iterations", "10", "E-step iteration cap per document"},
        {"lda.chunksize", "100", "documents per update"},
        {"lda.passes", "5", "sweeps over the training corpus"},
        {"lda.alpha", "symmetric", "'symmetric' (1/K), one number, or K comma-separated numbers"},
        {"lda.eta", "symmetric", "'symmetric' (1/K) or a number"},
        {"lda.kappa", "0.5", "step-size decay exponent in [0.5, 1]"},
        {"lda.tau0", "1.0", "step-size offset"},
        {"lda.gamma_threshold", "0.001", "E-step convergence tolerance"},
        {"coherence.topn", "20", "top words per topic used for C_v"},
        {"coherence.window_size", "110", "sliding window width in tokens"},
        {"coherence.eps", "1e-12", "NPMI smoothing"},
        {"coherence.set_vector", "sum", "topic-side context vector: sum | union"},
        {"selection.num_topics", "", "topic counts to sweep, e.g. 2-17 or 2-50:10; empty disables"},
        {"selection.tolerance", "0.01", "pick the smallest K within this C_v of the best"},
        {"selection.test", "false", "also score the test split during selection"},
        {"analysis.topn_terms", "7", "terms per topic in topic_terms.csv"},
        {"analysis.keywords", "", "comma-separated keywords; empty uses each topic's top 3 terms"},
        {"analysis.keyword_floor", "0.001", "minimum P(word | topic) for keyword topic lists"},
        {"inconsistency.threshold", "0.6", "similarity below which a thread counts as inconsistent"},
        {"inconsistency.bin_edges", "0,0.2,0.4,0.6,0.8,1.0", "histogram bin edges"},
        {"inconsistency.aggregation", "mean_distribution", "mean_distribution | mean_similarity"},
    };
    return keys;
}

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ArgumentError("invalid value for " + key + ": '" + text + "'");
    return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ArgumentError("invalid boolean for " + key + ": '" + text + "'");
}

}  // namespace detail

/// "2,5,7", "2-17" and "2-50:10" forms, mixed freely.
inline std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : detail::split_list(text)) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(detail::parse_number<std::size_t>(key, item));
            continue;
        }
        std::string rest = item.substr(dash + 1);
        std::size_t step = 1;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            step = detail::parse_number<std::size_t>(key, rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const auto lo = detail::parse_number<std::size_t>(key, item.substr(0, dash));
        const auto hi = detail::parse_number<std::size_t>(key, rest);
        if (step == 0 || hi < lo) throw ArgumentError("invalid range for " + key + ": '" + item + "'");
        for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : detail::split_list(text)) out.push_back(detail::parse_number<double>(key, item));
    return out;
}

/// Fully resolved settings, one field per config key.
struct PipelineConfig {
    std::uint64_t seed = 42;
    std::filesystem::path articles;
    std::filesystem::path comments;
    std::filesystem::path stopwords;
    PreprocessOptions preprocess;
    double split_ratio = 0.9;
    LdaParams lda{7};
    CoherenceOptions coherence;
    std::vector<std::size_t> selection_topics;
    double selection_tolerance = 0.01;
    bool selection_test = false;
    std::size_t topn_terms = 7;
    std::vector<std::string> keywords;
    double keyword_floor = 0.001;
    double threshold = 0.6;
    std::vector<double> bin_edges;
    CommentAggregation aggregation = CommentAggregation::MeanDistribution;

    /// The string key map this config was built from (defaults filled in,
    /// input paths absolute). Recorded in the run manifest.
    std::map<std::string, std::string> values;
};

/// Alpha setting applied to a given K.
inline std::vector<double> resolve_alpha(const std::string& text, std::size_t k) {
    if (text == "symmetric") return std::vector<double>(k, 1.0 / static_cast<double>(k));
    auto list = parse_double_list("lda.alpha", text);
    if (list.size() == 1) return std::vector<double>(k, list[0]);
    if (list.size() != k) throw ArgumentError("lda.alpha must have 1 or num_topics entries");
    return list;
}

inline double resolve_eta(const std::string& text, std::size_t k) {
    if (text == "symmetric") return 1.0 / static_cast<double>(k);
    return detail::parse_number<double>("lda.eta", text);
}

/// LdaParams for K topics under this configuration's alpha/eta settings.
inline LdaParams lda_params_for(const PipelineConfig& cfg, std::size_t k) {
    LdaParams p = cfg.lda;
    p.set_num_topics(k);
    p.alpha = resolve_alpha(cfg.values.at("lda.alpha"), k);
    p.eta = resolve_eta(cfg.values.at("lda.eta"), k);
    p.validate();
    return p;
}

inline PipelineConfig config_from_values(std::map<std::string, std::string> given) {
    std::map<std::string, std::string> values;
    for (const auto& key : config_keys()) values[key.name] = key.default_value;
    for (auto& [k, v] : given) {
        if (!values.count(k)) throw ArgumentError("unknown config key: " + k);
        values[k] = detail::trim(v);
    }

    PipelineConfig c;
    auto num = [&](const char* key) { return detail::parse_number<std::size_t>(key, values.at(key)); };
    auto real = [&](const char* key) { return detail::parse_number<double>(key, values.at(key)); };

    c.seed = detail::parse_number<std::uint64_t>("run.seed", values.at("run.seed"));
    c.articles = values.at("input.articles");
    c.comments = values.at("input.comments");
    c.stopwords = values.at("input.stopwords");
    c.preprocess.include_title = detail::parse_bool("input.include_title", values.at("input.include_title"));
    c.preprocess.min_doc_freq = static_cast<std::uint32_t>(num("preprocess.min_doc_freq"));
    if (c.preprocess.min_doc_freq < 1) throw ArgumentError("preprocess.min_doc_freq must be >= 1");
    c.split_ratio = real("preprocess.split_ratio");
    if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) throw ArgumentError("preprocess.split_ratio must lie in (0, 1)");

    const auto k = num("lda.num_topics");
    if (k < 1) throw ArgumentError("lda.num_topics must be >= 1");
    c.lda = LdaParams(k);
    c.lda.iterations = num("lda.iterations");
    c.lda.chunksize = num("lda.chunksize");
    c.lda.passes = num("lda.passes");
    c.lda.kappa = real("lda.kappa");
    c.lda.tau0 = real("lda.tau0");
    c.lda.gamma_threshold = real("lda.gamma_threshold");
    c.lda.seed = derive_seed(c.seed, "lda");
    c.lda.alpha = resolve_alpha(values.at("lda.alpha"), k);
    c.lda.eta = resolve_eta(values.at("lda.eta"), k);
    c.lda.validate();

    c.coherence.topn = num("coherence.topn");
    c.coherence.window_size = num("coherence.window_size");
    c.coherence.eps = real("coherence.eps");
    const auto& sv = values.at("coherence.set_vector");
    if (sv == "sum")
        c.coherence.set_vector = SetVector::Sum;
    else if (sv == "union")
        c.coherence.set_vector = SetVector::BooleanUnion;
    else
        throw ArgumentError("coherence.set_vector must be sum or union");
    if (c.coherence.topn < 2 || c.coherence.window_size < 1 || !(c.coherence.eps > 0.0))
        throw ArgumentError("invalid coherence settings");

    c.selection_topics = parse_size_list("selection.num_topics", values.at("selection.num_topics"));
    for (auto v : c.selection_topics)
        if (v < 1) throw ArgumentError("selection.num_topics entries must be >= 1");
    c.selection_tolerance = real("selection.tolerance");
    c.selection_test = detail::parse_bool("selection.test", values.at("selection.test"));

    c.topn_terms = num("analysis.topn_terms");
    if (c.topn_terms < 1) throw ArgumentError("analysis.topn_terms must be >= 1");
    c.keywords = detail::split_list(values.at("analysis.keywords"));
    c.keyword_floor = real("analysis.keyword_floor");

    c.threshold = real("inconsistency.threshold");
    if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ArgumentError("inconsistency.threshold must lie in (0, 1)");
    c.bin_edges = parse_double_list("inconsistency.bin_edges", values.at("inconsistency.bin_edges"));
    const auto& agg = values.at("inconsistency.aggregation");
    if (agg == "mean_distribution")
        c.aggregation = CommentAggregation::MeanDistribution;
    else if (agg == "mean_similarity")
        c.aggregation = CommentAggregation::MeanSimilarity;
    else
        throw ArgumentError("inconsistency.aggregation must be mean_distribution or mean_similarity");

    c.values = std::move(values);
    return c;
}

/// Makes relative input paths absolute against `base`.
inline void resolve_input_paths(std::map<std::string, std::string>& given, const std::filesystem::path& base) {
    for (const char* key : {"input.articles", "input.comments", "input.stopwords"}) {
        auto it = given.find(key);
        if (it == given.end()) continue;
        auto value = detail::trim(it->second);
        if (value.empty()) continue;
        std::filesystem::path p(value);
        if (p.is_relative()) p = base / p;
        it->second = p.lexically_normal().string();
    }
}

/// Reads an INI file. Relative input paths resolve against the file's directory;
/// relative paths in `overrides` ("section.key" -> value) resolve against the
/// working directory.
inline PipelineConfig load_config(const std::filesystem::path& path,
                                  std::map<std::string, std::string> overrides = {}) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ArgumentError(std::string("cannot read config: ") + e.what());
    }
    std::map<std::string, std::string> given;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            if (!body.data().empty()) throw ArgumentError("config key outside a section: " + section);
            continue;
        }
        for (const auto& [key, value] : body) given[section + "." + key] = value.get_value<std::string>();
    }
    resolve_input_paths(given, std::filesystem::absolute(path).parent_path());
    resolve_input_paths(overrides, std::filesystem::current_path());
    for (auto& [k, v] : overrides) given[k] = std::move(v);
    return config_from_values(std::move(given));
}

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : c.values) j[k] = v;
    return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    std::map<std::string, std::string> given;
    for (const auto& [k, v] : j.items()) given[k] = v.get<std::string>();
    return config_from_values(std::move(given));
}

/// Annotated INI text listing every key with its default.
inline std::string default_config_text() {
    std::string out;
    std::string section;
    for (const auto& key : config_keys()) {
        std::string name = key.name;
        const auto dot = name.find('.');
        if (name.substr(0, dot) != section) {
            section = name.substr(0, dot);
            out += (out.empty() ? "" : "\n") + std::string("[") + section + "]\n";
        }
        out += "; " + std::string(key.help) + "\n" + name.substr(dot + 1) + " = " + key.default_value + "\n";
    }
    return out;
}

}  // namespace newstopics
