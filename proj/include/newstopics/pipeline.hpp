#pragma once

// End-to-end workflow: preprocess, split, optional topic-count selection,
// final training, topic analysis, article-comment inconsistency, and a report
// bundle with a manifest of content hashes.

#include "analysis.hpp"
#include "coherence.hpp"
#include "config.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "inconsistency.hpp"
#include "io.hpp"
#include "lda.hpp"
#include "stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace newstopics {

inline constexpr const char* kVersion = "1.0.0";

/// A failure attributed to one pipeline stage.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause)
        : Error("[" + stage + "] " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

template <class F>
auto run_stage(const std::string& stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

// ---------------------------------------------------------------------------
// Training data and sweeps

/// Split corpus plus the token lists each side is scored against.
struct TrainingData {
    std::shared_ptr<const Dictionary> dictionary;
    SplitCorpus split;
    std::vector<std::vector<std::string>> train_tokens;
    std::vector<std::vector<std::string>> test_tokens;
};

inline TrainingData make_training_data(const PreparedCorpus& corpus, double ratio, std::uint64_t split_seed) {
    TrainingData data;
    data.dictionary = std::make_shared<const Dictionary>(corpus.dictionary);
    data.split = split_train_test(corpus.bows, ratio, split_seed);
    for (auto i : data.split.train_index) data.train_tokens.push_back(corpus.tokens[i]);
    for (auto i : data.split.test_index) data.test_tokens.push_back(corpus.tokens[i]);
    return data;
}

enum class SweepParameter { NumTopics, Iterations, Chunksize, Passes };

inline std::string_view to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::NumTopics: return "num_topics";
        case SweepParameter::Iterations: return "iterations";
        case SweepParameter::Chunksize: return "chunksize";
        case SweepParameter::Passes: return "passes";
    }
    return "?";
}

inline SweepParameter parse_sweep_parameter(std::string_view s) {
    for (auto p : {SweepParameter::NumTopics, SweepParameter::Iterations, SweepParameter::Chunksize,
                   SweepParameter::Passes})
        if (to_string(p) == s) return p;
    throw ArgumentError("unknown sweep parameter: " + std::string(s));
}

struct SweepSpec {
    SweepParameter parameter = SweepParameter::NumTopics;
    std::vector<std::size_t> values;
    LdaParams base;  // fixed values for the other parameters, and the seed
    CoherenceOptions coherence;
    bool evaluate_test = false;
    /// Alpha/eta for a swept K; defaults to symmetric 1/K.
    std::function<LdaParams(std::size_t)> params_for_topics;
};

struct SweepRow {
    std::size_t value = 0;
    bool ok = false;
    double train_cv = 0.0;
    std::optional<double> test_cv;
    double wall_seconds = 0.0;
    std::string error;
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::NumTopics;
    LdaParams base;
    CoherenceOptions coherence;
    std::vector<SweepRow> rows;
};

inline LdaParams sweep_params(const SweepSpec& spec, std::size_t value) {
    LdaParams p = spec.base;
    switch (spec.parameter) {
        case SweepParameter::NumTopics:
            if (spec.params_for_topics) {
                p = spec.params_for_topics(value);
            } else {
                p.set_num_topics(value);
            }
            break;
        case SweepParameter::Iterations: p.iterations = value; break;
        case SweepParameter::Chunksize: p.chunksize = value; break;
        case SweepParameter::Passes: p.passes = value; break;
    }
    p.validate();
    return p;
}

/// Trains one model per value (same seed throughout) and scores C_v on the
/// training tokens, plus the test tokens when requested. A failed training
/// marks its row and the sweep moves on.
inline SweepResult run_sweep(const TrainingData& data, const SweepSpec& spec) {
    if (spec.values.empty()) throw ArgumentError("sweep needs at least one value");
    for (auto v : spec.values) {
        if (v < 1) throw ArgumentError("sweep values must be >= 1");
        sweep_params(spec, v);
    }
    SweepResult result;
    result.parameter = spec.parameter;
    result.base = spec.base;
    result.coherence = spec.coherence;
    for (auto v : spec.values) {
        SweepRow row;
        row.value = v;
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto model = train(data.dictionary, data.split.train, sweep_params(spec, v));
            row.train_cv = model_coherence(model, data.train_tokens, spec.coherence).aggregate;
            if (spec.evaluate_test && !data.test_tokens.empty())
                row.test_cv = model_coherence(model, data.test_tokens, spec.coherence).aggregate;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.rows.push_back(std::move(row));
    }
    return result;
}

inline std::string sweep_csv(const SweepResult& r, bool include_timing) {
    std::string out = "parameter,value,status,train_cv,test_cv";
    if (include_timing) out += ",wall_seconds";
    out += ",num_topics,iterations,chunksize,passes,seed,topn,window_size\n";
    for (const auto& row : r.rows) {
        auto p = r.base;
        switch (r.parameter) {
            case SweepParameter::NumTopics: p.num_topics = row.value; break;
            case SweepParameter::Iterations: p.iterations = row.value; break;
            case SweepParameter::Chunksize: p.chunksize = row.value; break;
            case SweepParameter::Passes: p.passes = row.value; break;
        }
        out += std::string(to_string(r.parameter)) + "," + std::to_string(row.value) + "," +
               (row.ok ? "ok" : io::csv_field("failed: " + row.error)) + "," +
               (row.ok ? io::format_double(row.train_cv) : "") + "," +
               (row.test_cv ? io::format_double(*row.test_cv) : "");
        if (include_timing) out += "," + io::format_double(row.wall_seconds);
        out += "," + std::to_string(p.num_topics) + "," + std::to_string(p.iterations) + "," +
               std::to_string(p.chunksize) + "," + std::to_string(p.passes) + "," + std::to_string(p.seed) + "," +
               std::to_string(r.coherence.topn) + "," + std::to_string(r.coherence.window_size) + "\n";
    }
    return out;
}

struct DecouplingResult {
    SweepResult base;
    SweepResult alternate;
    double pearson_r = 0.0;
};

/// Repeats a sweep at a second topic count and correlates the two coherence
/// curves. Strong correlation supports tuning the parameter independently of K.
inline DecouplingResult decoupling_check(const TrainingData& data, const SweepSpec& spec, std::size_t alt_num_topics) {
    if (spec.parameter == SweepParameter::NumTopics) throw ArgumentError("decoupling check needs a non-topic sweep");
    DecouplingResult out;
    out.base = run_sweep(data, spec);
    SweepSpec alt = spec;
    alt.base = spec.params_for_topics ? spec.params_for_topics(alt_num_topics) : spec.base;
    if (!spec.params_for_topics) alt.base.set_num_topics(alt_num_topics);
    alt.base.iterations = spec.base.iterations;
    alt.base.chunksize = spec.base.chunksize;
    alt.base.passes = spec.base.passes;
    alt.base.seed = spec.base.seed;
    out.alternate = run_sweep(data, alt);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < out.base.rows.size(); ++i) {
        const auto& ra = out.base.rows[i];
        const auto& rb = out.alternate.rows[i];
        if (!ra.ok) throw DataError("sweep row failed: " + ra.error);
        if (!rb.ok) throw DataError("sweep row failed: " + rb.error);
        a.push_back(ra.train_cv);
        b.push_back(rb.train_cv);
    }
    out.pearson_r = stats::pearson(a, b);
    return out;
}

/// Smallest topic count whose training C_v is within `tolerance` of the best.
inline std::size_t select_num_topics(const SweepResult& sweep, double tolerance) {
    if (sweep.parameter != SweepParameter::NumTopics) throw ArgumentError("selection needs a num_topics sweep");
    std::optional<double> best;
    for (const auto& row : sweep.rows)
        if (row.ok && (!best || row.train_cv > *best)) best = row.train_cv;
    if (!best) throw DataError("every sweep row failed");
    std::optional<std::size_t> chosen;
    for (const auto& row : sweep.rows)
        if (row.ok && row.train_cv >= *best - tolerance && (!chosen || row.value < *chosen)) chosen = row.value;
    return *chosen;
}

// ---------------------------------------------------------------------------
// Preprocessed corpus on disk (used between CLI stages)

inline void write_prepared(const PreparedCorpus& corpus, const std::filesystem::path& dir) {
    const auto& dict = corpus.dictionary;
    nlohmann::json jd = {{"fingerprint", dict.fingerprint()}, {"tokens", dict.tokens()}, {"doc_freq", dict.doc_freqs()}};
    io::write_file(dir / "dictionary.json", jd.dump() + "\n");
    std::string docs;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const auto& d = corpus.documents[i];
        nlohmann::json j = {{"doc_id", d.doc_id},
                            {"news_id", d.news_id},
                            {"kind", to_string(d.kind)},
                            {"timestamp", d.timestamp},
                            {"tokens", corpus.tokens[i]}};
        if (d.is_reply) j["is_reply"] = *d.is_reply;
        docs += j.dump() + "\n";
    }
    io::write_file(dir / "documents.jsonl", docs);
}

inline PreparedCorpus read_prepared(const std::filesystem::path& dir) {
    PreparedCorpus corpus;
    try {
        auto jd = nlohmann::json::parse(io::read_file(dir / "dictionary.json"));
        corpus.dictionary = Dictionary(jd.at("tokens").get<std::vector<std::string>>(),
                                       jd.at("doc_freq").get<std::vector<std::uint32_t>>());
        if (corpus.dictionary.fingerprint() != jd.at("fingerprint").get<std::string>())
            throw DataError("dictionary fingerprint mismatch");
        std::istringstream in(io::read_file(dir / "documents.jsonl"));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line);
            Document d;
            d.doc_id = j.at("doc_id").get<std::string>();
            d.news_id = j.at("news_id").get<std::string>();
            d.kind = parse_doc_kind(j.at("kind").get<std::string>());
            d.timestamp = j.value("timestamp", "");
            if (j.contains("is_reply")) d.is_reply = j.at("is_reply").get<bool>();
            corpus.tokens.push_back(j.at("tokens").get<std::vector<std::string>>());
            corpus.bows.push_back(doc_to_bow(corpus.dictionary, corpus.tokens.back(), d.doc_id));
            corpus.documents.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid preprocessed corpus in " + dir.string() + ": " + e.what());
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// Analysis products shared by the CLI stages and the pipeline

/// Topic distributions for every document; empty bags of words get none.
inline std::vector<std::optional<TopicDistribution>> infer_all(const LdaModel& model, const PreparedCorpus& corpus) {
    std::vector<std::optional<TopicDistribution>> out;
    out.reserve(corpus.bows.size());
    for (const auto& bow : corpus.bows) {
        if (bow.empty())
            out.emplace_back(std::nullopt);
        else
            out.emplace_back(model.infer(bow));
    }
    return out;
}

struct AnalysisReport {
    std::string topic_terms_csv;
    std::string keyword_topics_csv;
    nlohmann::json topic_shares;
    nlohmann::json topic_overview;
};

inline std::vector<std::string> default_keywords(const LdaModel& model) {
    std::vector<std::string> words;
    const std::size_t n = std::min<std::size_t>(3, model.vocab_size());
    for (std::size_t k = 0; k < model.num_topics(); ++k)
        for (auto& t : model.topic_terms(k, n))
            if (std::find(words.begin(), words.end(), t.token) == words.end()) words.push_back(std::move(t.token));
    return words;
}

inline AnalysisReport analyze(const LdaModel& model, const PreparedCorpus& corpus,
                              const std::vector<std::optional<TopicDistribution>>& dists, std::size_t topn_terms,
                              std::vector<std::string> keywords, double keyword_floor) {
    AnalysisReport r;
    std::vector<TopicDistribution> present;
    std::vector<DocumentTopics> docs;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        if (!dists[i]) continue;
        present.push_back(*dists[i]);
        docs.push_back({corpus.documents[i].doc_id, *dists[i]});
    }
    if (present.empty()) throw DataError("no document has any in-vocabulary token");

    r.topic_terms_csv = topic_terms_csv(model, topn_terms);
    if (keywords.empty()) keywords = default_keywords(model);
    r.keyword_topics_csv = keyword_topics_csv(model, keywords, keyword_floor);

    const auto share = dominant_topic_shares(present);
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& rep : representative_documents(docs)) {
        if (rep)
            reps.push_back({{"doc_id", rep->doc_id}, {"probability", rep->probability}});
        else
            reps.push_back(nullptr);
    }
    r.topic_shares = to_json(share);
    r.topic_shares["n_documents"] = present.size();
    r.topic_shares["representatives"] = reps;

    if (model.num_topics() >= 2)
        r.topic_overview = to_json(topic_overview(model, present));
    else
        r.topic_overview = {{"error", "nothing to embed"}, {"shares", share.proportions}};
    return r;
}

struct InconsistencyReport {
    std::string records_csv;
    nlohmann::json histogram;
    nlohmann::json profile;
};

inline InconsistencyReport inconsistency_report(const PreparedCorpus& corpus,
                                                const std::vector<std::optional<TopicDistribution>>& dists,
                                                CommentAggregation aggregation, std::span<const double> edges,
                                                double threshold) {
    InconsistencyReport r;
    const auto grouping = group_threads(corpus.documents, dists);
    std::vector<InconsistencyRecord> records;
    for (const auto& g : grouping.groups) records.push_back(thread_similarity(g, aggregation));
    r.records_csv = records_csv(records);

    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& e : grouping.excluded) excluded.push_back({{"news_id", e.news_id}, {"reason", e.reason}});
    if (records.empty()) {
        r.histogram = {{"error", "no comparable threads"}, {"n_records", 0}, {"excluded_threads", excluded}};
        r.profile = {{"error", "no comparable threads"}, {"threshold", threshold}};
        return r;
    }
    r.histogram = to_json(similarity_histogram(records, edges));
    r.histogram["n_records"] = records.size();
    r.histogram["excluded_threads"] = excluded;

    std::vector<TopicDistribution> present;
    for (const auto& d : dists)
        if (d) present.push_back(*d);
    try {
        r.profile = to_json(inconsistent_topic_profile(records, present, threshold));
    } catch (const DataError& e) {
        // An empty selection or flat profile is a finding, not a failure.
        r.profile = {{"error", e.what()}, {"threshold", threshold}};
    }
    return r;
}

// ---------------------------------------------------------------------------
// Full run

struct ArtifactFile {
    std::string path;  // relative to the output directory
    std::string contents;
};

struct Artifact {
    std::string name;
    std::vector<ArtifactFile> files;
};

struct ReportBundle {
    std::filesystem::path output_dir;
    nlohmann::json manifest;
    std::vector<Artifact> artifacts;
};

inline StopList stoplist_for(const PipelineConfig& cfg) {
    std::vector<std::string> custom;
    if (!cfg.stopwords.empty()) custom = StopList::read_file(cfg.stopwords);
    return StopList::standard(custom);
}

/// Runs every stage in memory, then writes all artifacts and manifest.json.
/// Nothing is left in output_dir if any stage or write fails.
inline ReportBundle run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& output_dir) {
    const auto split_seed = derive_seed(cfg.seed, "split");

    struct Loaded {
        PreparedCorpus corpus;
        std::size_t articles = 0, comments = 0, skipped_articles = 0, skipped_comments = 0;
    };
    auto loaded = run_stage("preprocess", [&] {
        if (cfg.articles.empty()) throw ArgumentError("input.articles is required");
        if (cfg.comments.empty()) throw ArgumentError("input.comments is required");
        auto a = load_corpus(cfg.articles, InputSchema::ArticlesJsonl);
        auto c = load_corpus(cfg.comments, InputSchema::CommentsJsonl);
        Loaded l;
        l.articles = a.documents.size();
        l.comments = c.documents.size();
        l.skipped_articles = a.skipped.size();
        l.skipped_comments = c.skipped.size();
        std::vector<Document> docs = std::move(a.documents);
        std::unordered_set<std::string> ids;
        for (const auto& d : docs) ids.insert(d.doc_id);
        for (auto& d : c.documents) {
            if (!ids.insert(d.doc_id).second) throw DataError("doc_id shared by article and comment: " + d.doc_id);
            docs.push_back(std::move(d));
        }
        l.corpus = prepare_corpus(std::move(docs), stoplist_for(cfg), cfg.preprocess);
        return l;
    });
    const auto& corpus = loaded.corpus;

    auto data = run_stage("split", [&] { return make_training_data(corpus, cfg.split_ratio, split_seed); });

    std::vector<Artifact> artifacts;
    std::size_t num_topics = cfg.lda.num_topics;
    nlohmann::json selection = nullptr;
    if (!cfg.selection_topics.empty()) {
        run_stage("sweep", [&] {
            SweepSpec spec;
            spec.parameter = SweepParameter::NumTopics;
            spec.values = cfg.selection_topics;
            spec.base = cfg.lda;
            spec.coherence = cfg.coherence;
            spec.evaluate_test = cfg.selection_test;
            spec.params_for_topics = [&](std::size_t k) { return lda_params_for(cfg, k); };
            auto sweep = run_sweep(data, spec);
            num_topics = select_num_topics(sweep, cfg.selection_tolerance);
            selection = {{"selected_num_topics", num_topics}, {"tolerance", cfg.selection_tolerance}};
            artifacts.push_back({"selection_sweep", {{"selection_sweep.csv", sweep_csv(sweep, false)}}});
        });
    }

    const auto params = lda_params_for(cfg, num_topics);
    auto model = run_stage("train", [&] { return train(data.dictionary, data.split.train, params); });

    nlohmann::json metrics = run_stage("coherence", [&] {
        nlohmann::json m = {{"train", to_json(model_coherence(model, data.train_tokens, cfg.coherence))}};
        m["test"] = data.test_tokens.empty() ? nlohmann::json(nullptr)
                                             : to_json(model_coherence(model, data.test_tokens, cfg.coherence));
        return m;
    });

    auto dists = run_stage("infer", [&] { return infer_all(model, corpus); });

    run_stage("analyze", [&] {
        auto a = analyze(model, corpus, dists, cfg.topn_terms, cfg.keywords, cfg.keyword_floor);
        artifacts.insert(artifacts.begin(), {"model", {{"model.json", model_to_json(model).dump() + "\n"}}});
        artifacts.push_back({"topic_terms", {{"topic_terms.csv", a.topic_terms_csv}}});
        artifacts.push_back({"keyword_topics", {{"keyword_topics.csv", a.keyword_topics_csv}}});
        artifacts.push_back({"topic_shares", {{"topic_shares.json", a.topic_shares.dump(2) + "\n"}}});
        artifacts.push_back({"topic_overview", {{"topic_overview.json", a.topic_overview.dump(2) + "\n"}}});
    });

    run_stage("inconsistency", [&] {
        auto r = inconsistency_report(corpus, dists, cfg.aggregation, cfg.bin_edges, cfg.threshold);
        artifacts.push_back({"similarity",
                             {{"similarity.csv", r.records_csv},
                              {"similarity_histogram.json", r.histogram.dump(2) + "\n"}}});
        artifacts.push_back({"inconsistency_profile", {{"inconsistency_profile.json", r.profile.dump(2) + "\n"}}});
    });

    ReportBundle bundle;
    bundle.output_dir = output_dir;
    run_stage("report", [&] {
        std::size_t empty_docs = 0;
        for (const auto& b : corpus.bows) empty_docs += b.empty() ? 1 : 0;
        nlohmann::json listed = nlohmann::json::array();
        for (const auto& a : artifacts) {
            nlohmann::json files = nlohmann::json::array();
            for (const auto& f : a.files)
                files.push_back({{"path", f.path}, {"sha256", io::sha256_hex(f.contents)}, {"bytes", f.contents.size()}});
            listed.push_back({{"name", a.name}, {"files", files}});
        }
        bundle.manifest = {
            {"tool", "newstopics"},
            {"version", kVersion},
            {"config", config_to_json(cfg)},
            {"seeds", {{"master", cfg.seed}, {"split", split_seed}, {"lda", params.seed}}},
            {"corpus",
             {{"articles", loaded.articles},
              {"comments", loaded.comments},
              {"skipped_articles", loaded.skipped_articles},
              {"skipped_comments", loaded.skipped_comments},
              {"vocab_size", corpus.dictionary.size()},
              {"empty_documents", empty_docs},
              {"train_documents", data.split.train.size()},
              {"test_documents", data.split.test.size()}}},
            {"num_topics", num_topics},
            {"selection", selection},
            {"metrics", {{"coherence", metrics}}},
            {"artifacts", listed}};

        std::vector<std::filesystem::path> written;
        try {
            for (const auto& a : artifacts)
                for (const auto& f : a.files) {
                    written.push_back(output_dir / f.path);
                    io::write_file(written.back(), f.contents);
                }
            written.push_back(output_dir / "manifest.json");
            io::write_file(written.back(), bundle.manifest.dump(2) + "\n");
        } catch (...) {
            std::error_code ec;
            for (const auto& p : written) std::filesystem::remove(p, ec);
            throw;
        }
    });
    bundle.artifacts = std::move(artifacts);
    return bundle;
}

/// Checks every file listed in a manifest against its recorded hash. Returns
/// the relative paths that are missing or differ.
inline std::vector<std::string> verify_manifest(const std::filesystem::path& output_dir) {
    auto manifest = nlohmann::json::parse(io::read_file(output_dir / "manifest.json"));
    std::vector<std::string> bad;
    for (const auto& a : manifest.at("artifacts"))
        for (const auto& f : a.at("files")) {
            const auto rel = f.at("path").get<std::string>();
            const auto p = output_dir / rel;
            if (!std::filesystem::exists(p) || io::sha256_hex(io::read_file(p)) != f.at("sha256").get<std::string>())
                bad.push_back(rel);
        }
    return bad;
}

}  // namespace newstopics
