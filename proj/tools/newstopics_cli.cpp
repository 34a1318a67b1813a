// newstopics: command-line front end for the news/comment topic analysis
// workflow. Every subcommand accepts --config and one --section.key flag per
// configuration key; flags override the file.

#include <newstopics/newstopics.hpp>

#ifdef NEWSTOPICS_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace nt = newstopics;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_file;
    std::map<std::string, std::string> flags;
};

void add_config_flags(CLI::App* app, CommonOptions& opts) {
    app->add_option("--config", opts.config_file, "INI configuration file")->check(CLI::ExistingFile);
    for (const auto& key : nt::config_keys()) {
        const std::string name = key.name;
        app->add_option_function<std::string>(
               "--" + name, [&opts, name](const std::string& v) { opts.flags[name] = v; },
               std::string(key.help) + " (default: " + key.default_value + ")")
            ->group("Configuration");
    }
}

nt::PipelineConfig resolve(const CommonOptions& opts) {
    return nt::run_stage("config", [&] {
        if (!opts.config_file.empty()) return nt::load_config(opts.config_file, opts.flags);
        auto given = opts.flags;
        nt::resolve_input_paths(given, fs::current_path());
        return nt::config_from_values(given);
    });
}

nt::TrainingData training_data(const nt::PipelineConfig& cfg, const nt::PreparedCorpus& corpus) {
    return nt::make_training_data(corpus, cfg.split_ratio, nt::derive_seed(cfg.seed, "split"));
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_preprocess(const CommonOptions& opts, const std::string& out) {
    const auto cfg = resolve(opts);
    if (cfg.articles.empty() || cfg.comments.empty())
        throw nt::ArgumentError("--input.articles and --input.comments are required");
    auto a = nt::load_corpus(cfg.articles, nt::InputSchema::ArticlesJsonl);
    auto c = nt::load_corpus(cfg.comments, nt::InputSchema::CommentsJsonl);
    for (const auto& s : a.skipped) std::cerr << cfg.articles.string() << ":" << s.line << ": skipped (" << s.reason << ")\n";
    for (const auto& s : c.skipped) std::cerr << cfg.comments.string() << ":" << s.line << ": skipped (" << s.reason << ")\n";
    auto docs = std::move(a.documents);
    for (auto& d : c.documents) docs.push_back(std::move(d));
    const auto corpus = nt::prepare_corpus(std::move(docs), nt::stoplist_for(cfg), cfg.preprocess);
    nt::write_prepared(corpus, out);
    print_json({{"documents", corpus.documents.size()},
                {"vocab_size", corpus.dictionary.size()},
                {"skipped_articles", a.skipped.size()},
                {"skipped_comments", c.skipped.size()}});
    return 0;
}

int cmd_sweep(const CommonOptions& opts, const std::string& corpus_dir, const std::string& param,
              const std::string& values, bool test, std::optional<std::size_t> alt_k, const std::string& out) {
    const auto cfg = resolve(opts);
    const auto corpus = nt::read_prepared(corpus_dir);
    const auto data = training_data(cfg, corpus);
    nt::SweepSpec spec;
    spec.parameter = nt::parse_sweep_parameter(param);
    spec.values = nt::parse_size_list("--values", values);
    spec.base = cfg.lda;
    spec.coherence = cfg.coherence;
    spec.evaluate_test = test;
    spec.params_for_topics = [&](std::size_t k) { return nt::lda_params_for(cfg, k); };

    if (alt_k) {
        const auto check = nt::decoupling_check(data, spec, *alt_k);
        std::string csv = nt::sweep_csv(check.base, true) + "\n" + nt::sweep_csv(check.alternate, true);
        if (!out.empty()) nt::io::write_file(out, csv);
        print_json({{"parameter", param},
                    {"base_num_topics", cfg.lda.num_topics},
                    {"alt_num_topics", *alt_k},
                    {"pearson_r", check.pearson_r}});
        return 0;
    }
    const auto result = nt::run_sweep(data, spec);
    const auto csv = nt::sweep_csv(result, true);
    if (out.empty())
        std::cout << csv;
    else
        nt::io::write_file(out, csv);
    if (spec.parameter == nt::SweepParameter::NumTopics) {
        try {
            std::cerr << "selected num_topics: " << nt::select_num_topics(result, cfg.selection_tolerance) << '\n';
        } catch (const nt::DataError& e) {
            std::cerr << "no selection: " << e.what() << '\n';
        }
    }
    return 0;
}

int cmd_train(const CommonOptions& opts, const std::string& corpus_dir, const std::string& out) {
    const auto cfg = resolve(opts);
    const auto corpus = nt::read_prepared(corpus_dir);
    const auto data = training_data(cfg, corpus);
    const auto model = nt::train(data.dictionary, data.split.train, cfg.lda);
    nt::save_model(model, out);
    nlohmann::json j = {{"train", nt::to_json(nt::model_coherence(model, data.train_tokens, cfg.coherence))}};
    if (!data.test_tokens.empty()) j["test"] = nt::to_json(nt::model_coherence(model, data.test_tokens, cfg.coherence));
    print_json(j);
    return 0;
}

int cmd_analyze(const CommonOptions& opts, const std::string& corpus_dir, const std::string& model_path,
                const fs::path& out) {
    const auto cfg = resolve(opts);
    const auto corpus = nt::read_prepared(corpus_dir);
    const auto model = nt::load_model(model_path);
    if (model.dictionary().fingerprint() != corpus.dictionary.fingerprint())
        throw nt::DataError("model and corpus use different dictionaries");
    const auto dists = nt::infer_all(model, corpus);
    const auto a = nt::analyze(model, corpus, dists, cfg.topn_terms, cfg.keywords, cfg.keyword_floor);
    nt::io::write_file(out / "topic_terms.csv", a.topic_terms_csv);
    nt::io::write_file(out / "keyword_topics.csv", a.keyword_topics_csv);
    nt::io::write_file(out / "topic_shares.json", a.topic_shares.dump(2) + "\n");
    nt::io::write_file(out / "topic_overview.json", a.topic_overview.dump(2) + "\n");
    std::string doc_topics;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        nlohmann::json j = {{"doc_id", corpus.documents[i].doc_id}};
        j["topics"] = dists[i] ? nlohmann::json(dists[i]->probs) : nlohmann::json(nullptr);
        doc_topics += j.dump() + "\n";
    }
    nt::io::write_file(out / "doc_topics.jsonl", doc_topics);
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
        std::cout << k;
        for (const auto& t : model.topic_terms(k, std::min(cfg.topn_terms, model.vocab_size())))
            std::cout << '\t' << nt::format_term(t);
        std::cout << '\n';
    }
    return 0;
}

int cmd_inconsistency(const CommonOptions& opts, const std::string& corpus_dir, const std::string& model_path,
                      const fs::path& out) {
    const auto cfg = resolve(opts);
    const auto corpus = nt::read_prepared(corpus_dir);
    const auto model = nt::load_model(model_path);
    if (model.dictionary().fingerprint() != corpus.dictionary.fingerprint())
        throw nt::DataError("model and corpus use different dictionaries");
    const auto dists = nt::infer_all(model, corpus);
    const auto r = nt::inconsistency_report(corpus, dists, cfg.aggregation, cfg.bin_edges, cfg.threshold);
    nt::io::write_file(out / "similarity.csv", r.records_csv);
    nt::io::write_file(out / "similarity_histogram.json", r.histogram.dump(2) + "\n");
    nt::io::write_file(out / "inconsistency_profile.json", r.profile.dump(2) + "\n");
    print_json({{"histogram", r.histogram.value("proportions", nlohmann::json())}, {"profile", r.profile}});
    return 0;
}

int cmd_report(const fs::path& dir) {
    const auto bad = nt::verify_manifest(dir);
    const auto manifest = nlohmann::json::parse(nt::io::read_file(dir / "manifest.json"));
    std::cout << "num_topics: " << manifest.at("num_topics") << '\n';
    const auto& coh = manifest.at("metrics").at("coherence");
    std::cout << "C_v train: " << coh.at("train").at("aggregate");
    if (!coh.at("test").is_null()) std::cout << "  test: " << coh.at("test").at("aggregate");
    std::cout << '\n';

    const auto model = nt::load_model(dir / "model.json");
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
        std::cout << "topic " << k << ':';
        for (const auto& t : model.topic_terms(k, std::min<std::size_t>(7, model.vocab_size())))
            std::cout << ' ' << nt::format_term(t);
        std::cout << '\n';
    }
    const auto shares = nlohmann::json::parse(nt::io::read_file(dir / "topic_shares.json"));
    std::cout << "dominant topic shares: " << shares.at("proportions").dump() << '\n';
    const auto hist = nlohmann::json::parse(nt::io::read_file(dir / "similarity_histogram.json"));
    if (hist.contains("proportions"))
        std::cout << "similarity histogram: edges " << hist.at("edges").dump() << " proportions "
                  << hist.at("proportions").dump() << '\n';
    const auto profile = nlohmann::json::parse(nt::io::read_file(dir / "inconsistency_profile.json"));
    if (profile.contains("pearson_r"))
        std::cout << "low-similarity profile r: " << profile.at("pearson_r") << '\n';
    else
        std::cout << "low-similarity profile: " << profile.value("error", "unavailable") << '\n';

    for (const auto& b : bad) std::cerr << "hash mismatch: " << b << '\n';
    std::cout << (bad.empty() ? "manifest verified" : "manifest verification FAILED") << '\n';
    return bad.empty() ? 0 : 1;
}

int cmd_pipeline(const CommonOptions& opts, const std::string& manifest, const fs::path& out) {
    nt::PipelineConfig cfg;
    if (!manifest.empty()) {
        if (!opts.flags.empty() || !opts.config_file.empty())
            throw nt::ArgumentError("--manifest replays a run exactly; it takes no other configuration");
        cfg = nt::config_from_json(nlohmann::json::parse(nt::io::read_file(manifest)).at("config"));
    } else {
        cfg = resolve(opts);
    }
    const auto bundle = nt::run_pipeline(cfg, out);
    std::cout << "wrote " << bundle.artifacts.size() << " artifacts to " << out.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topic analysis of news articles and their comments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", nt::kVersion);

    CommonOptions opts;
    std::string out, corpus_dir, model_path, param, values, manifest, dir;
    bool test = false;
    std::optional<std::size_t> alt_k;

    auto* preprocess = app.add_subcommand("preprocess", "tokenize, filter and encode the input corpus");
    add_config_flags(preprocess, opts);
    preprocess->add_option("--out", out, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "train one model per parameter value and score C_v");
    add_config_flags(sweep, opts);
    sweep->add_option("--corpus", corpus_dir, "preprocessed corpus directory")->required();
    sweep->add_option("--param", param, "num_topics | iterations | chunksize | passes")->required();
    sweep->add_option("--values", values, "values, e.g. 2-17 or 10,100,500,1000")->required();
    sweep->add_flag("--test", test, "also score the test split");
    sweep->add_option("--alt-num-topics", alt_k, "repeat at this K and report the curve correlation");
    sweep->add_option("--out", out, "CSV output file (stdout if omitted)");

    auto* train = app.add_subcommand("train", "train a model on the training split");
    add_config_flags(train, opts);
    train->add_option("--corpus", corpus_dir, "preprocessed corpus directory")->required();
    train->add_option("--out", out, "model file")->required();

    auto* analyze = app.add_subcommand("analyze", "topic terms, keyword topics, shares and overview");
    add_config_flags(analyze, opts);
    analyze->add_option("--corpus", corpus_dir, "preprocessed corpus directory")->required();
    analyze->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
    analyze->add_option("--out", out, "output directory")->required();

    auto* incons = app.add_subcommand("inconsistency", "article-comment similarity per news thread");
    add_config_flags(incons, opts);
    incons->add_option("--corpus", corpus_dir, "preprocessed corpus directory")->required();
    incons->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
    incons->add_option("--out", out, "output directory")->required();

    auto* report = app.add_subcommand("report", "summarise a pipeline output directory and verify its manifest");
    report->add_option("--dir", dir, "pipeline output directory")->required()->check(CLI::ExistingDirectory);

    auto* pipeline = app.add_subcommand("pipeline", "run every stage and write a report bundle");
    add_config_flags(pipeline, opts);
    pipeline->add_option("--manifest", manifest, "replay the configuration recorded in a manifest")
        ->check(CLI::ExistingFile);
    pipeline->add_option("--out", out, "output directory");
    bool print_defaults = false;
    pipeline->add_flag("--print-default-config", print_defaults, "print an annotated default config and exit");

    CLI11_PARSE(app, argc, argv);

    const std::string stage = app.get_subcommands().front()->get_name();
    try {
        if (preprocess->parsed()) return cmd_preprocess(opts, out);
        if (sweep->parsed()) return cmd_sweep(opts, corpus_dir, param, values, test, alt_k, out);
        if (train->parsed()) return cmd_train(opts, corpus_dir, out);
        if (analyze->parsed()) return cmd_analyze(opts, corpus_dir, model_path, out);
        if (incons->parsed()) return cmd_inconsistency(opts, corpus_dir, model_path, out);
        if (report->parsed()) return cmd_report(dir);
        if (pipeline->parsed()) {
            if (print_defaults) {
                std::cout << nt::default_config_text();
                return 0;
            }
            if (out.empty()) throw nt::ArgumentError("--out is required");
            return cmd_pipeline(opts, manifest, out);
        }
    } catch (const nt::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: [" << stage << "] " << e.what() << '\n';
        return 1;
    }
    return 0;
}
