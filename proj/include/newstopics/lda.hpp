#pragma once

// Latent Dirichlet allocation fitted by online variational Bayes: documents are
// processed in chunks, each chunk runs a per-document variational E-step and
// then blends its sufficient statistics into the global topic-word weights
// with step size (tau0 + t)^-kappa.

#include "corpus.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "random.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace newstopics {

struct LdaParams {
    std::size_t num_topics = 1;
    std::size_t iterations = 50;   // E-step cap per document
    std::size_t chunksize = 2000;  // documents per global update
    std::size_t passes = 1;        // sweeps over the corpus
    std::vector<double> alpha;     // length num_topics
    double eta = 1.0;
    double kappa = 0.5;
    double tau0 = 1.0;
    double gamma_threshold = 0.001;
    std::uint64_t seed = 0;

    LdaParams() : LdaParams(1) {}

    /// Defaults: symmetric alpha = eta = 1/K.
    explicit LdaParams(std::size_t k) : num_topics(k) {
        if (k < 1) throw ArgumentError("num_topics must be >= 1");
        alpha.assign(k, 1.0 / static_cast<double>(k));
        eta = 1.0 / static_cast<double>(k);
        validate();
    }

    /// Changes K and resets alpha/eta to their symmetric defaults.
    void set_num_topics(std::size_t k) {
        const auto keep = *this;
        *this = LdaParams(k);
        iterations = keep.iterations;
        chunksize = keep.chunksize;
        passes = keep.passes;
        kappa = keep.kappa;
        tau0 = keep.tau0;
        gamma_threshold = keep.gamma_threshold;
        seed = keep.seed;
    }

    void validate() const {
        if (num_topics < 1) throw ArgumentError("num_topics must be >= 1");
        if (iterations < 1) throw ArgumentError("iterations must be >= 1");
        if (chunksize < 1) throw ArgumentError("chunksize must be >= 1");
        if (passes < 1) throw ArgumentError("passes must be >= 1");
        if (alpha.size() != num_topics) throw ArgumentError("alpha must have num_topics entries");
        for (double a : alpha)
            if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("alpha entries must be positive");
        if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("eta must be positive");
        if (!(kappa >= 0.5 && kappa <= 1.0))
            throw ArgumentError("kappa must lie in [0.5, 1]");
        if (!(tau0 >= 0.0)) throw ArgumentError("tau0 must be >= 0");
        if (!(gamma_threshold > 0.0)) throw ArgumentError("gamma_threshold must be positive");
    }

    friend bool operator==(const LdaParams&, const LdaParams&) = default;
};

/// Length-K probability vector over topics.
struct TopicDistribution {
    std::vector<double> probs;

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t k) const { return probs[k]; }
};

/// Argmax with ties going to the lowest index.
inline std::size_t dominant_topic(const TopicDistribution& dist) {
    if (dist.probs.empty()) throw ArgumentError("empty topic distribution");
    std::size_t best = 0;
    for (std::size_t k = 1; k < dist.probs.size(); ++k)
        if (dist.probs[k] > dist.probs[best]) best = k;
    return best;
}

struct TermProbability {
    std::string token;
    double probability = 0.0;
};

namespace detail {

inline void dirichlet_expectation_exp(std::span<const double> param, std::span<double> out) {
    const double total = boost::math::digamma(std::accumulate(param.begin(), param.end(), 0.0));
    for (std::size_t i = 0; i < param.size(); ++i) out[i] = std::exp(boost::math::digamma(param[i]) - total);
}

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

class LdaModel {
public:
    LdaModel(LdaParams params, std::shared_ptr<const Dictionary> dictionary, std::vector<double> lambda,
             std::size_t updates_done)
        : params_(std::move(params)),
          dictionary_(std::move(dictionary)),
          lambda_(std::move(lambda)),
          updates_done_(updates_done) {
        params_.validate();
        if (!dictionary_) throw ArgumentError("model needs a dictionary");
        if (lambda_.size() != num_topics() * vocab_size()) throw ArgumentError("lambda has wrong shape");
        for (double x : lambda_)
            if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError("lambda entries must be positive and finite");
        refresh_expectations();
    }

    const LdaParams& params() const { return params_; }
    const Dictionary& dictionary() const { return *dictionary_; }
    std::shared_ptr<const Dictionary> dictionary_ptr() const { return dictionary_; }
    std::size_t num_topics() const { return params_.num_topics; }
    std::size_t vocab_size() const { return dictionary_->size(); }
    std::size_t updates_done() const { return updates_done_; }

    /// Row-major K x V variational topic-word parameters.
    std::span<const double> lambda() const { return lambda_; }
    std::span<const double> lambda_row(std::size_t k) const {
        return std::span<const double>(lambda_).subspan(k * vocab_size(), vocab_size());
    }

    /// Row k of lambda normalised to a probability vector.
    std::vector<double> topic_word(std::size_t k) const {
        check_topic(k);
        auto row = lambda_row(k);
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        std::vector<double> out(row.begin(), row.end());
        for (double& x : out) x /= total;
        return out;
    }

    double term_probability(std::size_t k, TermId term) const {
        check_topic(k);
        auto row = lambda_row(k);
        return row[term] / std::accumulate(row.begin(), row.end(), 0.0);
    }

    /// Variational E-step against the frozen topics. Gamma starts from a draw
    /// seeded by the model seed, so results do not depend on call history.
    TopicDistribution infer(const BowDocument& bow) const {
        for (const auto& e : bow.entries)
            if (e.term >= vocab_size()) throw ArgumentError("term id " + std::to_string(e.term) + " out of vocabulary");
        Rng rng(derive_seed(params_.seed, "infer"));
        std::vector<double> gamma(num_topics());
        for (double& g : gamma) g = gamma_init_draw(rng);
        e_step(bow, gamma, nullptr);
        if (!detail::all_finite(gamma)) throw NumericalError("numerical failure during inference", updates_done_);
        const double total = std::accumulate(gamma.begin(), gamma.end(), 0.0);
        TopicDistribution dist;
        dist.probs.resize(gamma.size());
        for (std::size_t k = 0; k < gamma.size(); ++k) dist.probs[k] = gamma[k] / total;
        return dist;
    }

    /// The topn most probable terms of topic k; ties by ascending term id.
    std::vector<TermProbability> topic_terms(std::size_t k, std::size_t topn) const {
        check_topic(k);
        if (topn < 1 || topn > vocab_size()) throw ArgumentError("topn must lie in [1, V]");
        auto probs = topic_word(k);
        std::vector<TermId> ids(vocab_size());
        std::iota(ids.begin(), ids.end(), TermId{0});
        std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(topn), ids.end(),
                          [&](TermId a, TermId b) { return probs[a] > probs[b] || (probs[a] == probs[b] && a < b); });
        std::vector<TermProbability> out;
        out.reserve(topn);
        for (std::size_t i = 0; i < topn; ++i) out.push_back({dictionary_->token(ids[i]), probs[ids[i]]});
        return out;
    }

    /// Runs the per-document E-step. gamma holds the initial value on entry and
    /// the fitted value on exit. When sstats is given, adds this document's
    /// contribution (before the expElogbeta factor) to it.
    std::size_t e_step(const BowDocument& bow, std::vector<double>& gamma, std::vector<double>* sstats) const {
        const std::size_t K = num_topics();
        const std::size_t V = vocab_size();
        const std::size_t n = bow.entries.size();
        std::vector<double> exp_theta(K);
        detail::dirichlet_expectation_exp(gamma, exp_theta);

        // Columns of expElogbeta restricted to this document's terms, K x n.
        std::vector<double> beta_d(K * n);
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t j = 0; j < n; ++j) beta_d[k * n + j] = exp_elog_beta_[k * V + bow.entries[j].term];

        std::vector<double> phinorm(n);
        auto update_phinorm = [&] {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < K; ++k) s += exp_theta[k] * beta_d[k * n + j];
                phinorm[j] = s + 1e-100;
            }
        };
        update_phinorm();

        std::vector<double> last(K);
        std::size_t it = 0;
        while (it < params_.iterations) {
            ++it;
            last = gamma;
            for (std::size_t k = 0; k < K; ++k) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    s += static_cast<double>(bow.entries[j].count) / phinorm[j] * beta_d[k * n + j];
                gamma[k] = params_.alpha[k] + exp_theta[k] * s;
            }
            detail::dirichlet_expectation_exp(gamma, exp_theta);
            update_phinorm();
            double change = 0.0;
            for (std::size_t k = 0; k < K; ++k) change += std::abs(gamma[k] - last[k]);
            if (change / static_cast<double>(K) < params_.gamma_threshold) break;
        }

        if (sstats) {
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t j = 0; j < n; ++j)
                    (*sstats)[k * V + bow.entries[j].term] +=
                        exp_theta[k] * static_cast<double>(bow.entries[j].count) / phinorm[j];
        }
        return it;
    }

private:
    friend LdaModel train(std::shared_ptr<const Dictionary>, std::span<const BowDocument>, const LdaParams&);

    /// Blends one chunk's sufficient statistics into lambda. corpus_size is the
    /// number of documents in a full pass; chunk_docs the number that produced
    /// sstats.
    void apply_update(std::vector<double>& sstats, std::size_t chunk_docs, std::size_t corpus_size) {
        const double rho = std::pow(params_.tau0 + static_cast<double>(updates_done_), -params_.kappa);
        const double scale = static_cast<double>(corpus_size) / static_cast<double>(chunk_docs);
        for (std::size_t i = 0; i < lambda_.size(); ++i) {
            const double target = params_.eta + scale * sstats[i] * exp_elog_beta_[i];
            lambda_[i] = (1.0 - rho) * lambda_[i] + rho * target;
        }
        if (!detail::all_finite(lambda_)) throw NumericalError("numerical failure", updates_done_);
        ++updates_done_;
        refresh_expectations();
    }

    void check_topic(std::size_t k) const {
        if (k >= num_topics()) throw ArgumentError("topic index " + std::to_string(k) + " out of range");
    }

    void refresh_expectations() {
        const std::size_t V = vocab_size();
        exp_elog_beta_.resize(lambda_.size());
        for (std::size_t k = 0; k < num_topics(); ++k)
            detail::dirichlet_expectation_exp(lambda_row(k), std::span<double>(exp_elog_beta_).subspan(k * V, V));
    }

    LdaParams params_;
    std::shared_ptr<const Dictionary> dictionary_;
    std::vector<double> lambda_;
    std::size_t updates_done_ = 0;
    std::vector<double> exp_elog_beta_;
};

inline std::vector<TermProbability> topic_terms(const LdaModel& model, std::size_t k, std::size_t topn) {
    return model.topic_terms(k, topn);
}

inline TopicDistribution infer(const LdaModel& model, const BowDocument& bow) { return model.infer(bow); }

/// Formats a term like 0.016*"patients".
inline std::string format_term(const TermProbability& term, int decimals = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, term.probability);
    return std::string(buf) + "*\"" + term.token + "\"";
}

/// Fits a model with `passes` sweeps over the corpus in chunks of `chunksize`.
/// A trailing partial chunk is scaled by corpus_size / chunk_docs like any other.
inline LdaModel train(std::shared_ptr<const Dictionary> dictionary, std::span<const BowDocument> corpus,
                      const LdaParams& params) {
    params.validate();
    if (!dictionary) throw ArgumentError("train needs a dictionary");
    if (corpus.empty()) throw DataError("cannot train on an empty corpus");
    const std::size_t K = params.num_topics;
    const std::size_t V = dictionary->size();
    if (V < K) warn("vocabulary size " + std::to_string(V) + " is smaller than num_topics " + std::to_string(K));
    for (const auto& doc : corpus)
        for (const auto& e : doc.entries)
            if (e.term >= V) throw ArgumentError("document " + doc.doc_id + " has term id beyond vocabulary");

    Rng rng(params.seed);
    std::vector<double> lambda(K * V);
    for (double& x : lambda) x = gamma_init_draw(rng);
    LdaModel model(params, std::move(dictionary), std::move(lambda), 0);

    std::vector<double> sstats(K * V);
    std::vector<double> gamma(K);
    for (std::size_t pass = 0; pass < params.passes; ++pass) {
        for (std::size_t begin = 0; begin < corpus.size(); begin += params.chunksize) {
            const std::size_t end = std::min(begin + params.chunksize, corpus.size());
            std::fill(sstats.begin(), sstats.end(), 0.0);
            for (std::size_t d = begin; d < end; ++d) {
                for (double& g : gamma) g = gamma_init_draw(rng);
                model.e_step(corpus[d], gamma, &sstats);
                if (!detail::all_finite(gamma))
                    throw NumericalError("numerical failure in document " + corpus[d].doc_id, model.updates_done());
            }
            model.apply_update(sstats, end - begin, corpus.size());
        }
    }
    return model;
}

inline LdaModel train(const Dictionary& dictionary, std::span<const BowDocument> corpus, const LdaParams& params) {
    return train(std::make_shared<const Dictionary>(dictionary), corpus, params);
}

// ---------------------------------------------------------------------------
// Serialisation

inline nlohmann::json params_to_json(const LdaParams& p) {
    return {{"num_topics", p.num_topics}, {"iterations", p.iterations}, {"chunksize", p.chunksize},
            {"passes", p.passes},         {"alpha", p.alpha},           {"eta", p.eta},
            {"kappa", p.kappa},           {"tau0", p.tau0},             {"gamma_threshold", p.gamma_threshold},
            {"seed", p.seed}};
}

inline LdaParams params_from_json(const nlohmann::json& j) {
    LdaParams p(j.at("num_topics").get<std::size_t>());
    p.iterations = j.at("iterations").get<std::size_t>();
    p.chunksize = j.at("chunksize").get<std::size_t>();
    p.passes = j.at("passes").get<std::size_t>();
    p.alpha = j.at("alpha").get<std::vector<double>>();
    p.eta = j.at("eta").get<double>();
    p.kappa = j.at("kappa").get<double>();
    p.tau0 = j.at("tau0").get<double>();
    p.gamma_threshold = j.at("gamma_threshold").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.validate();
    return p;
}

/// Model file: params, dictionary (tokens, doc_freq, fingerprint), updates_done
/// and lambda in row-major order. Doubles are written in shortest round-trip
/// form so a reloaded model infers bit-identically.
inline nlohmann::json model_to_json(const LdaModel& model) {
    const auto& dict = model.dictionary();
    return {{"format", "newstopics-lda"},
            {"version", 1},
            {"params", params_to_json(model.params())},
            {"dictionary",
             {{"fingerprint", dict.fingerprint()}, {"tokens", dict.tokens()}, {"doc_freq", dict.doc_freqs()}}},
            {"num_topics", model.num_topics()},
            {"vocab_size", model.vocab_size()},
            {"updates_done", model.updates_done()},
            {"lambda", std::vector<double>(model.lambda().begin(), model.lambda().end())}};
}

inline LdaModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "newstopics-lda") throw DataError("not a newstopics model file");
        const auto& jd = j.at("dictionary");
        auto dict = std::make_shared<const Dictionary>(jd.at("tokens").get<std::vector<std::string>>(),
                                                       jd.at("doc_freq").get<std::vector<std::uint32_t>>());
        if (dict->fingerprint() != jd.at("fingerprint").get<std::string>())
            throw DataError("dictionary fingerprint mismatch in model file");
        return LdaModel(params_from_json(j.at("params")), std::move(dict), j.at("lambda").get<std::vector<double>>(),
                        j.at("updates_done").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid model file: ") + e.what());
    }
}

inline void save_model(const LdaModel& model, const std::filesystem::path& path) {
    io::write_file(path, model_to_json(model).dump() + "\n");
}

inline LdaModel load_model(const std::filesystem::path& path) {
    try {
        return model_from_json(nlohmann::json::parse(io::read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("invalid model file " + path.string() + ": " + e.what());
    }
}

}  // namespace newstopics
