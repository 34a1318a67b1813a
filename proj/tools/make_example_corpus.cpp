// Writes a small deterministic news/comment corpus with the matching
// stopword list and pipeline configurations:
//
//   make_example_corpus <output-dir> [seed]

#include <newstopics/io.hpp>
#include <newstopics/random.hpp>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <nlohmann/json.hpp>

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace nt = newstopics;

namespace {

struct Theme {
    const char* name;
    std::vector<std::string> words;
};

const std::vector<Theme>& themes() {
    static const std::vector<Theme> t = {
        {"Flu season",
         {"flu", "influenza", "vaccine", "virus", "season", "shot", "fever", "outbreak", "strain", "immunity",
          "cough", "symptoms", "pharmacy", "winter", "infection"}},
        {"Hospital funding",
         {"hospital", "funding", "budget", "nurses", "beds", "ward", "staff", "shortage", "government", "spending",
          "waiting", "emergency", "patients", "doctors", "minister"}},
        {"Diet and obesity",
         {"diet", "obesity", "sugar", "calories", "weight", "exercise", "food", "fat", "eating", "nutrition",
          "snacks", "drinks", "children", "healthy", "portion"}},
        {"Cancer research",
         {"cancer", "tumour", "research", "trial", "chemotherapy", "screening", "breast", "treatment", "cells",
          "oncology", "survival", "diagnosis", "scientists", "drug", "genetic"}},
        {"Mental health",
         {"mental", "depression", "anxiety", "therapy", "stress", "counselling", "loneliness", "wellbeing", "sleep",
          "suicide", "support", "psychiatric", "mood", "young", "services"}},
        {"Drug prices",
         {"prices", "pharmaceutical", "medicine", "cost", "insurance", "prescription", "generic", "patent", "market",
          "companies", "profits", "affordable", "pricing", "regulator", "supply"}},
        {"Air pollution",
         {"pollution", "air", "smog", "emissions", "asthma", "lungs", "traffic", "diesel", "particles", "city",
          "breathing", "climate", "quality", "respiratory", "exposure"}},
    };
    return t;
}

const std::vector<std::string>& filler() {
    static const std::vector<std::string> f = {"the",   "a",      "of",  "and",  "to",    "in",   "is",
                                               "that",  "this",   "for", "it",   "with",  "was",  "said",
                                               "today", "report", "new", "week", "people", "year", "2019"};
    return f;
}

struct Generator {
    nt::Rng rng;

    std::size_t pick(std::size_t n) { return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    bool coin(double p) { return boost::random::bernoulli_distribution<double>(p)(rng); }

    // Mostly theme words with a light mix of function words, numbers and
    // punctuation so the preprocessing path has something to remove.
    std::string sentence_text(std::size_t theme, std::size_t words, std::size_t other_theme, double other_rate) {
        std::string out;
        for (std::size_t i = 0; i < words; ++i) {
            std::string w;
            const double r = boost::random::uniform_real_distribution<double>(0.0, 1.0)(rng);
            if (r < 0.35) {
                w = filler()[pick(filler().size())];
            } else if (r < 0.35 + other_rate) {
                const auto& v = themes()[other_theme].words;
                w = v[pick(v.size())];
            } else {
                const auto& v = themes()[theme].words;
                // Earlier words in each list are more frequent.
                w = v[std::min(pick(v.size()), pick(v.size()))];
            }
            if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
            if (!out.empty()) out += (coin(0.08) ? ", " : " ");
            out += w;
        }
        return out + (coin(0.2) ? "!" : ".");
    }
};

std::string date_for(std::size_t day) {
    const std::size_t month = 1 + (day / 28) % 12;
    const std::size_t dom = 1 + day % 28;
    char buf[32];
    std::snprintf(buf, sizeof buf, "2019-%02zu-%02zu 08:00:00", month, dom);
    return buf;
}

const char* const kStopwords =
    "# Corpus-specific stopwords, one per line.\n"
    "said\n"
    "today\n"
    "report\n"
    "new\n"
    "week\n"
    "people\n"
    "year\n"
    "2019\n";

std::string pipeline_ini(bool with_selection) {
    std::string s =
        "; Example configuration for the bundled corpus.\n"
        "[run]\n"
        "seed = 42\n"
        "\n"
        "[input]\n"
        "articles = articles.jsonl\n"
        "comments = comments.jsonl\n"
        "stopwords = stopwords.txt\n"
        "include_title = false\n"
        "\n"
        "[preprocess]\n"
        "min_doc_freq = 1\n"
        "split_ratio = 0.9\n"
        "\n"
        "[lda]\n"
        "num_topics = 7\n"
        "iterations = 10\n"
        "chunksize = 100\n"
        "passes = 5\n"
        "\n"
        "[coherence]\n"
        "topn = 10\n"
        "window_size = 110\n"
        "\n"
        "[inconsistency]\n"
        "threshold = 0.6\n"
        "bin_edges = 0,0.2,0.4,0.6,0.8,1.0\n";
    if (with_selection)
        s +=
            "\n"
            "[selection]\n"
            "num_topics = 2-9\n"
            "tolerance = 0.01\n";
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2 || argc > 3) {
        std::cerr << "usage: make_example_corpus <output-dir> [seed]\n";
        return 2;
    }
    const std::filesystem::path out = argv[1];
    const std::uint64_t seed = argc == 3 ? std::strtoull(argv[2], nullptr, 10) : 7;

    Generator g{nt::Rng(seed)};
    const std::size_t n_themes = themes().size();
    const std::size_t n_articles = 84;

    std::string articles, comments;
    for (std::size_t a = 0; a < n_articles; ++a) {
        const std::size_t theme = a % n_themes;
        const std::string news_id = std::to_string(1000 + a);
        const std::size_t other = (theme + 1 + g.pick(n_themes - 1)) % n_themes;

        std::string text;
        const std::size_t sentences = 8 + g.pick(6);
        for (std::size_t s = 0; s < sentences; ++s) text += (s ? " " : "") + g.sentence_text(theme, 10 + g.pick(8), other, 0.05);
        nlohmann::json art = {{"news_id", news_id},
                              {"title", std::string(themes()[theme].name) + ": " + g.sentence_text(theme, 5, other, 0.0)},
                              {"text", text},
                              {"url", "https://news.example.org/health/" + news_id},
                              {"release_time", date_for(a * 3)}};
        articles += art.dump() + "\n";

        // About one thread in five drifts to another theme in its comments.
        const bool drift = g.coin(0.2);
        const std::size_t n_comments = 4 + g.pick(7);
        for (std::size_t c = 0; c < n_comments; ++c) {
            const std::size_t ctheme = drift ? other : theme;
            std::string body;
            const std::size_t sentences_c = 1 + g.pick(3);
            for (std::size_t s = 0; s < sentences_c; ++s)
                body += (s ? " " : "") + g.sentence_text(ctheme, 6 + g.pick(8), theme, drift ? 0.1 : 0.05);
            nlohmann::json com = {{"news_id", news_id},
                                  {"username", "reader" + std::to_string(g.pick(300))},
                                  {"raw_comment", body},
                                  {"clean_comment", body},
                                  {"date", date_for(a * 3 + 1)},
                                  {"is_reply", c > 0 && g.coin(0.3)}};
            comments += com.dump() + "\n";
        }
    }

    try {
        nt::io::write_file(out / "articles.jsonl", articles);
        nt::io::write_file(out / "comments.jsonl", comments);
        nt::io::write_file(out / "stopwords.txt", kStopwords);
        nt::io::write_file(out / "pipeline.ini", pipeline_ini(false));
        nt::io::write_file(out / "pipeline_select.ini", pipeline_ini(true));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
