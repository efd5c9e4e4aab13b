#include "commands.hpp"
#include "io.hpp"

#include "simforge/clustop.hpp"
#include "simforge/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <memory>

namespace simforge::cli {

namespace {

std::vector<TokenSequence> read_docs(const std::string& path, const TextOptions& text) {
    std::vector<TokenSequence> docs;
    for (const auto& line : read_lines(path)) docs.push_back(text.tokens(line));
    return docs;
}

std::vector<Topic> read_topics(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw ParseError(path + ": not valid JSON", 1);
    if (j.is_object() && j.contains("topics")) return topics_from_json(j["topics"]);
    return topics_from_json(j);
}

struct BuildArgs {
    std::string docs;
    std::string vertex = "word";
    std::string edge = "cooccur";
    std::string agg = "none";
    std::optional<std::size_t> window;
    std::optional<std::uint64_t> seed;
    std::size_t top_k = 0;
    std::string out;
    std::string graph_out;
    TextOptions text;
    EmbeddingOptions embed;
};

void run_build(const BuildArgs& a) {
    const auto docs = read_docs(a.docs, a.text);
    BuildConfig cfg;
    cfg.vertex_mode = a.vertex == "bigram"    ? VertexMode::bigram
                    : a.vertex == "trigram" ? VertexMode::trigram
                    : a.vertex == "hashtag" ? VertexMode::hashtag
                    : a.vertex == "biha"    ? VertexMode::biha
                                            : VertexMode::word;
    cfg.edge_mode = a.edge == "embed" ? EdgeMode::embed_cosine : EdgeMode::cooccur;
    cfg.agg_mode = a.agg == "hashtag"   ? AggregationMode::by_hashtag
                 : a.agg == "mention" ? AggregationMode::by_mention
                                      : AggregationMode::none;
    cfg.window = a.window;
    const auto table = a.embed.load();
    if (cfg.edge_mode == EdgeMode::embed_cosine && !table) {
        throw InvalidArgument("--edge embed needs --embeddings or --hashed-dim");
    }
    cfg.embeddings = table.get();

    const WordGraph graph = build_word_graph(docs, cfg);
    const std::uint64_t seed = resolve_seed(a.seed);
    const LouvainResult lv = louvain(graph, seed);
    const auto topics = extract_topics(graph, lv.partition, a.top_k);

    if (!a.graph_out.empty()) {
        Output g(a.graph_out);
        graph.save_tsv(g.stream());
    }
    nlohmann::json report{
        {"command", "topics build"},
        {"seed", seed},
        {"config", {{"vertex", a.vertex}, {"edge", a.edge}, {"agg", a.agg}, {"tokenize", a.text.mode}}},
        {"nodes", graph.node_count()},
        {"edges", graph.edges().size()},
        {"q_trace", lv.q_trace},
        {"modularity", lv.q_trace.empty() ? nlohmann::json(nullptr) : nlohmann::json(lv.q_trace.back())},
        {"topics", topics_to_json(topics)},
    };
    Output out(a.out);
    out.stream() << report.dump(2) << '\n';
}

struct AssignArgs {
    std::string topics;
    std::string docs;
    std::string out;
    TextOptions text;
};

void run_assign(const AssignArgs& a) {
    const auto topics = read_topics(a.topics);
    const auto docs = read_docs(a.docs, a.text);
    Output out(a.out);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto t = assign_topic(docs[i], topics);
        out.line({{"doc", i}, {"topic", t ? nlohmann::json(*t) : nlohmann::json(nullptr)}});
    }
}

struct EvalArgs {
    std::string topics;
    std::string docs;
    std::string truth;
    std::vector<std::size_t> ks{5, 10, 15, 20};
    std::string out;
    TextOptions text;
};

void run_eval(const EvalArgs& a) {
    const auto topics = read_topics(a.topics);
    const auto docs = read_docs(a.docs, a.text);
    nlohmann::json per_topic = nlohmann::json::array();
    for (const auto& t : topics) {
        nlohmann::json tc, pmi;
        for (std::size_t k : a.ks) {
            tc[std::to_string(k)] = topic_coherence(t, docs, k);
            pmi[std::to_string(k)] = topic_pmi(t, docs, k);
        }
        per_topic.push_back({{"id", t.id}, {"tc", tc}, {"pmi", pmi}});
    }
    nlohmann::json report{{"command", "topics eval"}, {"ks", a.ks}, {"topics", per_topic}};

    if (!a.truth.empty()) {
        const nlohmann::json raw = nlohmann::json::parse(read_file(a.truth), nullptr, false);
        if (raw.is_discarded() || !(raw.is_array() || raw.is_object())) {
            throw ParseError(a.truth + ": expected {name: [keywords]} or an array of keyword lists", 1);
        }
        std::vector<std::pair<nlohmann::json, std::vector<std::string>>> truth;
        try {
            if (raw.is_object()) {
                for (const auto& [name, words] : raw.items()) truth.emplace_back(name, words.get<std::vector<std::string>>());
            } else {
                for (std::size_t i = 0; i < raw.size(); ++i) truth.emplace_back(i, raw[i].get<std::vector<std::string>>());
            }
        } catch (const nlohmann::json::exception&) {
            throw ParseError(a.truth + ": keyword lists must be arrays of strings", 1);
        }
        // Each truth topic is matched to the detected topic with the best F at that k.
        nlohmann::json prf = nlohmann::json::array();
        for (const auto& [name, words] : truth) {
            nlohmann::json by_k;
            for (std::size_t k : a.ks) {
                PrfScores best;
                std::optional<std::size_t> best_id;
                for (const auto& t : topics) {
                    std::vector<std::string> detected;
                    for (const auto& kw : t.keywords) detected.push_back(kw.first);
                    const PrfScores s = topic_prf(detected, words, k);
                    if (!best_id || s.f1 > best.f1) {
                        best = s;
                        best_id = t.id;
                    }
                }
                by_k[std::to_string(k)] = {{"topic", best_id ? nlohmann::json(*best_id) : nlohmann::json(nullptr)},
                                           {"precision", best.precision},
                                           {"recall", best.recall},
                                           {"f1", best.f1}};
            }
            prf.push_back({{"truth", name}, {"scores", by_k}});
        }
        report["prf"] = prf;
    }
    Output out(a.out);
    out.stream() << report.dump(2) << '\n';
}

} // namespace

void add_topic_commands(CLI::App& app) {
    auto* topics = app.add_subcommand("topics", "graph-based topic modelling");
    topics->require_subcommand(1);

    auto b = std::make_shared<BuildArgs>();
    auto* build = topics->add_subcommand("build", "build the word graph and detect topics");
    build->add_option("--docs", b->docs, "one document per line")->required();
    build->add_option("--vertex", b->vertex, "word, bigram, trigram, hashtag or biha")
        ->check(CLI::IsMember({"word", "bigram", "trigram", "hashtag", "biha"}))
        ->capture_default_str();
    build->add_option("--edge", b->edge, "cooccur or embed")
        ->check(CLI::IsMember({"cooccur", "embed"}))
        ->capture_default_str();
    build->add_option("--agg", b->agg, "none, hashtag or mention")
        ->check(CLI::IsMember({"none", "hashtag", "mention"}))
        ->capture_default_str();
    build->add_option("--window", b->window, "word mode: max token distance");
    build->add_option("--seed", b->seed, "Louvain seed (default $SIMFORGE_SEED or 0)");
    build->add_option("--top-k", b->top_k, "keywords kept per topic (0 = all)")->capture_default_str();
    build->add_option("-o,--out", b->out, "topics JSON (default stdout)");
    build->add_option("--graph-out", b->graph_out, "also write the graph as TSV");
    b->text.mode = "hashtag";
    b->text.add_to(build);
    b->embed.add_to(build);
    build->callback([b] { run_build(*b); });

    auto s = std::make_shared<AssignArgs>();
    auto* assign = topics->add_subcommand("assign", "assign each document to a topic");
    assign->add_option("--topics", s->topics, "topics JSON from 'topics build'")->required();
    assign->add_option("--docs", s->docs, "one document per line")->required();
    assign->add_option("-o,--out", s->out, "output JSONL (default stdout)");
    s->text.mode = "hashtag";
    s->text.add_to(assign);
    assign->callback([s] { run_assign(*s); });

    auto e = std::make_shared<EvalArgs>();
    auto* eval = topics->add_subcommand("eval", "coherence, PMI and keyword P/R/F");
    eval->add_option("--topics", e->topics, "topics JSON from 'topics build'")->required();
    eval->add_option("--docs", e->docs, "reference corpus, one document per line")->required();
    eval->add_option("--truth", e->truth, "ground-truth keywords: {name: [words]} or [[words], ...]");
    eval->add_option("--k", e->ks, "keyword cut-offs")->capture_default_str();
    eval->add_option("-o,--out", e->out, "report JSON (default stdout)");
    e->text.mode = "hashtag";
    e->text.add_to(eval);
    eval->callback([e] { run_eval(*e); });
}

} // namespace simforge::cli
