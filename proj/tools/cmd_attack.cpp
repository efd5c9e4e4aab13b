#include "commands.hpp"
#include "io.hpp"

#include "simforge/attacks.hpp"
#include "simforge/error.hpp"
#include "simforge/registry.hpp"

#include <CLI11.hpp>

#include <memory>
#include <set>
#include <sstream>

namespace simforge::cli {

namespace {

const char* const kDefaultAlphabet = ". , ; : ! ? ' \" - ( ) [ ] { } / \\ | * & ^ % $ # @ ~ ` + = < > _";

struct GaFlags {
    std::size_t pop;
    std::size_t gens;
    std::optional<std::uint64_t> seed;
    std::optional<double> mutation;
    double crossover = 0.9;
    std::size_t elitism = 1;

    GaFlags(std::size_t p, std::size_t g) : pop(p), gens(g) {}

    void add_to(CLI::App* app) {
        app->add_option("--pop", pop, "population size")->capture_default_str();
        app->add_option("--gens", gens, "generations")->capture_default_str();
        app->add_option("--seed", seed, "RNG seed (default $SIMFORGE_SEED or 0)");
        app->add_option("--mutation", mutation, "per-slot mutation rate (default 1/length)");
        app->add_option("--crossover", crossover, "crossover rate")->capture_default_str();
        app->add_option("--elitism", elitism, "elite count (single-objective GA)")->capture_default_str();
    }

    GAConfig config(ObjectiveMode mode) const {
        GAConfig c;
        c.population = pop;
        c.generations = gens;
        c.seed = resolve_seed(seed);
        c.mutation_rate = mutation;
        c.crossover_rate = crossover;
        c.elitism = elitism;
        c.objective_mode = mode;
        c.validate();
        return c;
    }
};

nlohmann::json echo(const GAConfig& c, std::size_t len) {
    return {{"seed", c.seed},
            {"pop", c.population},
            {"gens", c.generations},
            {"mutation", c.mutation_for(len)},
            {"crossover", c.crossover_rate}};
}

std::string text_or_file(const std::string& text, const std::string& file, const char* what) {
    if (!text.empty() && !file.empty()) throw InvalidArgument(std::string("give ") + what + " as text or file, not both");
    if (!file.empty()) return read_file(file);
    if (text.empty()) throw InvalidArgument(std::string("missing ") + what);
    return text;
}

std::vector<TokenSequence> read_refs(const std::string& path, const TextOptions& text) {
    std::vector<TokenSequence> refs;
    for (const auto& line : read_lines(path)) {
        auto t = text.tokens(line);
        if (!t.empty()) refs.push_back(std::move(t));
    }
    if (refs.empty()) throw InvalidArgument("'" + path + "' has no references");
    return refs;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
    std::string ref, ref_file, vocab_file, doc_file, out;
    std::size_t genome_len = 0;
    bool final_only = false;
    bool front_only = false;
    GaFlags ga{50, 200};
    TextOptions text;
};

void run_sample(const SampleArgs& a) {
    const TokenSequence ref = a.text.tokens(text_or_file(a.ref, a.ref_file, "--ref"));
    std::set<Token> vocab_set;
    if (!a.vocab_file.empty()) {
        for (const auto& t : a.text.tokens(read_file(a.vocab_file))) vocab_set.insert(t);
    }
    if (!a.doc_file.empty()) {
        for (const auto& t : a.text.tokens(read_file(a.doc_file))) vocab_set.insert(t);
    }
    if (a.vocab_file.empty() && a.doc_file.empty()) throw InvalidArgument("give --vocab-file or --doc-file");
    const std::vector<Token> vocab(vocab_set.begin(), vocab_set.end());
    const std::size_t len = a.genome_len > 0 ? a.genome_len : std::max<std::size_t>(1, 2 * ref.size());
    const GAConfig cfg = a.ga.config(ObjectiveMode::multi_rouge);

    const SamplerResult res = ga_sample_rouge_space(ref, vocab, cfg, len);
    const auto& samples = a.final_only ? res.population : res.searched;

    Output out(a.out);
    nlohmann::json header = echo(cfg, len);
    header["command"] = "attack sample";
    header["genome_len"] = len;
    header["vocab_size"] = vocab.size();
    header["emitted"] = a.final_only ? "final" : "searched";
    out.line(header);
    if (a.front_only) {
        for (std::size_t i : pareto_front(samples)) out.line(to_json(samples[i]));
    } else {
        for (const auto& s : samples) out.line(to_json(s));
    }
}

// ---------------------------------------------------------------------------

struct Bag2SeqArgs {
    std::string input, doc_file, ref_file, idf_corpus, out;
    std::string mode = "oracle";
    std::size_t c = 3;
    std::size_t top_k = 20;
    TextOptions text;
};

void run_bag2seq(const Bag2SeqArgs& a) {
    struct Item {
        TokenSequence doc;
        std::optional<TokenSequence> ref;
    };
    std::vector<Item> items;
    if (!a.input.empty()) {
        if (!a.doc_file.empty() || !a.ref_file.empty()) {
            throw InvalidArgument("--input cannot be combined with --doc-file/--ref-file");
        }
        for (const auto& j : read_jsonl(a.input)) {
            if (!j.contains("doc") || !j["doc"].is_string()) {
                throw ParseError(a.input + ": \"doc\" must be a string", j["_line"].get<std::size_t>());
            }
            Item it{a.text.tokens(j["doc"].get<std::string>()), std::nullopt};
            if (j.contains("ref") && j["ref"].is_string()) it.ref = a.text.tokens(j["ref"].get<std::string>());
            items.push_back(std::move(it));
        }
    } else {
        if (a.doc_file.empty()) throw InvalidArgument("give --input or --doc-file");
        Item it{a.text.tokens(read_file(a.doc_file)), std::nullopt};
        if (!a.ref_file.empty()) it.ref = a.text.tokens(read_file(a.ref_file));
        items.push_back(std::move(it));
    }

    AttackConfig cfg;
    cfg.mode = a.mode == "heuristic" ? AttackMode::heuristic : AttackMode::oracle;
    cfg.cutoff = a.c;
    cfg.top_k = a.top_k;
    TfIdfWeights idf;
    if (cfg.mode == AttackMode::heuristic) {
        std::vector<TokenSequence> corpus;
        if (!a.idf_corpus.empty()) {
            for (const auto& line : read_lines(a.idf_corpus)) corpus.push_back(a.text.tokens(line));
        } else {
            for (const auto& it : items) corpus.push_back(it.doc);
        }
        idf = tfidf_index(corpus);
        cfg.idf = &idf;
    } else if (!a.idf_corpus.empty()) {
        throw InvalidArgument("--idf-corpus only applies to --mode heuristic");
    }

    Output out(a.out);
    out.line({{"command", "attack bag2seq"}, {"mode", a.mode}, {"c", a.c}, {"top_k", a.top_k}});
    std::size_t errors = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        nlohmann::json line{{"index", i}};
        try {
            const AttackResult r = rouge_attack(items[i].doc, items[i].ref, cfg);
            nlohmann::json bag = nlohmann::json::object();
            for (const auto& [gram, n] : r.bag.counts()) bag[gram[0]] = n;
            nlohmann::json scores = nlohmann::json::array();
            for (const auto& s : r.scores) scores.push_back(to_json(s));
            line["text"] = render(r.text);
            line["bag"] = bag;
            line["scores"] = scores;
        } catch (const Error& e) {
            line["error"] = e.what();
            ++errors;
        }
        out.line(line);
    }
    if (errors > 0) throw ItemErrors{errors};
}

// ---------------------------------------------------------------------------

struct ScorerArgs {
    std::string metric = "embedf1";
    EmbeddingOptions embed;
    std::unique_ptr<EmbeddingTable> table;
    MetricContext ctx;

    void add_to(CLI::App* app) {
        app->add_option("--metric", metric, "similarity metric id used as the scorer")->capture_default_str();
        embed.add_to(app);
    }

    PairScorer make() {
        const MetricInfo& info = metric_info(metric);
        if (info.orientation != Orientation::similarity) {
            throw InvalidArgument("scorer metric must be a similarity, got '" + metric + "'");
        }
        if (info.needs_counts) throw InvalidArgument("'" + metric + "' cannot be used as a scorer here");
        if (info.needs_embeddings && !embed.given()) {
            throw InvalidArgument("'" + metric + "' needs --embeddings or --hashed-dim");
        }
        table = embed.load();
        ctx.embeddings = table.get();
        const std::string id = metric;
        const MetricContext* c = &ctx;
        return [id, c](const TokenSequence& text, const TokenSequence& ref) {
            return score_pair(id, text, ref, *c).value;
        };
    }
};

struct TriggerArgs {
    std::string refs, alphabet_file, out;
    std::size_t len = 16;
    double threshold = 0.88;
    std::size_t rounds = 5;
    std::string objective = "fitting";
    GaFlags ga{10, 200};
    ScorerArgs scorer;
    TextOptions text;
};


void run_trigger(TriggerArgs& a) {
    const auto refs = read_refs(a.refs, a.text);
    std::vector<Token> alphabet;
    {
        std::set<Token> seen;
        const std::string raw = a.alphabet_file.empty() ? kDefaultAlphabet : read_file(a.alphabet_file);
        for (const auto& t : tokenize(raw, TokenizeMode::word)) {
            if (seen.insert(t).second) alphabet.push_back(t);
        }
    }
    const GAConfig cfg = a.ga.config(ObjectiveMode::single_scalar);
    const PairScorer scorer = a.scorer.make();
    const auto objective = a.objective == "current" ? TriggerObjective::current_target : TriggerObjective::fitting_set;

    const TriggerResult res = ga_universal_trigger(refs, scorer, alphabet, cfg, a.len, a.threshold, a.rounds, objective);

    Output out(a.out);
    out.stream() << render(res.trigger) << '\n';
    nlohmann::json stats = to_json(res);
    stats["command"] = "attack trigger";
    stats["config"] = echo(cfg, a.len);
    stats["config"]["len"] = a.len;
    stats["config"]["threshold"] = a.threshold;
    stats["config"]["rounds"] = a.rounds;
    stats["config"]["objective"] = a.objective;
    stats["config"]["metric"] = a.scorer.metric;
    out.line(stats);
}

struct ProbeArgs {
    std::string candidate, candidate_file, refs, out;
    ScorerArgs scorer;
    TextOptions text;
};

void run_probe(ProbeArgs& a) {
    const TokenSequence cand = a.text.tokens(text_or_file(a.candidate, a.candidate_file, "--candidate"));
    const auto refs = read_refs(a.refs, a.text);
    const PairScorer scorer = a.scorer.make();
    const ProbeStats s = backdoor_probe(cand, refs, scorer);
    Output out(a.out);
    out.line({{"command", "attack probe"},
              {"metric", a.scorer.metric},
              {"candidate", render(cand)},
              {"count", refs.size()},
              {"mean", s.mean},
              {"min", s.min},
              {"max", s.max}});
}

struct SanitizeArgs {
    std::string text, input, out;
    SanitizePolicy policy;
};

void run_sanitize(const SanitizeArgs& a) {
    if (!a.text.empty() && !a.input.empty()) throw InvalidArgument("give --text or --input, not both");
    std::vector<std::string> texts;
    if (!a.input.empty()) {
        texts = read_lines(a.input);
    } else {
        texts.push_back(a.text);
    }
    Output out(a.out);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        nlohmann::json j = to_json(sanitize(texts[i], a.policy));
        j["index"] = i;
        out.line(j);
    }
}

} // namespace

void add_attack_commands(CLI::App& app) {
    auto* attack = app.add_subcommand("attack", "evasion attacks and defences");
    attack->require_subcommand(1);

    auto s = std::make_shared<SampleArgs>();
    auto* sample = attack->add_subcommand("sample", "GA sampling of the ROUGE-1/2/L space");
    auto* ref = sample->add_option("--ref", s->ref, "reference text");
    auto* ref_file = sample->add_option("--ref-file", s->ref_file, "reference text file");
    ref->excludes(ref_file);
    sample->add_option("--vocab-file", s->vocab_file, "whitespace-separated vocabulary");
    sample->add_option("--doc-file", s->doc_file, "source document; its tokens join the vocabulary");
    sample->add_option("--genome-len", s->genome_len, "slots per genome (default 2 x reference length)");
    sample->add_flag("--final-only", s->final_only, "emit only the final generation");
    sample->add_flag("--front-only", s->front_only, "emit only non-dominated samples");
    sample->add_option("-o,--out", s->out, "output JSONL (default stdout)");
    s->ga.add_to(sample);
    s->text.add_to(sample);
    sample->callback([s] { run_sample(*s); });

    auto b = std::make_shared<Bag2SeqArgs>();
    auto* b2s = attack->add_subcommand("bag2seq", "bag-of-words to sequence attack");
    b2s->add_option("--input", b->input, "JSONL with doc and optional ref");
    b2s->add_option("--doc-file", b->doc_file, "single document");
    b2s->add_option("--ref-file", b->ref_file, "reference for --doc-file");
    b2s->add_option("--mode", b->mode, "oracle or heuristic")
        ->check(CLI::IsMember({"oracle", "heuristic"}))
        ->capture_default_str();
    b2s->add_option("--c", b->c, "minimum run length")->capture_default_str()->check(CLI::PositiveNumber);
    b2s->add_option("--top-k", b->top_k, "heuristic bag size")->capture_default_str();
    b2s->add_option("--idf-corpus", b->idf_corpus, "heuristic mode: idf corpus, one document per line");
    b2s->add_option("-o,--out", b->out, "output JSONL (default stdout)");
    b->text.add_to(b2s);
    b2s->callback([b] { run_bag2seq(*b); });

    auto t = std::make_shared<TriggerArgs>();
    auto* trig = attack->add_subcommand("trigger", "universal non-alphanumeric trigger search");
    trig->add_option("--refs", t->refs, "one reference per line")->required();
    trig->add_option("--alphabet-file", t->alphabet_file, "whitespace-separated non-alphanumeric tokens");
    trig->add_option("--len", t->len, "trigger length")->capture_default_str();
    trig->add_option("--threshold", t->threshold, "stop once the score reaches this")->capture_default_str();
    trig->add_option("--rounds", t->rounds, "maximum rounds")->capture_default_str();
    trig->add_option("--objective", t->objective, "fitting (all targets so far) or current (latest target)")
        ->check(CLI::IsMember({"fitting", "current"}))
        ->capture_default_str();
    trig->add_option("-o,--out", t->out, "output (default stdout)");
    t->ga.add_to(trig);
    t->scorer.add_to(trig);
    t->text.add_to(trig);
    trig->callback([t] { run_trigger(*t); });

    auto p = std::make_shared<ProbeArgs>();
    auto* probe = attack->add_subcommand("probe", "score one fixed candidate against many references");
    auto* cand = probe->add_option("--candidate", p->candidate, "candidate text");
    auto* cand_file = probe->add_option("--candidate-file", p->candidate_file, "candidate text file");
    cand->excludes(cand_file);
    probe->add_option("--refs", p->refs, "one reference per line")->required();
    probe->add_option("-o,--out", p->out, "output (default stdout)");
    p->scorer.add_to(probe);
    p->text.add_to(probe);
    probe->callback([p] { run_probe(*p); });

    auto z = std::make_shared<SanitizeArgs>();
    auto* san = attack->add_subcommand("sanitize", "flag non-linguistic input");
    auto* txt = san->add_option("--text", z->text, "text to check");
    auto* in = san->add_option("--input", z->input, "one text per line");
    txt->excludes(in);
    san->add_option("--run-len", z->policy.run_len, "non-alphanumeric run length")->capture_default_str();
    san->add_option("--max-rep", z->policy.max_rep, "allowed repeats of one token")->capture_default_str();
    san->add_option("--min-ratio", z->policy.min_ratio, "minimum letter ratio")->capture_default_str();
    san->add_option("-o,--out", z->out, "output JSONL (default stdout)");
    san->callback([z] { run_sanitize(*z); });
}

} // namespace simforge::cli
