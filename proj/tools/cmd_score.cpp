#include "commands.hpp"
#include "io.hpp"

#include "simforge/error.hpp"
#include "simforge/registry.hpp"
#include "simforge/set_metrics.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>

namespace simforge::cli {

namespace {

struct PairRecord {
    std::string hyp;
    std::string ref;
    std::optional<std::string> category;
    std::optional<std::string> id;
};

struct PairInput {
    std::string pairs;
    std::string hyp_file;
    std::string ref_file;

    void add_to(CLI::App* app) {
        auto* p = app->add_option("--pairs", pairs, "JSONL with hyp, ref and optional category, id");
        auto* h = app->add_option("--hyp", hyp_file, "hypothesis lines");
        auto* r = app->add_option("--ref", ref_file, "reference lines, parallel to --hyp");
        p->excludes(h)->excludes(r);
        h->needs(r);
        r->needs(h);
    }

    std::vector<PairRecord> read() const {
        std::vector<PairRecord> out;
        if (!pairs.empty()) {
            for (const auto& j : read_jsonl(pairs)) {
                const std::size_t line = j.at("_line").get<std::size_t>();
                if (!j.contains("hyp") || !j.contains("ref") || !j["hyp"].is_string() || !j["ref"].is_string()) {
                    throw ParseError(pairs + ": hyp and ref must be strings", line);
                }
                PairRecord r{j["hyp"].get<std::string>(), j["ref"].get<std::string>(), {}, {}};
                if (j.contains("category") && j["category"].is_string()) r.category = j["category"].get<std::string>();
                if (j.contains("id") && !j["id"].is_null()) {
                    r.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
                }
                out.push_back(std::move(r));
            }
            return out;
        }
        if (hyp_file.empty()) throw InvalidArgument("give --pairs or --hyp/--ref");
        const auto hyps = read_lines(hyp_file);
        const auto refs = read_lines(ref_file);
        if (hyps.size() != refs.size()) {
            throw InvalidArgument("--hyp and --ref have different line counts");
        }
        for (std::size_t i = 0; i < hyps.size(); ++i) out.push_back({hyps[i], refs[i], {}, {}});
        return out;
    }
};

std::vector<std::string> split_metrics(const std::vector<std::string>& raw) {
    std::vector<std::string> ids;
    for (const auto& item : raw) {
        std::size_t start = 0;
        while (start <= item.size()) {
            std::size_t comma = item.find(',', start);
            if (comma == std::string::npos) comma = item.size();
            if (comma > start) ids.push_back(item.substr(start, comma - start));
            start = comma + 1;
        }
    }
    for (const auto& id : ids) metric_info(id);
    if (ids.empty()) throw InvalidArgument("no metric given");
    return ids;
}

struct ScoringSetup {
    std::unique_ptr<EmbeddingTable> table;
    std::unique_ptr<CountIndex> counts;
    MetricContext ctx;
};

struct ScoreArgs {
    PairInput input;
    std::vector<std::string> metrics;
    TextOptions text;
    EmbeddingOptions embed;
    std::string counts;
    std::string out;
    std::string report;
    double tversky_alpha = 0.5;
    double tversky_beta = 0.5;
    double simile_k = 0.25;

    void add_common(CLI::App* app) {
        input.add_to(app);
        app->add_option("-m,--metric", metrics, "metric ids (repeat or comma separated)")->required();
        text.add_to(app);
        embed.add_to(app);
        app->add_option("--counts", counts, "count index TSV for ngd");
        app->add_option("--tversky-alpha", tversky_alpha)->capture_default_str();
        app->add_option("--tversky-beta", tversky_beta)->capture_default_str();
        app->add_option("--simile-k", simile_k)->capture_default_str();
        app->add_option("-o,--out", out, "output file (default stdout)");
    }

    ScoringSetup setup(const std::vector<std::string>& ids) const {
        ScoringSetup s;
        bool need_embed = false, need_counts = false;
        for (const auto& id : ids) {
            need_embed |= metric_info(id).needs_embeddings;
            need_counts |= metric_info(id).needs_counts;
        }
        if (need_embed && !embed.given()) {
            throw InvalidArgument("embedding metrics need --embeddings or --hashed-dim");
        }
        if (need_counts && counts.empty()) throw InvalidArgument("ngd needs --counts");
        s.table = embed.load();
        if (!counts.empty()) {
            std::ifstream in(counts);
            if (!in) throw InvalidArgument("cannot open '" + counts + "'");
            s.counts = std::make_unique<CountIndex>(CountIndex::load_tsv(in));
        }
        s.ctx.embeddings = s.table.get();
        s.ctx.counts = s.counts.get();
        s.ctx.tversky_alpha = tversky_alpha;
        s.ctx.tversky_beta = tversky_beta;
        s.ctx.simile_k = simile_k;
        return s;
    }

    nlohmann::json config(const std::vector<std::string>& ids) const {
        return {{"metrics", ids}, {"tokenize", text.mode}, {"lowercase", text.lowercase}};
    }
};

// Per-item results plus means; errors are counted, not thrown.
struct Scored {
    std::vector<nlohmann::json> items;
    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> sums;  // cat -> metric
    std::size_t errors = 0;
};

Scored score_all(const std::vector<PairRecord>& records, const std::vector<std::string>& ids,
                 const ScoreArgs& args, const ScoringSetup& setup) {
    Scored s;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        const TokenSequence hyp = args.text.tokens(rec.hyp);
        const TokenSequence ref = args.text.tokens(rec.ref);
        const std::string cat = rec.category.value_or("uncategorized");
        nlohmann::json item{{"index", i}};
        if (rec.id) item["id"] = *rec.id;
        if (rec.category) item["category"] = *rec.category;
        nlohmann::json results = nlohmann::json::array();
        for (const auto& id : ids) {
            try {
                const MetricResult r = score_pair(id, hyp, ref, setup.ctx);
                results.push_back(to_json(r));
                auto& acc = s.sums[cat][id];
                acc.first += r.value;
                acc.second += 1;
            } catch (const Error& e) {
                results.push_back({{"metric", id}, {"error", e.what()}});
                ++s.errors;
            }
        }
        item["results"] = std::move(results);
        s.items.push_back(std::move(item));
    }
    return s;
}

std::map<std::string, double> overall_means(const Scored& s, const std::vector<std::string>& ids) {
    std::map<std::string, double> means;
    for (const auto& id : ids) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& [cat, per_metric] : s.sums) {
            auto it = per_metric.find(id);
            if (it == per_metric.end()) continue;
            sum += it->second.first;
            n += it->second.second;
        }
        if (n > 0) means[id] = sum / static_cast<double>(n);
    }
    return means;
}

void run_score(const ScoreArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    const auto ids = split_metrics(args.metrics);
    const auto setup = args.setup(ids);
    const auto records = args.input.read();
    const Scored s = score_all(records, ids, args, setup);

    Output out(args.out);
    for (const auto& item : s.items) out.line(item);
    nlohmann::json aggregate{{"aggregate", overall_means(s, ids)}, {"count", records.size()}};
    out.line(aggregate);

    if (!args.report.empty()) {
        Output rep(args.report);
        nlohmann::json r{{"command", "score"},
                         {"config", args.config(ids)},
                         {"items", s.items},
                         {"aggregates", aggregate["aggregate"]},
                         {"wall_time", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
        rep.stream() << r.dump(2) << '\n';
    }
    if (s.errors > 0) throw ItemErrors{s.errors};
}

void run_stress(const ScoreArgs& args, const std::string& format) {
    const auto ids = split_metrics(args.metrics);
    const auto setup = args.setup(ids);
    const auto records = args.input.read();
    const Scored s = score_all(records, ids, args, setup);

    // Categories keep first-appearance order so I..VII read left to right.
    std::vector<std::string> order;
    for (const auto& rec : records) {
        const std::string cat = rec.category.value_or("uncategorized");
        if (std::find(order.begin(), order.end(), cat) == order.end()) order.push_back(cat);
    }
    nlohmann::json table = nlohmann::json::object();
    for (const auto& cat : order) {
        nlohmann::json row = nlohmann::json::object();
        auto it = s.sums.find(cat);
        for (const auto& id : ids) {
            if (it == s.sums.end() || !it->second.count(id)) {
                row[id] = nullptr;
                continue;
            }
            const auto& [sum, n] = it->second.at(id);
            row[id] = sum / static_cast<double>(n);
        }
        table[cat] = row;
    }

    Output out(args.out);
    if (format == "json") {
        out.line({{"command", "stress"}, {"config", args.config(ids)}, {"categories", order},
                  {"means", table}, {"overall", overall_means(s, ids)}});
    } else {
        auto& os = out.stream();
        os << "metric";
        for (const auto& cat : order) os << '\t' << cat;
        os << '\n';
        for (const auto& id : ids) {
            os << id;
            for (const auto& cat : order) {
                const auto& v = table[cat][id];
                if (v.is_null()) {
                    os << "\t-";
                } else {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.4f", v.get<double>());
                    os << '\t' << buf;
                }
            }
            os << '\n';
        }
    }
    if (s.errors > 0) throw ItemErrors{s.errors};
}

} // namespace

void add_score_commands(CLI::App& app) {
    auto score_args = std::make_shared<ScoreArgs>();
    auto* score = app.add_subcommand("score", "score hypothesis/reference pairs");
    score_args->add_common(score);
    score->add_option("--report", score_args->report, "write a full JSON run report here");
    score->callback([score_args] { run_score(*score_args); });

    auto stress_args = std::make_shared<ScoreArgs>();
    auto format = std::make_shared<std::string>("table");
    auto* stress = app.add_subcommand("stress", "per-category metric means");
    stress_args->add_common(stress);
    stress->add_option("--format", *format, "table or json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    stress->callback([stress_args, format] { run_stress(*stress_args, *format); });

    struct CountArgs {
        std::string corpus;
        std::string vocab;
        std::string out;
        TextOptions text;
    };
    auto count_args = std::make_shared<CountArgs>();
    auto* counts = app.add_subcommand("counts", "build a document count index");
    counts->add_option("--corpus", count_args->corpus, "one document per line")->required();
    counts->add_option("--vocab", count_args->vocab, "restrict to these tokens (one per line)");
    counts->add_option("-o,--out", count_args->out, "output TSV (default stdout)");
    count_args->text.add_to(counts);
    counts->callback([count_args] {
        std::vector<TokenSequence> docs;
        for (const auto& line : read_lines(count_args->corpus)) docs.push_back(count_args->text.tokens(line));
        std::optional<std::set<Token>> vocab;
        if (!count_args->vocab.empty()) {
            vocab.emplace();
            for (const auto& line : read_lines(count_args->vocab)) {
                if (!line.empty()) vocab->insert(line);
            }
        }
        const CountIndex index = build_count_index(docs, vocab);
        Output out(count_args->out);
        index.save_tsv(out.stream());
    });
}

} // namespace simforge::cli
