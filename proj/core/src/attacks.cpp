#include "simforge/attacks.hpp"

#include "simforge/error.hpp"
#include "simforge/lexical.hpp"
#include "simforge/random.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace simforge {

TokenSequence render_genome(const Genome& genome, const std::vector<Token>& vocab) {
    TokenSequence out;
    out.reserve(genome.slots.size());
    for (std::size_t s : genome.slots) {
        if (s == kEmptySlot) continue;
        if (s > vocab.size()) throw InvalidArgument("genome slot outside the vocabulary");
        out.push_back(vocab[s - 1]);
    }
    return out;
}

void GAConfig::validate() const {
    if (population < 2) throw InvalidArgument("GA population must be >= 2");
    if (elitism < 1 || elitism >= population) {
        throw InvalidArgument("GA elitism must be in [1, population)");
    }
    if (!(crossover_rate > 0.0 && crossover_rate < 1.0)) {
        throw InvalidArgument("GA crossover rate must be in (0, 1)");
    }
    if (mutation_rate && !(*mutation_rate > 0.0 && *mutation_rate < 1.0)) {
        throw InvalidArgument("GA mutation rate must be in (0, 1)");
    }
}

double GAConfig::mutation_for(std::size_t genome_len) const {
    if (mutation_rate) return *mutation_rate;
    return std::min(0.5, 1.0 / static_cast<double>(std::max<std::size_t>(genome_len, 1)));
}

// ---------------------------------------------------------------------------
// Shared operators

namespace {

Genome random_genome(Rng& rng, std::size_t len, std::size_t lo, std::size_t hi) {
    Genome g;
    g.slots.resize(len);
    for (auto& s : g.slots) s = lo + rng.index(hi - lo);
    return g;
}

std::pair<Genome, Genome> uniform_crossover(const Genome& a, const Genome& b, double rate, Rng& rng) {
    Genome x = a, y = b;
    if (rng.bernoulli(rate)) {
        for (std::size_t i = 0; i < x.slots.size(); ++i) {
            if (rng.bernoulli(0.5)) std::swap(x.slots[i], y.slots[i]);
        }
    }
    return {std::move(x), std::move(y)};
}

void mutate(Genome& g, double rate, Rng& rng, std::size_t lo, std::size_t hi) {
    for (auto& s : g.slots) {
        if (rng.bernoulli(rate)) s = lo + rng.index(hi - lo);
    }
}

// ---------------------------------------------------------------------------
// NSGA-II

using Objectives = std::array<double, 3>;

bool dominates(const Objectives& a, const Objectives& b) {
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] < b[k]) return false;
        if (a[k] > b[k]) strictly = true;
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> nondominated_fronts(const std::vector<Objectives>& obj,
                                                          std::vector<std::size_t>& rank) {
    const std::size_t n = obj.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> dom_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    rank.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(obj[p], obj[q])) {
                dominated[p].push_back(q);
            } else if (dominates(obj[q], obj[p])) {
                ++dom_count[p];
            }
        }
        if (dom_count[p] == 0) fronts[0].push_back(p);
    }
    for (std::size_t f = 0; !fronts[f].empty(); ++f) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[f]) {
            for (std::size_t q : dominated[p]) {
                if (--dom_count[q] == 0) {
                    rank[q] = f + 1;
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

void crowding(const std::vector<Objectives>& obj, const std::vector<std::size_t>& front,
              std::vector<double>& dist) {
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i : front) dist[i] = 0.0;
    if (front.size() <= 2) {
        for (std::size_t i : front) dist[i] = inf;
        return;
    }
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<std::size_t> order = front;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return obj[a][k] < obj[b][k]; });
        const double lo = obj[order.front()][k];
        const double hi = obj[order.back()][k];
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        if (hi <= lo) continue;
        for (std::size_t j = 1; j + 1 < order.size(); ++j) {
            dist[order[j]] += (obj[order[j + 1]][k] - obj[order[j - 1]][k]) / (hi - lo);
        }
    }
}

ParetoSample score_sample(const TokenSequence& ref, TokenSequence text) {
    ParetoSample s;
    s.r1 = rouge_n(1, ref, text).value;
    s.r2 = rouge_n(2, ref, text).value;
    s.rl = rouge_l(ref, text).value;
    s.text = std::move(text);
    return s;
}

Objectives objectives_of(const ParetoSample& s) { return {s.r1, s.r2, s.rl}; }

} // namespace

SamplerResult ga_sample_rouge_space(const TokenSequence& ref, const std::vector<Token>& vocab,
                                    const GAConfig& cfg, std::size_t genome_len) {
    cfg.validate();
    if (vocab.empty()) throw InvalidArgument("sampler vocabulary is empty");
    if (genome_len == 0) throw InvalidArgument("genome length must be >= 1");
    if (cfg.objective_mode != ObjectiveMode::multi_rouge) {
        throw InvalidArgument("the ROUGE sampler needs objective_mode multi_rouge");
    }
    Rng rng(cfg.seed);
    const std::size_t hi = vocab.size() + 1;  // slot values [0, hi), 0 = EMPTY
    const double mut = cfg.mutation_for(genome_len);
    const std::size_t pop = cfg.population;

    std::vector<Genome> genomes;
    std::vector<ParetoSample> samples;
    for (std::size_t i = 0; i < pop; ++i) {
        genomes.push_back(random_genome(rng, genome_len, 0, hi));
        samples.push_back(score_sample(ref, render_genome(genomes.back(), vocab)));
    }

    std::vector<std::size_t> rank;
    std::vector<double> dist(pop, 0.0);
    auto rank_population = [&](const std::vector<ParetoSample>& s) {
        std::vector<Objectives> obj;
        for (const auto& x : s) obj.push_back(objectives_of(x));
        auto fronts = nondominated_fronts(obj, rank);
        dist.assign(s.size(), 0.0);
        for (const auto& f : fronts) crowding(obj, f, dist);
        return std::make_pair(std::move(obj), std::move(fronts));
    };
    rank_population(samples);
    SamplerResult result;
    result.searched = samples;

    auto better = [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b]) return rank[a] < rank[b];
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return a < b;
    };
    auto tournament = [&]() {
        std::size_t a = rng.index(pop), b = rng.index(pop);
        return better(a, b) ? a : b;
    };

    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Genome> merged = genomes;
        std::vector<ParetoSample> merged_samples = samples;
        while (merged.size() < 2 * pop) {
            const Genome& pa = genomes[tournament()];
            const Genome& pb = genomes[tournament()];
            auto [ca, cb] = uniform_crossover(pa, pb, cfg.crossover_rate, rng);
            for (Genome* child : {&ca, &cb}) {
                if (merged.size() == 2 * pop) break;
                mutate(*child, mut, rng, 0, hi);
                merged_samples.push_back(score_sample(ref, render_genome(*child, vocab)));
                merged.push_back(std::move(*child));
            }
        }

        auto [obj, fronts] = rank_population(merged_samples);
        std::vector<std::size_t> keep;
        for (const auto& f : fronts) {
            if (keep.size() + f.size() <= pop) {
                keep.insert(keep.end(), f.begin(), f.end());
                continue;
            }
            std::vector<std::size_t> last = f;
            std::stable_sort(last.begin(), last.end(),
                             [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
            keep.insert(keep.end(), last.begin(), last.begin() + static_cast<std::ptrdiff_t>(pop - keep.size()));
            break;
        }
        std::vector<Genome> next_genomes;
        std::vector<ParetoSample> next_samples;
        for (std::size_t i : keep) {
            next_genomes.push_back(std::move(merged[i]));
            next_samples.push_back(std::move(merged_samples[i]));
        }
        genomes = std::move(next_genomes);
        samples = std::move(next_samples);
        rank_population(samples);
        result.searched.insert(result.searched.end(), samples.begin(), samples.end());
    }
    result.population = std::move(samples);
    return result;
}

std::vector<std::size_t> pareto_front(const std::vector<ParetoSample>& samples) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < samples.size() && !dominated; ++j) {
            dominated = j != i && dominates(objectives_of(samples[j]), objectives_of(samples[i]));
        }
        if (!dominated) front.push_back(i);
    }
    return front;
}

nlohmann::json to_json(const ParetoSample& sample) {
    return {{"text", render(sample.text)}, {"r1", sample.r1}, {"r2", sample.r2}, {"rl", sample.rl}};
}

// ---------------------------------------------------------------------------
// Bag attack

NGramBag oracle_bag(const TokenSequence& doc, const TokenSequence& ref) {
    return bag_combine(BagOp::intersect, unigram_bag(doc), unigram_bag(ref));
}

NGramBag heuristic_bag(const TokenSequence& doc, const TfIdfWeights& idf, std::size_t top_k) {
    if (top_k == 0) throw InvalidArgument("heuristic bag needs top_k >= 1");
    const NGramBag tf = unigram_bag(doc);
    std::vector<std::pair<Token, double>> ranked;
    for (const auto& [gram, count] : tf.counts()) {
        ranked.emplace_back(gram[0], static_cast<double>(count) * idf.weight(gram[0]));
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    NGramBag out(1);
    for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
        out.add({ranked[i].first}, std::min<std::size_t>(tf.count({ranked[i].first}), 2));
    }
    return out;
}

TokenSequence bag_to_sequence(const TokenSequence& doc, const NGramBag& W, std::size_t C) {
    if (C == 0) throw InvalidArgument("bag_to_sequence cutoff must be >= 1");
    if (W.arity() != 1) throw InvalidArgument("bag_to_sequence needs a unigram bag");
    const TokenSequence a = strip_empty(doc);
    std::map<Token, std::size_t> left;
    for (const auto& [gram, count] : W.counts()) left[gram[0]] = count;
    std::size_t remaining = W.size();

    TokenSequence out;
    while (remaining > 0) {
        std::size_t best_start = 0, best_len = 0;
        std::map<Token, std::size_t> window;
        std::size_t lo = 0;
        for (std::size_t hi = 0; hi < a.size(); ++hi) {
            auto it = left.find(a[hi]);
            const std::size_t cap = it == left.end() ? 0 : it->second;
            ++window[a[hi]];
            while (window[a[hi]] > cap) {
                --window[a[lo]];
                ++lo;
            }
            if (hi + 1 - lo > best_len) {
                best_len = hi + 1 - lo;
                best_start = lo;
            }
        }
        if (best_len < C) break;
        for (std::size_t i = best_start; i < best_start + best_len; ++i) {
            out.push_back(a[i]);
            --left[a[i]];
        }
        remaining -= best_len;
    }
    return out;
}

AttackResult rouge_attack(const TokenSequence& doc, const std::optional<TokenSequence>& ref,
                          const AttackConfig& config) {
    AttackResult result;
    if (config.mode == AttackMode::oracle) {
        if (!ref) throw InvalidArgument("oracle attack needs a reference");
        result.bag = oracle_bag(doc, *ref);
    } else {
        if (config.idf == nullptr) throw InvalidArgument("heuristic attack needs idf weights");
        result.bag = heuristic_bag(doc, *config.idf, config.top_k);
    }
    result.text = bag_to_sequence(doc, result.bag, config.cutoff);
    if (ref) {
        result.scores.push_back(rouge_n(1, *ref, result.text));
        result.scores.push_back(rouge_n(2, *ref, result.text));
        result.scores.push_back(rouge_l(*ref, result.text));
        result.scores.push_back(meteor_lite(result.text, *ref));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Trigger search

namespace {

struct Scored {
    Genome genome;
    double fitness;
};

// Evolves `pop` in place. Stops early once the best fitness reaches
// `threshold`. Returns the best fitness of every evaluated generation.
std::vector<double> evolve_single(std::vector<Genome>& pop, const std::function<double(const Genome&)>& fitness,
                                  const GAConfig& cfg, double mutation, std::size_t alphabet_size,
                                  double threshold, Rng& rng) {
    std::vector<double> history;
    auto evaluate = [&]() {
        std::vector<Scored> scored;
        for (auto& g : pop) scored.push_back({g, fitness(g)});
        std::stable_sort(scored.begin(), scored.end(),
                         [](const Scored& a, const Scored& b) { return a.fitness > b.fitness; });
        return scored;
    };
    std::vector<Scored> scored = evaluate();
    history.push_back(scored.front().fitness);
    for (std::size_t gen = 0; gen < cfg.generations && history.back() < threshold; ++gen) {
        auto pick = [&]() -> const Genome& {
            std::size_t a = rng.index(scored.size()), b = rng.index(scored.size());
            return scored[std::min(a, b)].genome;  // sorted, so the lower index is fitter
        };
        std::vector<Genome> next;
        for (std::size_t e = 0; e < cfg.elitism; ++e) next.push_back(scored[e].genome);
        while (next.size() < pop.size()) {
            auto [x, y] = uniform_crossover(pick(), pick(), cfg.crossover_rate, rng);
            for (Genome* child : {&x, &y}) {
                if (next.size() == pop.size()) break;
                mutate(*child, mutation, rng, 0, alphabet_size);
                next.push_back(std::move(*child));
            }
        }
        pop = std::move(next);
        scored = evaluate();
        history.push_back(scored.front().fitness);
    }
    for (std::size_t i = 0; i < pop.size(); ++i) pop[i] = scored[i].genome;
    return history;
}

TokenSequence alphabet_text(const Genome& g, const std::vector<Token>& alphabet) {
    TokenSequence out;
    for (std::size_t s : g.slots) out.push_back(alphabet[s]);
    return out;
}

} // namespace

TriggerResult ga_universal_trigger(const std::vector<TokenSequence>& refs, const PairScorer& scorer,
                                   const std::vector<Token>& alphabet, const GAConfig& cfg,
                                   std::size_t trigger_len, double fitness_threshold,
                                   std::size_t max_rounds, TriggerObjective objective) {
    cfg.validate();
    if (alphabet.empty()) throw InvalidArgument("trigger alphabet is empty");
    for (const Token& t : alphabet) {
        if (t.empty() || std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isalnum(c) != 0; })) {
            throw InvalidArgument("trigger alphabet token '" + t + "' is empty or alphanumeric");
        }
    }
    if (refs.empty()) throw InvalidArgument("trigger search needs at least one reference");
    if (trigger_len == 0) throw InvalidArgument("trigger length must be >= 1");
    if (max_rounds == 0) throw InvalidArgument("max_rounds must be >= 1");

    Rng rng(cfg.seed);
    const double mutation = cfg.mutation_for(trigger_len);
    std::vector<Genome> pop;
    for (std::size_t i = 0; i < cfg.population; ++i) {
        pop.push_back(random_genome(rng, trigger_len, 0, alphabet.size()));
    }

    TriggerResult result;
    result.min_score = -std::numeric_limits<double>::infinity();
    std::size_t target = 0;
    std::vector<std::size_t> fitting;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        TriggerRound log;
        log.target = target;
        if (objective == TriggerObjective::current_target) fitting.clear();
        if (std::find(fitting.begin(), fitting.end(), target) == fitting.end()) fitting.push_back(target);
        auto fitness = [&](const Genome& g) {
            const TokenSequence text = alphabet_text(g, alphabet);
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t t : fitting) worst = std::min(worst, scorer(text, refs[t]));
            return worst;
        };
        log.best_fitness = evolve_single(pop, fitness, cfg, mutation, alphabet.size(), fitness_threshold, rng);
        log.champion = alphabet_text(pop.front(), alphabet);

        std::vector<double> scores;
        for (const auto& r : refs) scores.push_back(scorer(log.champion, r));
        const auto lowest = std::min_element(scores.begin(), scores.end());
        log.min_score = *lowest;
        if (log.min_score > result.min_score) {
            result.trigger = log.champion;
            result.ref_scores = scores;
            result.min_score = log.min_score;
        }
        result.rounds.push_back(std::move(log));
        if (*lowest >= fitness_threshold) break;
        target = static_cast<std::size_t>(lowest - scores.begin());
    }
    return result;
}

nlohmann::json to_json(const TriggerResult& result) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : result.rounds) {
        rounds.push_back({{"target", r.target},
                          {"generations", r.best_fitness.size() - 1},
                          {"best_fitness", r.best_fitness.back()},
                          {"champion", render(r.champion)},
                          {"min_score", r.min_score}});
    }
    return {{"trigger", render(result.trigger)},
            {"ref_scores", result.ref_scores},
            {"min_score", result.min_score},
            {"rounds", rounds}};
}

ProbeStats backdoor_probe(const TokenSequence& candidate, const std::vector<TokenSequence>& refs,
                          const PairScorer& scorer) {
    if (refs.empty()) throw InvalidArgument("backdoor probe needs at least one reference");
    ProbeStats s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& r : refs) {
        const double v = scorer(candidate, r);
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(refs.size());
    // Keep min <= mean <= max under rounding.
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

// ---------------------------------------------------------------------------
// Sanitizer

bool SanitizeReport::has(SanitizeFlagKind kind) const {
    return std::any_of(flags.begin(), flags.end(), [&](const SanitizeFlag& f) { return f.kind == kind; });
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

} // namespace

SanitizeReport sanitize(std::string_view text, const SanitizePolicy& policy) {
    SanitizeReport report;
    const auto points = utf8_code_points(text);

    std::size_t letters = 0, visible = 0, run = 0, longest = 0;
    for (const auto& cp : points) {
        const unsigned char c = static_cast<unsigned char>(cp[0]);
        const bool multibyte = cp.size() > 1 || c >= 0x80;
        if (cp.size() == 1 && is_space(cp[0])) {
            run = 0;
            continue;
        }
        ++visible;
        const bool alpha = multibyte || is_ascii_alpha(c);
        if (alpha) ++letters;
        if (alpha || is_ascii_digit(c)) {
            run = 0;
        } else {
            longest = std::max(longest, ++run);
        }
    }

    if (visible == 0) {
        report.flags.push_back({SanitizeFlagKind::empty, {}, 0.0});
    } else {
        if (longest >= policy.run_len) {
            report.flags.push_back({SanitizeFlagKind::non_alnum_run, {}, static_cast<double>(longest)});
        }
        std::map<std::string, std::size_t> counts;
        std::size_t start = std::string_view::npos;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            const bool sep = i == text.size() || is_space(text[i]);
            if (!sep && start == std::string_view::npos) start = i;
            if (sep && start != std::string_view::npos) {
                ++counts[std::string(text.substr(start, i - start))];
                start = std::string_view::npos;
            }
        }
        for (const auto& [tok, n] : counts) {
            if (n > policy.max_rep) {
                report.flags.push_back({SanitizeFlagKind::excessive_repetition, tok, static_cast<double>(n)});
            }
        }
        const double ratio = static_cast<double>(letters) / static_cast<double>(visible);
        if (ratio < policy.min_ratio) report.flags.push_back({SanitizeFlagKind::low_letter_ratio, {}, ratio});
    }
    report.passed = report.flags.empty();
    return report;
}

nlohmann::json to_json(const SanitizeReport& report) {
    nlohmann::json flags = nlohmann::json::array();
    for (const auto& f : report.flags) {
        switch (f.kind) {
        case SanitizeFlagKind::non_alnum_run:
            flags.push_back({{"flag", "non_alnum_run"}, {"length", static_cast<std::size_t>(f.value)}});
            break;
        case SanitizeFlagKind::empty:
            flags.push_back({{"flag", "empty"}});
            break;
        case SanitizeFlagKind::excessive_repetition:
            flags.push_back({{"flag", "excessive_repetition"},
                             {"token", f.token},
                             {"count", static_cast<std::size_t>(f.value)}});
            break;
        case SanitizeFlagKind::low_letter_ratio:
            flags.push_back({{"flag", "low_letter_ratio"}, {"ratio", f.value}});
            break;
        }
    }
    return {{"passed", report.passed}, {"flags", flags}};
}

} // namespace simforge
